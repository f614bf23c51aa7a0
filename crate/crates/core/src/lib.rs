pub mod error;
pub mod exec;
pub mod kernel;
pub mod params;
pub mod qdilog;
pub mod quadrature;
pub mod representation;
pub mod suite;
pub mod weyl;
pub mod winding;

pub use error::{Error, Result};
