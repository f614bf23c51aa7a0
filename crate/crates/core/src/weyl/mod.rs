//! Exact verification of the quantum-group relations in the Weyl-pair
//! realization. No floating point anywhere in this module.

pub mod algebra;
pub mod poly;
pub mod qcoeff;

pub use algebra::{build_generators, casimir, relation_residuals, AlgebraElement, Exponents, Generators};
pub use poly::{gq, gq_ratio, GaussRational, Poly};
pub use qcoeff::QCoefficient;
