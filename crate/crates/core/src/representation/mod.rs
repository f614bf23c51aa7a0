//! Operators of the modular double acting on Gaussian-exponential-polynomial
//! functions, and the weighted planar scalar product.

pub mod gep;
pub mod inner;
pub mod operators;

pub use gep::{GepFunction, GepTerm};
pub use inner::{
    centered_basis, continuous_series_check, default_test_pair, gram_matrix, hermiticity_on_grid, hermiticity_residual,
    inner_product, ContinuousSeries, DomainSpec, GramResult, Hermiticity, Rectangle, Region, WeightedGrid,
    HERMITIAN_PAIRS,
};
pub use operators::{
    apply, casimir_eigen_residual, casimir_residual, compose, pointwise_gap, relation_residuals, OpName, OperatorSymbol,
};
