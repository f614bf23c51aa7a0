use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("tau = {tau} is not on the Regime {regime} locus: {reason}")]
    OffRegimeLocus {
        tau: Complex64,
        regime: &'static str,
        reason: &'static str,
    },
    #[error("spin index must be a positive integer, got {0}")]
    NonPositiveSpin(i64),
    #[error("central charge undefined at tau = 0")]
    ZeroTau,
    #[error("operation requires Regime II parameters")]
    RequiresRegimeII,
    #[error("operation requires Regime I parameters")]
    RequiresRegimeI,
    #[error("continuation ladder exceeded {steps} steps at zeta = {zeta}")]
    LadderExceeded { zeta: Complex64, steps: usize },
    #[error("zeta = {zeta} lies within {distance:e} of a pole of the dilogarithm")]
    NearPole { zeta: Complex64, distance: f64 },
    #[error("zeta = {zeta} lies within {distance:e} of a zero of the dilogarithm")]
    NearZero { zeta: Complex64, distance: f64 },
    #[error("contour passes within {modulus:e} of a zero (min |f| on contour)")]
    ContourTooClose { modulus: f64 },
    #[error("contour undersampled: phase jump of {jump} rad between consecutive nodes")]
    ContourUndersampled { jump: f64 },
    #[error("t = {t} lies within {distance:e} of a pole of the weight")]
    WeightPole { t: Complex64, distance: f64 },
    #[error("denominator {value:e} too close to zero at t = {t}")]
    DenominatorZero { t: Complex64, value: f64 },
    #[error("both sides underflow at (w, z) = ({w}, {z}); residual inconclusive")]
    Underflow { w: Complex64, z: Complex64 },
    #[error("non-finite integrand at z = {0}")]
    NonFiniteIntegrand(Complex64),
    #[error("domain region {index} is out of range 1..={n}")]
    DomainIndex { index: usize, n: u32 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("basis of size {0} exceeds the maximum of 32")]
    BasisTooLarge(usize),
    #[error("operator pair ({0}, {1}) is not a dual pair")]
    NotADualPair(&'static str, &'static str),
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
    #[error("Gaussian width sigma must be positive, got {0}")]
    InvalidSigma(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
