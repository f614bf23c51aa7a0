use thiserror::Error;

/// Anything that makes a run impossible before or while it starts. Maps to
/// exit code 2.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Core(#[from] moddouble::Error),
    #[error("cannot parse {flag} value {value:?} as a complex number")]
    Complex { flag: &'static str, value: String },
    #[error("bad grid {0:?}; expected imag:LO:HI:N, real:LO:HI:N or rect:XLO:XHI:YLO:YHI:N")]
    Grid(String),
    #[error("bad domain {0:?}; expected a region index >= 1 or `real`")]
    Domain(String),
    #[error("{0}")]
    Incompatible(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}
