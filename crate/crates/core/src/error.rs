use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degenerate Gram matrix")]
    Degenerate,
    #[error("Gram matrix is not symmetric")]
    NotSymmetric,
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("lattice is not even")]
    NotEven,
    #[error("lattice is not definite")]
    NotDefinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("glue is not isotropic: {0}")]
    NonIsotropicGlue(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("search region is not compact: {0}")]
    NonCompact(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
