use thiserror::Error;

/// Errors produced by construction and evolution routines.
#[derive(Debug, Error)]
pub enum IonError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operator not Hermitian: max |M - M^dag| = {0:.3e}")]
    NotHermitian(f64),
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, IonError>;
