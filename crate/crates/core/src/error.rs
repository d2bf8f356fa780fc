use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("numerical domain error: {0}")]
    NumericalDomain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("zero field where a nonzero field is required")]
    ZeroField,
}

pub type Result<T> = std::result::Result<T, Error>;
