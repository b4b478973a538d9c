use thiserror::Error;

/// Errors produced by the transform, ridge and model layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A documented precondition was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Not enough samples to carry out the requested fit or estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A quadrature or iterative routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The scale grid cannot support an inverse transform.
    #[error("reconstruction coverage: {0}")]
    ReconstructionCoverage(String),

    /// Malformed text input; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Malformed binary grid file.
    #[error("invalid grid file: {0}")]
    BadFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
