//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by construction and by the numerical operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter or input fails a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A mathematical domain restriction is violated (e.g. |rho| >= 1).
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested index or mode does not fit inside the truncation band.
    #[error("band overflow: {0}")]
    BandOverflow(String),

    /// An identity would be silently truncated; the operation refuses instead.
    #[error("margin violation: {0}")]
    MarginViolation(String),

    /// Two objects that must share a grid or fiber do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
