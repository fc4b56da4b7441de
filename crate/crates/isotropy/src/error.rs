//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by the statistical and numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numerical method failed to reach the requested accuracy.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The requested combination (test, dimension, weight, ...) is not supported.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Invalid sample or configuration supplied by the caller.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// I/O error from the coefficient cache or table emission.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
