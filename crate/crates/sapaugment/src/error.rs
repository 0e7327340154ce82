//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or out-of-range caller input (files, configs, flags).
    #[error("invalid input: {0}")]
    Input(String),

    /// A numerical procedure failed (factorization, divergence).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An operation was called in a state that cannot serve it.
    #[error("state error: {0}")]
    State(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON encoding or decoding failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::State(msg.into())
    }

    /// Process exit code for the CLI: 1 for input-class errors, 2 for
    /// numerical/state errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Input(_) | Error::Io(_) | Error::Json(_) => 1,
            Error::Numerical(_) | Error::State(_) => 2,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
