//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Variants separate caller
//! mistakes (domain violations, mismatched bases) from environmental
//! failures (I/O, unparseable files) and numerical breakdown.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain (bad mode index,
    /// particle count out of range, negative noise strength, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two values that must share a basis do not.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// A file could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An iterative numerical procedure failed to converge or produced
    /// a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::BasisMismatch(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
