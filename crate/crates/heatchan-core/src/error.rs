//! Error type shared by all modules.

use std::fmt;

/// Library error conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a mathematical domain constraint (e.g. αβ ≤ 1, D > E).
    Domain(String),
    /// Caller misused an interface (index out of range, invalid configuration).
    Usage(String),
    /// A requested computation cannot meet its accuracy contract
    /// (grid too coarse, insufficient span, bracket not found).
    Accuracy(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::Accuracy(msg) => write!(f, "accuracy error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
