// SPDX-License-Identifier: MIT OR Apache-2.0

//! Library error type.

use std::fmt;

/// Errors reported by library operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on arguments or configuration was violated.
    InvalidInput(String),
    /// Input data (files, series contents) failed validation.
    Data(String),
    /// A numerical procedure failed (factorization breakdown, singular
    /// system, non-finite intermediate).
    Numerical(String),
}

impl Error {
    pub fn invalid_input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
