//! Shared error type for the core library.
//!
//! The taxonomy mirrors how callers must react:
//! * [`Error::Structural`] — the input object itself is malformed (non-square
//!   matrix, NaN entries, label/row count mismatch).
//! * [`Error::Argument`] — a parameter is out of range or two arguments do not
//!   fit together (space mismatch, size limits).
//! * [`Error::Precondition`] — a documented precondition fails on otherwise
//!   well-formed data (e.g. a point set that is not dense enough).
//! * [`Error::Domain`] — a dilation-structure operation was asked to leave its
//!   admissible domain; the message names the failing inclusion.
//! * [`Error::Io`] / [`Error::Parse`] — file I/O and format problems.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
