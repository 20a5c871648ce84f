//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("form is not closed")]
    NotClosed,
    #[error("chain is not a generalized loop")]
    NotALoop,
    #[error("trivial form where a nontrivial one is required")]
    TrivialForm,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
