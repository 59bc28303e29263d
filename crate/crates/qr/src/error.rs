//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QrError {
    #[error("invalid grid shape {p}x{q}: need p >= q >= 1")]
    InvalidShape { p: usize, q: usize },

    #[error("elimination elim({row}, {piv}, {col}) is out of range for the shape")]
    InvalidElimination { row: usize, piv: usize, col: usize },

    #[error("invalid elimination list: {0}")]
    InvalidList(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("scheme `{0}` is not defined in this context")]
    SchemeNotApplicable(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
