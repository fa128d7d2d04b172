use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A structural parameter (dimension, size, exponent, ...) is outside the
    /// supported range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A formula was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data does not satisfy the operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no transition bracketed for p = {p} in temperature window [{lo}, {hi}]")]
    NoTransition { p: u32, lo: f64, hi: f64 },

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
