use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("modulus mismatch: x^{left}-1 vs x^{right}-1")]
    ModulusMismatch { left: usize, right: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An exact integer result did not fit the 128-bit range.
    #[error("permanent overflow{}", .subset_rank.map(|r| format!(" at subset rank {r}")).unwrap_or_default())]
    Overflow { subset_rank: Option<u64> },

    #[error("matrix order {order} exceeds the {engine} limit of {limit}")]
    OrderTooLarge {
        engine: &'static str,
        order: usize,
        limit: usize,
    },

    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error("checkpoint {path} was written for a different problem ({message})")]
    CheckpointMismatch { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
