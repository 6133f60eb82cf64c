use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("game structure: {0}")]
    Structure(String),

    #[error("imperfect recall at infoset `{0}`")]
    ImperfectRecall(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("profile has no strategy for infoset `{0}`")]
    MissingInfoset(String),

    #[error("no embedding vector for tokens: {}", .0.join(", "))]
    MissingTokens(Vec<String>),

    #[error("unknown token `{0}`")]
    UnknownToken(String),

    #[error("observation `{0}` is not covered by the abstraction maps")]
    UncoveredObservation(String),

    #[error("training diverged at iteration {0}")]
    Diverged(usize),

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("environment variable `{0}` is not set")]
    MissingApiKey(String),

    #[error("provider request failed after {attempts} attempts: {msg}")]
    Provider { attempts: usize, msg: String },

    #[error("experiment cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
