use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the extraction engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },

    #[error("json error in {context}: {message}")]
    Json { context: String, message: String },

    #[error("missing required column `{column}` in {context}")]
    MissingColumn { column: String, context: String },

    #[error("duplicate ids: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),

    #[error("row {line}: {reason}")]
    RejectedRow { line: usize, reason: String },

    #[error("invalid month `{0}` (expected YYYY-MM)")]
    InvalidMonth(String),

    #[error("unreadable input: {0}")]
    Unreadable(String),

    #[error("invalid dictionary entry: {0}")]
    InvalidEntry(String),

    #[error("conflicting rule id `{0}`")]
    ConflictingRule(String),

    #[error("invalid JVEC file: {0}")]
    Format(String),

    #[error("truncated JVEC file: expected at least {expected} bytes, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("zero vector: {0}")]
    ZeroVector(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("unknown id `{0}`")]
    UnknownId(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("threshold {threshold} is not on a bin edge (nearest edges: {below:?}, {above:?})")]
    OffGrid { threshold: f64, below: Option<f64>, above: Option<f64> },

    #[error("degenerate statistic: {0}")]
    Degenerate(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn csv(context: impl Into<String>, source: csv::Error) -> Self {
        Error::Csv { context: context.into(), source }
    }

    pub(crate) fn json(context: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Error::Json { context: context.into(), message: err.to_string() }
    }
}
