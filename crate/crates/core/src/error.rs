use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid keyword pattern `{pattern}` in set `{set}`: {reason}")]
    InvalidPattern {
        set: String,
        pattern: String,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    BadInput { path: PathBuf, message: String },

    #[error("no documents found in {0}")]
    NoDocuments(PathBuf),

    #[error("empty training corpus")]
    EmptyTrainingCorpus,

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("node order does not match the network's node set")]
    NodeOrderMismatch,

    #[error("matrix is {rows}x{rows} but partition covers {len} nodes")]
    DimensionMismatch { rows: usize, len: usize },

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("cluster index {index} out of range for k = {k}")]
    ClusterOutOfRange { index: usize, k: usize },

    #[error("partition has {partition} clusters but the block spec asks for {spec}")]
    ClusterCountMismatch { partition: usize, spec: usize },

    #[error("cannot form {k} non-empty clusters from {n} nodes")]
    TooFewNodes { n: usize, k: usize },

    #[error("instance too large for oracle ({0} partitions)")]
    OracleTooLarge(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn bad_input(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::BadInput {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 configuration, 2 data, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidPattern { .. } => 1,
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
