use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("ingestion error in {path}: {message}")]
    Ingest { path: PathBuf, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("{n} variables exceed the exhaustive solver limit of {limit}")]
    TooManyVariables { n: usize, limit: usize },

    #[error("{n} qubits exceed the simulator limit of {limit}")]
    TooManyQubits { n: usize, limit: usize },

    #[error("svm error: {0}")]
    Svm(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn ingest(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Ingest {
            path: path.into(),
            message: message.into(),
        }
    }
}
