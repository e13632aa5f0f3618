use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid direction: {0}")]
    Direction(String),

    #[error("invalid quantization: {0}")]
    Quantization(String),

    #[error("observation invalid: {0}")]
    Observation(String),

    #[error("pattern metric: {0}")]
    Metric(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("sounder: {0}")]
    Sounder(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
