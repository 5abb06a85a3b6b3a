use std::io;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("empty vocabulary: every document is empty after tokenization and stopword removal")]
    EmptyVocabulary,

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn dims(expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            expected: expected.into(),
            got: got.into(),
        }
    }

    /// True for errors caused by the data rather than by caller misuse.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyVocabulary
                | Error::Format(_)
                | Error::Io(_)
                | Error::Csv(_)
                | Error::Json(_)
                | Error::UndefinedMetric(_)
                | Error::Precondition(_)
        )
    }
}
