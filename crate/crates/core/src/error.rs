use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A record that failed validation, with the 1-based line it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub line: usize,
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for RecordError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.field {
            Some(field) => write!(f, "line {}: field `{}`: {}", self.line, field, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record: {0}")]
    Malformed(RecordError),

    #[error("unknown discipline `{code}` (line {line})")]
    UnknownDiscipline { code: String, line: usize },

    #[error("duplicate serial_id {serial_id} (line {line})")]
    DuplicateSerial { serial_id: u64, line: usize },

    #[error("invalid discipline code `{0}`")]
    InvalidDisciplineCode(String),

    #[error("publication year {pub_year} is after observation year {observation_year}")]
    FutureYear { pub_year: i32, observation_year: i32 },

    #[error("missing citation data: {0}")]
    MissingCitations(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the contents of input data rather than
    /// by usage or the environment.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Malformed(_)
                | Error::UnknownDiscipline { .. }
                | Error::DuplicateSerial { .. }
                | Error::InvalidDisciplineCode(_)
                | Error::FutureYear { .. }
                | Error::MissingCitations(_)
                | Error::InsufficientData(_)
        )
    }
}
