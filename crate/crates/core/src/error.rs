use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed RIFF/WAVE structure.
    #[error("wav format error: {0}")]
    Format(String),

    #[error("unsupported codec: {0}")]
    UnsupportedCodec(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("failed to ingest {path}: {source}")]
    Ingest {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: sample rate {found} Hz, expected {expected} Hz")]
    RateMismatch {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("input too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    State(&'static str),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Training or balancing input that does not contain the classes it needs.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("unsupported file version {found} (this build reads up to {supported})")]
    UnsupportedVersion { found: u16, supported: u16 },

    #[error("feature file error: {0}")]
    FeatureFormat(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Manifest(e.to_string())
    }
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Numeric(e.to_string())
    }
}
