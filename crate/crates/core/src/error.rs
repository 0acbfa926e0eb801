use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A replay lookup that found no stored response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureMiss {
    pub url: String,
    pub key: String,
    /// Dataset record that triggered the request, when known.
    pub record_id: Option<String>,
}

impl std::fmt::Display for FixtureMiss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.record_id {
            Some(id) => write!(f, "record {id}: {} (key {})", self.url, self.key),
            None => write!(f, "{} (key {})", self.url, self.key),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid claim: {0}")]
    InvalidClaim(String),

    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),

    #[error("invalid query spec: {0}")]
    InvalidSpec(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("no fixture for {0}")]
    FixtureMiss(FixtureMiss),

    #[error("{} fixture(s) missing", .0.len())]
    FixtureMisses(Vec<FixtureMiss>),

    #[error("network error for {url}: {message}")]
    Network { url: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("bot challenge detected at {0}")]
    CaptchaDetected(String),

    #[error("corrupt fixture {path}: {message}")]
    CorruptFixture { path: PathBuf, message: String },

    #[error("line {line}, field {field}: {message}")]
    Format {
        line: usize,
        field: String,
        message: String,
    },

    #[error("record {id}: {message}")]
    Validation { id: String, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("engine {0} cannot be evaluated against a ranked-relevance dataset")]
    UnsupportedEngine(String),

    #[error("unsupported publisher host: {0}")]
    UnsupportedPublisher(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
