use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A configuration value that failed validation.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { field: field.into(), reason: reason.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("sweep cell theta={theta}, q0={q0}: {source}")]
    SweepCell {
        theta: f64,
        q0: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("data integrity: {0}")]
    Integrity(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by the user's configuration rather than the environment.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::ConfigParse(_) => true,
            Error::SweepCell { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
