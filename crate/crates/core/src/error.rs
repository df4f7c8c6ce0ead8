use std::path::PathBuf;

/// Errors raised by the controller, plant model and harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain of a physical relation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is missing, inconsistent or out of range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The requested linearization point has no burning arc.
    #[error("no arc at operating point: {0}")]
    NoArc(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error(transparent)]
    Serialize(#[from] toml::ser::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn io_err(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
    Error::Io {
        path: path.into(),
        source,
    }
}
