use std::path::PathBuf;

/// Errors produced by the toolkit.
///
/// Each variant names the contract that was violated so front ends can
/// report it without a backtrace.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path} at {unit} {index}: {message}")]
    Parse {
        path: PathBuf,
        /// "line" for text formats, "record" for binary ones.
        unit: &'static str,
        index: usize,
        message: String,
    },

    #[error("malformed header in {path}: {key}: {message}")]
    Header {
        path: PathBuf,
        key: String,
        message: String,
    },

    #[error("insufficient points: {0}")]
    InsufficientPoints(String),

    #[error("degenerate {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no overlap between epochs")]
    NoOverlap,

    #[error("no valid cells: {0}")]
    NoValidCells(String),

    #[error("target not found: {0}")]
    TargetNotFound(String),

    #[error("missing observation: scan {scan} has no observation of target {target}")]
    MissingObservation { scan: String, target: String },

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("json error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(
        path: impl Into<PathBuf>,
        unit: &'static str,
        index: usize,
        message: impl Into<String>,
    ) -> Error {
        Error::Parse {
            path: path.into(),
            unit,
            index,
            message: message.into(),
        }
    }
}
