use std::path::PathBuf;

use serde::Serialize;

use crate::session::PairView;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] jnd_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("invalid request: {0}")]
    Validation(String),
    #[error("unknown package {0}")]
    UnknownPackage(u32),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("session {0} has no more pairs")]
    NoMorePairs(String),
    #[error("session {session} is {status}, not accepting responses")]
    NotAccepting { session: String, status: String },
    #[error("pair already answered; current pair is attached")]
    AlreadyAnswered { current: Option<Box<PairView>> },
    #[error("event log: {0}")]
    EventLog(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Core(_) => "domain",
            Error::Io { .. } => "io",
            Error::Schema { .. } => "schema",
            Error::Config(_) => "config",
            Error::Validation(_) => "validation",
            Error::UnknownPackage(_) => "unknown_package",
            Error::UnknownSession(_) => "unknown_session",
            Error::NoMorePairs(_) => "no_more_pairs",
            Error::NotAccepting { .. } => "not_accepting",
            Error::AlreadyAnswered { .. } => "already_answered",
            Error::EventLog(_) => "event_log",
            Error::Json(_) => "json",
        }
    }

    pub fn to_body(&self) -> ErrorBody {
        ErrorBody {
            error: ErrorDetail {
                kind: self.kind(),
                message: self.to_string(),
                line: match self {
                    Error::Schema { line, .. } => Some(*line),
                    _ => None,
                },
                current: match self {
                    Error::AlreadyAnswered { current } => current.as_deref().cloned(),
                    _ => None,
                },
            },
        }
    }
}

/// JSON error envelope shared by the CLI and the HTTP API.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorDetail {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current: Option<PairView>,
}
