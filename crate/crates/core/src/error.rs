use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read project root {path}: {source}")]
    UnreadableRoot {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid exclude pattern {pattern:?}: {message}")]
    BadPattern { pattern: String, message: String },

    #[error("edge {caller} -> {callee} references an unknown method")]
    DanglingEdge { caller: String, callee: String },

    #[error("unknown method id {0:?}")]
    UnknownMethod(String),

    #[error("file {0:?} is not part of the index")]
    UnknownFile(String),

    #[error("{0:?} is not in the current recommendation set")]
    NotRecommended(String),

    #[error("malformed index: {0}")]
    BadIndex(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
