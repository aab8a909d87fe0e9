use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("NoScenes: no room directories under {0}")]
    NoScenes(PathBuf),

    #[error("MalformedRecord: {file}:{line}: {reason}")]
    MalformedRecord {
        file: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("MalformedScene: {0}")]
    MalformedScene(String),

    #[error("InvalidLayout: {0}")]
    InvalidLayout(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("EmptyAfterFilter: ceiling policy removed every point")]
    EmptyAfterFilter,

    #[error("GeometryMismatch: {0}")]
    GeometryMismatch(String),

    #[error("NoTraversableCenter: room {0}")]
    NoTraversableCenter(String),

    #[error("EmptyRoom: {0}")]
    EmptyRoom(String),

    #[error("UnknownRoom: {0}")]
    UnknownRoom(String),

    #[error("Unreachable: no grid path from ({from_col},{from_row}) to ({to_col},{to_row})")]
    Unreachable {
        from_col: usize,
        from_row: usize,
        to_col: usize,
        to_row: usize,
    },

    #[error("NotTraversable: cell ({col},{row})")]
    NotTraversable { col: usize, row: usize },

    #[error("SegmentUnreachable: {0} -> {1}")]
    SegmentUnreachable(String, String),

    #[error("EmptySources")]
    EmptySources,

    #[error("DegenerateField: distance field has no positive finite value")]
    DegenerateField,

    #[error("NoCandidates")]
    NoCandidates,

    #[error("MalformedVerdict: no path id in transcript")]
    MalformedVerdict,

    #[error("OutOfRange: path_{id} with {count} candidates")]
    OutOfRange { id: usize, count: usize },

    #[error("AllRunsFailed: {}", .0.join("; "))]
    AllRunsFailed(Vec<String>),

    #[error("Transport: {0}")]
    Transport(String),

    #[error("Unauthorized: {0}")]
    Unauthorized(String),

    #[error("MalformedFile: {0}")]
    MalformedFile(String),

    #[error("IoFailure: {path}: {source}")]
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
