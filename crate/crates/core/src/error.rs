use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground set must contain at least one element")]
    EmptyGroundSet,

    #[error("range {range} contains index {index}, outside [0, {n})")]
    IndexOutOfBounds { range: usize, index: usize, n: usize },

    #[error("range id {id} is invalid for a system with {m} ranges")]
    InvalidRange { id: usize, m: usize },

    #[error("point id {id} is invalid for a ground set of size {n}")]
    InvalidPoint { id: usize, n: usize },

    #[error("a packing needs at least two ranges, got {0}")]
    PackingTooSmall(usize),

    #[error("{0}")]
    InvalidInput(String),

    #[error("{what}: points {ids:?} are degenerate; regenerate the point set")]
    Degenerate { what: &'static str, ids: Vec<usize> },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("unknown family tag `{0}`")]
    UnknownFamily(String),

    #[error("{path}: {detail}")]
    Format { path: PathBuf, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, detail: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            detail: detail.into(),
        }
    }
}
