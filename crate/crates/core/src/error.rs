use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus is empty: no document retains at least one token")]
    EmptyCorpus,

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown document index {0}")]
    UnknownDoc(usize),

    #[error("unknown topic {0}")]
    UnknownTopic(usize),

    #[error("unknown word id {0}")]
    UnknownWord(u32),

    #[error("clustering is empty")]
    EmptyClustering,

    #[error("clusterings cover different document universes ({0} vs {1} documents)")]
    MismatchedUniverse(usize, usize),

    #[error("no rows to render")]
    EmptyRows,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("archive mismatch: {0}")]
    ArchiveMismatch(String),

    #[error("malformed archive {path}: {message}")]
    Archive { path: PathBuf, message: String },

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

    pub(crate) fn archive(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Archive {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
