use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no alphabetic characters left after cleaning {raw:?}")]
    EmptyAfterCleaning { raw: String },

    #[error("cannot split {groups} source groups into {folds} folds")]
    TooFewGroups { groups: usize, folds: usize },

    #[error("language model order {0} is outside the supported range 2..=6")]
    OrderRange(usize),

    #[error("no {order}-gram is observable in the training names")]
    OrderTooLargeForData { order: usize },

    #[error("no derivation covers source character {ch:?} at position {position}")]
    NoDerivation { ch: char, position: usize },

    #[error("the truth set is empty")]
    EmptyTruth,

    #[error("confidence band needs at least 2 curves of equal length, got {0}")]
    DegenerateInput(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
