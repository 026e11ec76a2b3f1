use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("invalid conversation `{id}`: {message}")]
    Validation { id: String, message: String },

    #[error("unknown party `{0}`")]
    UnknownParty(String),

    #[error("silent conversation: total talk-time is zero")]
    SilentConversation,

    #[error("conversation shorter than one window ({duration}s < {window}s)")]
    TooShort { duration: f64, window: f64 },

    #[error("analysis needs exactly two parties, found {0}; supply a role map grouping speakers into two sides")]
    NotTwoSided(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{0}")]
    InvalidInput(String),

    #[error("synthesis failed: {0}")]
    Synthesis(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
