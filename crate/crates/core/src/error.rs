use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    /// A malformed record in one of the line-oriented input formats.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid pseudo-word spec: {0}")]
    PseudoWord(String),

    #[error("insufficient seeds for sense {sense}: need {needed}, found {found}")]
    InsufficientSeeds { sense: String, needed: usize, found: usize },

    #[error("invalid seed: {0}")]
    Seed(String),

    #[error("gold mismatch: {0}")]
    GoldMismatch(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}
