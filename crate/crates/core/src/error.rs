use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate {kind} label `{label}`")]
    DuplicateLabel { kind: &'static str, label: String },

    #[error("taxonomy has no {0}")]
    EmptyVocabulary(&'static str),

    #[error("unknown {kind} `{token}`")]
    UnknownLabel { kind: &'static str, token: String },

    #[error("malformed action `{0}`: expected `verb noun`")]
    MalformedAction(String),

    #[error("action index out of range: verb {verb} of {verbs}, noun {noun} of {nouns}")]
    ActionOutOfRange {
        verb: usize,
        noun: usize,
        verbs: usize,
        nouns: usize,
    },

    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    Dimension {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("invalid data: {0}")]
    Invalid(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("template error: {0}")]
    Template(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("transport error for clip `{clip_id}`: {source}")]
    Transport {
        clip_id: String,
        #[source]
        source: crate::llm_client::LlmError,
    },

    #[error(transparent)]
    Llm(#[from] crate::llm_client::LlmError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.to_string(),
        }
    }

    pub(crate) fn invalid(message: impl ToString) -> Self {
        Error::Invalid(message.to_string())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Template(_) => 1,
            Error::Transport { .. } | Error::Llm(_) => 3,
            _ => 2,
        }
    }
}
