use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the rescoring pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A single-line parse failure, without file context.
    #[error("{0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("zero-norm vector has no direction")]
    ZeroNorm,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },

    #[error("out of vocabulary: {0}")]
    OutOfVocabulary(String),

    #[error("normal equations are singular ({pairs} pairs for source dimension {dim})")]
    Singular { pairs: usize, dim: usize },

    #[error("only {resolved} seed pairs resolved, at least {required} needed")]
    TooFewPairs { resolved: usize, required: usize },

    #[error("pair is unscorable: {0}")]
    Unscorable(String),

    #[error("too many malformed lines in {path}: more than {cap}")]
    ErrorCapExceeded { path: PathBuf, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach file and line context to a single-line parse error.
    pub(crate) fn at(self, path: impl Into<PathBuf>, line: usize) -> Self {
        match self {
            Error::Parse(message) => Error::Format {
                path: path.into(),
                line,
                message,
            },
            other => Error::Format {
                path: path.into(),
                line,
                message: other.to_string(),
            },
        }
    }
}
