use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A file does not follow its declared format (magic, version, layout).
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("corrupt file {path}: expected {expected} bytes, found {actual}")]
    Corruption {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    /// Non-finite or otherwise unusable values in the data.
    #[error("data error: {0}")]
    Data(String),

    /// A numerical stage produced an unusable result.
    #[error("computation error: {0}")]
    Computation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("fold {fold}: {source}")]
    InFold {
        fold: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: msg.into(),
        }
    }

    /// The error with any fold annotations stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFold { source, .. } => source.root(),
            other => other,
        }
    }

    /// True when the error stems from bad caller input rather than bad data.
    pub fn is_validation(&self) -> bool {
        matches!(self.root(), Error::Validation(_))
    }
}
