use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error(transparent)]
    SpecSyntax(#[from] toml::de::Error),
    #[error("{path}: line {line}: {message}")]
    Tsplib {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Trace { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Instance { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] idone_core::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

pub(crate) trait IoContext<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T> IoContext<T> for io::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| HarnessError::Io {
            path: path.into(),
            source,
        })
    }
}

impl<T> IoContext<T> for csv::Result<T> {
    fn at(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|source| HarnessError::Csv {
            path: path.into(),
            source,
        })
    }
}
