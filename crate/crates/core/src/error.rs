use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: no interactions")]
    EmptyCorpus(String),

    #[error("split {part} part would be empty ({len} interactions, fraction {fraction})")]
    DegenerateSplit {
        part: &'static str,
        len: usize,
        fraction: f64,
    },

    #[error("density undefined: vocabulary sizes {n_queries}x{n_users}x{n_items}")]
    UndefinedDensity {
        n_queries: usize,
        n_users: usize,
        n_items: usize,
    },

    #[error("{what} index {index} out of range (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no negative item available for user {user}, query {query}")]
    ExhaustedNegatives { user: usize, query: usize },

    #[error("oracle enumeration too large: {pairs} pairs exceed cap {cap}")]
    OracleScale { pairs: usize, cap: usize },

    #[error("numeric divergence at {0}")]
    Divergence(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("bad snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
