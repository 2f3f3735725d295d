use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("outside the function domain: {0}")]
    Domain(String),

    #[error("requested speed {0} exceeds the normalized maximum of 1")]
    InfeasibleSpeed(f64),

    #[error("load vector is infeasible: processor {processor} carries utilization {load}")]
    InfeasibleLoad { processor: usize, load: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("search space of {size} assignments exceeds the enumeration limit of {limit}")]
    EnumerationLimit { size: f64, limit: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the filesystem rather than by user input.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
