use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot:.3e} at column {col})")]
    NotPositiveDefinite { col: usize, pivot: f64 },

    #[error("non-finite value encountered{}", step.map(|t| format!(" at step {t}")).unwrap_or_default())]
    NonFinite { step: Option<u64> },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn bad_param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 for data problems, 3 for numerical
    /// failures. Usage errors are mapped to 1 before an `Error` exists.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Data(_) | Error::Config(_) | Error::Io { .. } => 2,
            Error::DimensionMismatch { .. }
            | Error::NotPositiveDefinite { .. }
            | Error::NonFinite { .. }
            | Error::InvalidParameter { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
