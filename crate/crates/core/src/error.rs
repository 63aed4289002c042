use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("input is not a density matrix")]
    NotDensityMatrix,

    #[error("state is not a fully correlated X state")]
    NotXcorr,

    #[error("operation not defined for {0} noise")]
    UnsupportedNoise(&'static str),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("method `{method}` cannot be applied: {reason}")]
    MethodGeometry { method: String, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("time grid mismatch: {0}")]
    GridMismatch(String),

    #[error("malformed trace file {path}: {message}")]
    Trace { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Trace { .. } => 2,
            Error::MethodGeometry { .. } => 3,
            Error::Numerical(_) | Error::NotDensityMatrix | Error::NotXcorr => 4,
            Error::GridMismatch(_) => 5,
            Error::InvalidArgument(_) | Error::UnsupportedNoise(_) => 2,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
