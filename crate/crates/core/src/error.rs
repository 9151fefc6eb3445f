use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the solver, the problem setup and the run driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown scheme '{0}' (expected one of c4, u5, c6, u7, u9)")]
    UnknownScheme(String),

    #[error("velocity field has zero maximum speed; time step is undefined")]
    DegenerateVelocity,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error for key '{key}': {message}")]
    Config { key: String, message: String },

    #[error("non-finite value in solution at step {step} at cell {cell}")]
    NonFinite { step: usize, cell: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. } => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
