use std::io;
use std::path::{Path, PathBuf};

use lexprobe_core::eval::EvalError;
use lexprobe_core::probe::BuildError;

/// Failures of the file-level pipeline. Each maps to a stable exit code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", .path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("{0}")]
    Eval(EvalError),
}

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.to_path_buf(), line, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => exit::IO,
            Error::Parse { .. } | Error::Config(_) => exit::PARSE,
            Error::Build(BuildError::Empty) => exit::EMPTY_BUILD,
            Error::Build(_) => exit::PARSE,
            Error::Eval(EvalError::IdMismatch { .. } | EvalError::Unclustered(_) | EvalError::BadPrediction(..)) => {
                exit::ID_MISMATCH
            }
            Error::Eval(_) => exit::PARSE,
        }
    }
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const IO: i32 = 3;
    pub const EMPTY_BUILD: i32 = 4;
    pub const BIAS_FAIL: i32 = 5;
    pub const ID_MISMATCH: i32 = 6;
}
