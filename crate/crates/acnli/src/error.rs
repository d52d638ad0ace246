use std::io;
use std::path::{Path, PathBuf};

use acnli_core::agreement::AgreementError;
use acnli_core::faithfulness::FaithfulnessError;
use acnli_core::pairgen::SplitError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VALIDATION_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const EXTERNAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("usage: {0}")]
    Usage(String),
    /// Input cases failed parsing or validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("external service: {0}")]
    Service(String),
    #[error(transparent)]
    Agreement(#[from] AgreementError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Faithfulness(#[from] FaithfulnessError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Service(_)
            | Error::Faithfulness(FaithfulnessError::ScorerUnavailable(_))
            | Error::Faithfulness(FaithfulnessError::Protocol(_)) => exit::EXTERNAL,
            Error::InvalidInput(_) => exit::VALIDATION_FAILED,
            _ => exit::USAGE,
        }
    }
}
