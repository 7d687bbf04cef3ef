//! Application-level errors and their process exit codes.

use std::path::PathBuf;

use nary_ecoc_core::EcocError;
use thiserror::Error;

/// Anything that can go wrong between the command line and the core
/// library.
#[derive(Debug, Error)]
pub enum AppError {
    /// Bad flags or argument combinations (exit code 1).
    #[error("{0}")]
    Usage(String),
    /// Unreadable or unwritable files (exit code 2).
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed file content (exit code 2).
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    /// Numeric or modeling failures from the core library (exit code 3).
    #[error(transparent)]
    Core(#[from] EcocError),
    /// Report serialization failures (exit code 3).
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AppError {
    /// Exit code contract: 1 usage, 2 data, 3 numeric/internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Io { .. } | AppError::Parse { .. } => 2,
            AppError::Core(_) | AppError::Json(_) => 3,
        }
    }

    /// Wraps an IO error with the path it happened on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> AppError {
        AppError::Io { path: path.into(), source }
    }

    /// Builds a parse error pointing at a file line (1-based).
    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> AppError {
        AppError::Parse { path: path.into(), line, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, AppError>;
