//! The executable face of the workspace: scenario files in, reports out.
//!
//! `privcache bounds|verify|simulate|analyze <scenario.json>` loads an exact
//! scenario description, runs the requested pipeline, and emits a versioned
//! JSON (or CSV) report. Exit codes are CI-friendly: 0 success, 2 validation
//! error, 3 verification failure, 4 size limit.

pub mod commands;
pub mod report;
pub mod scenario;

use thiserror::Error;

/// Errors carrying their process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("verification failure: {0}")]
    Verification(String),

    #[error("size limit: {0}")]
    SizeLimit(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Verification(_) => 3,
            CliError::SizeLimit(_) => 4,
        }
    }
}

impl From<privcache_core::Error> for CliError {
    fn from(e: privcache_core::Error) -> Self {
        match e {
            privcache_core::Error::SizeLimit(msg) => CliError::SizeLimit(msg),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
