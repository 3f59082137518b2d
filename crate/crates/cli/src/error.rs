use std::process::ExitCode;

use graphflow_core::Error as CoreError;
use thiserror::Error;

/// Driver failures, each mapped to its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("io: {0}")]
    Io(String),
    #[error("config: {0}")]
    Config(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("property violated: {0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Violation(_) => 4,
        })
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::Io(_) => CliError::Io(msg),
            CoreError::Json(_)
            | CoreError::InvalidGraph(_)
            | CoreError::InvalidParameter(_)
            | CoreError::InvalidExponent(_)
            | CoreError::MissingLipschitz
            | CoreError::StepTooLarge { .. }
            | CoreError::UnknownNode(_)
            | CoreError::EmptyNodeSet
            | CoreError::DuplicateNode(_)
            | CoreError::Precondition(_) => CliError::Config(msg),
            _ => CliError::Solver(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
