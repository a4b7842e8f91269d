//! Process errors carrying their exit codes.
//!
//! 0 ok, 2 config error, 3 repository/branch/release error, 4 corpus/model
//! error, 5 bundle error.

use std::fmt;

#[derive(Debug)]
pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

pub fn config_error(message: impl Into<String>) -> CliError {
    CliError {
        exit_code: 2,
        message: message.into(),
    }
}

pub fn repo_error(message: impl Into<String>) -> CliError {
    CliError {
        exit_code: 3,
        message: message.into(),
    }
}

pub fn corpus_error(message: impl Into<String>) -> CliError {
    CliError {
        exit_code: 4,
        message: message.into(),
    }
}

pub fn bundle_error(message: impl Into<String>) -> CliError {
    CliError {
        exit_code: 5,
        message: message.into(),
    }
}

/// IO problems during a stage count as config-level failures unless a more
/// specific code applies at the call site.
pub fn io_error(context: &str, err: std::io::Error) -> CliError {
    CliError {
        exit_code: 2,
        message: format!("{context}: {err}"),
    }
}
