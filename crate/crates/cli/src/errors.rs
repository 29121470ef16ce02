//! CLI error type carrying the process exit code.
//!
//! Exit codes: 0 success (thresholds met where applicable), 1 usage error,
//! 2 comparison-threshold failure, 3 runtime/numerical failure.

use std::fmt;

/// How a failed invocation should terminate.
#[derive(Clone, Debug)]
pub struct CliError {
    message: String,
    exit_code: i32,
}

impl CliError {
    /// A problem with flags or their values (exit 1).
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: 1,
        }
    }

    /// A runtime failure: I/O, parsing, or numerics (exit 3).
    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            exit_code: 3,
        }
    }

    /// The exit code to terminate with.
    pub fn exit_code(&self) -> i32 {
        self.exit_code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<qcycle::Error> for CliError {
    fn from(err: qcycle::Error) -> Self {
        CliError::runtime(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::runtime(err.to_string())
    }
}
