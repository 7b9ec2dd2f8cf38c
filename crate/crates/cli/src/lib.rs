//! Library surface of the experiment harness; `main.rs` is a thin wrapper
//! so integration tests can drive the commands directly.

pub mod commands;
pub mod config;
pub mod verify;

use std::fmt;

/// Failures split by exit code: configuration problems exit 2,
/// verification failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Verification(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Verification(msg) => write!(f, "verification failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Verification(_) => 1,
        }
    }
}
