//! Command-line front end: configuration, orchestration of the verification
//! suites, exact machine-readable records and a result cache.

pub mod cache;
pub mod commands;
pub mod config;
pub mod record;

use std::fmt;

pub use commands::{run, Command, Outcome};
pub use config::{load_config, RunConfig};
pub use record::{ResultRecord, Status};

/// Exit codes: 1 for a failed verification, 2 for usage and configuration
/// errors, 3 for a mathematically undefined request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    Usage(String),
    Undefined(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Undefined(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Undefined(m) => write!(f, "undefined: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
