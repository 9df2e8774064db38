//! Command-line driver, file formats and pipeline orchestration for the
//! tabular clustering toolkit.
//!
//! The algorithms live in `tabkit-core`; this crate adds CSV ingestion,
//! run configuration, the reproducible run manifest, figure emission and
//! the `tabkit` binary's subcommands.

use std::fmt;

pub mod config;
pub mod io;
pub mod manifest;
pub mod pipeline;
pub mod report;

/// Front-end error with a process exit code per category:
/// 2 configuration, 3 data, 4 numeric.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
            CliError::Numeric(msg) => write!(f, "numeric error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tabkit_core::Error> for CliError {
    fn from(e: tabkit_core::Error) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Data(e.to_string())
        }
    }
}
