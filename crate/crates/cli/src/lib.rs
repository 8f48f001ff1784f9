//! Scenario files, report formats and command drivers for the `errbar`
//! binary. The numerics live in `errbar-core`; this crate adds IO.

pub mod config;
pub mod report;
pub mod run;
pub mod spec;

use std::path::PathBuf;

/// Exit code when every row passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when some relation check fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for configuration, IO and numerical errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{id}: {source}")]
    Scenario { id: String, source: errbar_core::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scenario { source: errbar_core::Error::RelationViolated { .. }, .. } => EXIT_FAIL,
            _ => EXIT_ERROR,
        }
    }
}
