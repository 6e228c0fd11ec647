//! Command-line harness for the sequential-measurement entanglement
//! laboratory: verification campaigns, parameter sweeps, and narrated
//! demos, all reproducible from a single seed.

pub mod config;
pub mod demo;
pub mod report;
pub mod scenario;
pub mod sweep;
pub mod verify;

use std::fmt;
use std::path::Path;

/// Exit status conventions: 0 when every verified bound holds, 1 when at
/// least one fails, 2 for usage or I/O problems.
pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Errors that end a run before (or outside) bound evaluation.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, bad scenario file, unknown names.
    Usage(String),
    /// Filesystem failures.
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {}", msg),
            CliError::Io(msg) => write!(f, "io error: {}", msg),
        }
    }
}

impl std::error::Error for CliError {}

/// Write a rendered document to the output path, or to stdout when no path
/// was given.
pub fn write_output(body: &str, out_path: Option<&Path>) -> Result<(), CliError> {
    match out_path {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {}", path.display(), e))),
        None => {
            print!("{}", body);
            Ok(())
        }
    }
}
