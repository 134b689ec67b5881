//! Command-line surface over the wave-packet library: a JSON run
//! configuration drives the fit -> expand -> evolve -> slice pipeline, and a
//! `check` subcommand replays the library invariants at desk scale.
//!
//! Exit codes: 0 success, 1 a check reported a failure, 2 usage or
//! configuration error, 3 numerical failure inside the pipeline.

pub mod checks;
pub mod commands;
pub mod config;
pub mod emit;
pub mod report;

pub use commands::{run, Cli};

/// Failure channel of a command, carrying the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation or configuration; exit code 2.
    Usage(String),
    /// A validation check failed; exit code 1.
    Validation(String),
    /// The pipeline could not produce a result; exit code 3.
    Numerical(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Validation(_) => 1,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("config error: {m}"),
            Failure::Validation(m) => format!("validation failure: {m}"),
            Failure::Numerical(m) => format!("numerical failure: {m}"),
        }
    }
}

/// Maps a library error escaping the compute phase onto exit code 3.
pub(crate) fn numerical(err: kss::Error) -> Failure {
    Failure::Numerical(err.to_string())
}
