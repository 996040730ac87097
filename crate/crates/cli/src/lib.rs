//! Command-line surface for the thinset analyses: approximation builds,
//! analysis reports, the implication-table verification suite, and
//! deterministic rendering of reports to CSV/SVG.
//!
//! All file output is atomic (temp-and-rename) and byte-deterministic for a
//! fixed config and seed; wall-clock metadata goes to a `.sidecar.json`
//! next to each report, never into the report itself.

pub mod commands;
pub mod config;
pub mod render;
pub mod report;
pub mod table1;

use std::process::ExitCode;

/// Exit codes: 0 success, 2 budget/config, 3 invariant violation, 4 IO.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Budget(String),
    Invariant(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<thinset_core::Error> for CliError {
    fn from(e: thinset_core::Error) -> Self {
        use thinset_core::Error as E;
        match &e {
            E::EnumerationBudget { .. } | E::ExactBudgetExceeded { .. } => {
                CliError::Budget(e.to_string())
            }
            E::InvalidSpec(_) | E::InsufficientDepth { .. } => CliError::Config(e.to_string()),
            E::DuplicatePoints | E::DegenerateAnnulus | E::Containment { .. } => {
                CliError::Invariant(e.to_string())
            }
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Budget(_) => ExitCode::from(2),
            CliError::Invariant(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(4),
        }
    }
}
