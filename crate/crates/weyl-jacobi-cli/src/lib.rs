//! Command-line companion to weyl-jacobi-core: JSON and CSV I/O, the
//! subcommand implementations, and byte-deterministic report rendering.

pub mod commands;
pub mod gfmt;
pub mod report;
pub mod schema;

/// Errors surfaced to the user, split by exit code: bad input (files,
/// schemas, flags) exits 2, numeric failures inside a computation exit 3.
/// Tolerance verdicts (exit 1) are ordinary return values, not errors.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}
