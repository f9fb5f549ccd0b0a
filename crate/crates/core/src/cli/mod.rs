//! Command-line front end: run documents, the expression language for
//! coefficients, the problem catalog, and the commands.

pub mod catalog;
mod commands;
pub mod config;
pub mod expr;

pub use commands::{
    convergence_csv, emit, execute, invariant_suite, load_spec, resolve_reference, run, spectrum_csv, Artifact,
    CheckLine, CliError, Command, ExitStatus, Invocation, Report,
};
