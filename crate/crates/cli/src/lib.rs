//! Command-line front end for `ldp-contraction`.
//!
//! Curves are written as CSV with a single header row and numbers printed to
//! 12 significant digits; [`format`] holds the writers and matching parsers.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
pub mod input;

pub use args::Cli;
pub use commands::{run, Output};
pub use error::{CliError, CliResult};
