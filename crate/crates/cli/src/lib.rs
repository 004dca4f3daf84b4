//! Command-line front end for the drone video link simulator: scenario and
//! MCS-table parsing, run/sweep dispatch and result serialization.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod report;

pub use error::{CliError, CliResult};
