//! Batch front end for `lindblad-core`: reads a JSON run configuration and
//! writes spectrum, trajectory, expectation or verification reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run, Options};
pub use config::{Command, Format, RunConfig};
pub use error::CliError;
pub use report::Report;
