//! Configuration files, output formats, built-in scenarios and the command
//! implementations behind the `dtsch` binary.

pub mod commands;
pub mod config;
pub mod formats;
pub mod scenarios;

pub use commands::CliError;
pub use config::{ConfigError, RunConfig};
