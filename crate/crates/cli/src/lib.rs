//! Command-line driver: argument and config parsing, sweeps and CSV output.

pub mod args;
mod commands;
pub mod config;
pub mod error;
mod output;
pub mod range;
pub mod settings;

pub use args::{Cli, Command, RunArgs};
pub use commands::run;
pub use config::{parse_config, render_config};
pub use error::{CliError, CliResult};
pub use range::parse_range;
pub use settings::RunConfig;
