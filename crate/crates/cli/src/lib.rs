//! Config-driven front end for `nvsinglet-core`: verbs, config handling and file output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{run, Command, IscMode, SpectrumKind};
pub use config::RunConfig;
pub use error::CliError;
