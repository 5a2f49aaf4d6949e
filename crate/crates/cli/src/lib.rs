//! Command-line front end for the mmWave downlink simulator.

pub mod commands;
pub mod error;
pub mod output;
pub mod svg;

pub use commands::{Cli, Command};
pub use error::CliError;
