//! Driver for the `raman-vortex` command: configuration, image and table
//! files, and the `comb`, `figure3`, `pulse` and `analyze` pipelines.

pub mod commands;
pub mod config;
pub mod error;
pub mod pgm;
pub mod table;

pub use config::RunConfig;
pub use error::CliError;
