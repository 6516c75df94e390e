//! Persistence, configuration, noise injection, metrics, plot export, and
//! the figure pipelines behind the `brt` command-line tool.

pub mod angle;
pub mod config;
pub mod error;
pub mod field_file;
pub mod metrics;
pub mod noise;
pub mod pgm;
pub mod repro;
pub mod square;

pub use error::{CliError, Result};
