//! Front end for `kerr-qlink`: scenario files, reports, sweeps and self-checks.

pub mod config;
pub mod error;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{ConfigError, ScenarioConfig};
pub use error::CliError;
