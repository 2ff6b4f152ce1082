//! Scenario files, analyses and CSV output for the `irs-deploy` command.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;

pub use config::{parse_config, ScenarioConfig};
pub use error::{CliError, Result};
pub use output::{fmt_num, write_rows, Row};
