//! Configuration, orchestration and file output for the `rplab` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;
pub mod verify;

pub use config::{parse_config, parse_config_with, ConfigError, Experiment, RunConfig};
pub use error::CliError;
pub use experiments::{run, RunOutcome, Summary};
pub use table::{read_table, write_table, TimeSeriesTable};
pub use verify::{run_verify, VerifyReport};
