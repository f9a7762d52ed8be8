//! Command-line front end: config parsing, experiment dispatch and table emission.

pub mod config;
pub mod error;
pub mod run;
pub mod table;

pub use config::{parse_config, ExperimentConfig};
pub use error::CliError;
pub use run::{run, RunOptions, RunOutput};
pub use table::{emit, Format, ResultTable};
