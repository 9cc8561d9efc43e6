//! Scenario files, trajectory CSV output and text reports for the
//! vector-host model in `vhd-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod config;
pub mod presets;
pub mod report;
pub mod timeseries;

pub use config::{load_config, parse_config, ConfigError, Output, ScenarioConfig};
