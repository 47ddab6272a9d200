//! Scenario files, initial data, orchestration of a full run and its CSV
//! output.

pub mod config;
pub mod initial;
pub mod io;
pub mod runner;

pub use config::{parse_config, InitialData, Outputs, Scenario};
pub use initial::build_initial;
pub use runner::{execute, run_scenario, RunSummary, ScenarioOutput};
