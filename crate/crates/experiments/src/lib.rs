//! Scenario runner for the stable phase retrieval experiments.
//!
//! A scenario reads a flat `key = value` config, runs against `spr-core`
//! and produces a [`RunReport`]: a metrics table written as CSV, plus
//! verdicts, witnesses and timing in JSON.

pub mod config;
mod error;
pub mod report;
pub mod scenarios;
pub mod thresholds;

pub use config::{Scenario, ScenarioConfig};
pub use error::{ExpError, Result};
pub use report::{RunReport, Table, Verdict, Witness};
pub use scenarios::run_scenario;
