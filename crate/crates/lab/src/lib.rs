//! Scenario runner for the heat-equation boundary estimators: a catalog of
//! named measures, TOML scenario files, the verification experiments, and
//! JSON/CSV reports.

pub mod catalog;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;
pub mod suite;

pub use config::{ExperimentKind, ScenarioConfig};
pub use error::{LabError, LabResult};
pub use experiments::{Outcome, Table};
pub use report::{Assertion, VerificationReport};
