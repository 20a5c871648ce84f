//! Configuration, experiment recipes, reports and the acceptance checks
//! that tie the modules together.

pub mod checks;
pub mod config;
pub mod experiments;
pub mod report;

pub use checks::{run_acceptance, AcceptanceOptions, CriterionResult};
pub use config::{ConfigFile, ExperimentConfig, ExperimentKind, Overrides, PathSpec, RatioKind};
pub use experiments::run_experiment;
pub use report::{Report, ReportRow};
