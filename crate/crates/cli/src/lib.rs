//! Scenario runner for the `spinchain` simulator: validated TOML configs,
//! seeded ensembles dispatched in parallel, CSV series with ensemble
//! aggregates, and a manifest of every file written.

// `!(x > 0.0)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregate;
pub mod config;
pub mod run;
pub mod scenario;

pub use config::{validate_config, ConfigErrors, ExperimentConfig, Scenario, SweepParam};
pub use run::{run_scenario, sweep, CliError, RunManifest};
