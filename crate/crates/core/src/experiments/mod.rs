//! Config-driven experiment matrices.
//!
//! A config names a scenario, the arms, one reward per arm (or one shared
//! reward), a policy and a seed set. [`run_experiment`] simulates every seed,
//! aggregates regret at log-spaced checkpoints next to the theoretical bound,
//! checks the declared assertions and writes CSV/JSON artifacts.

mod config;
mod presets;
mod runner;

pub use config::{
    AssertionSpec, ConcentrationSpec, ExperimentConfig, GammaSpec, PolicySpec, Scenario, SeedSpec, TailCase, ThetaSpec,
};
pub use presets::{preset, preset_names, preset_summary, preset_text, PRESETS};
pub use runner::{
    bounds_report, checkpoints, make_policy, regret_bound, run_experiment, run_seed, scenario_oracle, write_atomic,
    AssertionReport, CheckpointStat, ExperimentReport, OracleSummary, RunOptions, TailCaseReport, FALLBACK_BLOCKS,
};
