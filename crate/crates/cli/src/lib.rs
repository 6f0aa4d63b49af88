//! Experiment runner for scatterlab: TOML configuration, orchestration of
//! the solver, evolver and probes, and CSV/JSON artifacts.

pub mod artifacts;
pub mod config;
pub mod experiment;
pub mod probes;

pub use config::{ExperimentConfig, ValidationError};
pub use experiment::{execute, run_experiment, Failure, Outcome, Stages};
