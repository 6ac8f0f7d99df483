//! Protocol simulation with exact regret accounting, instance generators and
//! brute-force oracles.

pub mod generators;
pub mod genspec;
pub mod oracles;
pub mod rng;
mod simulate;

pub use simulate::{round_statistics, run_experiment, Experiment, ExperimentConfig, RegretTrace, RoundRecord};
