//! Seeded multi-run experiments and their outputs.

mod config;
mod metrics;
mod output;
mod runner;
mod stats;

pub use config::{AgentVariant, ExperimentConfig};
pub use metrics::{epochs_to_reach, final_window_mean, mean_over_seeds, EpochMetrics};
pub use output::{emit_csv, emit_svg, read_csv, CSV_HEADER};
pub use runner::{
    run_experiment, run_seed, test_phase, warm_start, ExperimentOutput, RunTrace, SeedRun,
};
pub use stats::{welch_t_test, WelchTest};
