//! Experiment driver: runs searches, labels the failures and writes CSV
//! reports.

mod experiment;
mod export;
mod failure;

pub use experiment::{
    histogram_bin, run_experiment, run_experiment_config, run_trial, ExperimentConfig, ExperimentReport,
    FailureRecord, Trial,
};
pub use export::{
    classification_file_name, export, trajectory_file_name, Manifest, HISTOGRAM_FILE, SUMMARY_FILE, TRIALS_FILE,
};
pub use failure::{classify_failure, FailureType};
