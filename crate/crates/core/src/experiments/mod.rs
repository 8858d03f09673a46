//! Declarative experiment configs, sweep execution and result summaries.

pub mod config;
pub mod run;
pub mod summary;

pub use config::{Experiment, ExperimentConfig};
pub use run::{read_rows, run_experiment, run_experiment_file, ResultRow, RunOptions, RunReport};
pub use summary::{summarize, summarize_files, Summary};
