//! Circular-orbit convergence experiments: configuration documents,
//! concurrent execution of `(scheme, h)` cells and reproducible output files.

mod config;
mod output;
mod run;

pub use config::{
    parse_config, ExperimentConfig, GradientChoice, Ladder, PotentialChoice, Scenario, CONFIG_KEYS,
};
pub use output::{
    emit_outputs, format_number, render_csv, render_gnuplot, render_summary, OutputPaths, CSV_FILE,
    CSV_HEADER, GNUPLOT_FILE, JSON_FILE,
};
pub use run::{run_experiment, ExperimentOutcome, RunRecord};
