use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, GradientChoice, Ladder, PotentialChoice, Scenario};
use super::run::{ExperimentOutcome, RunRecord};
use crate::analysis::{ConvergenceReport, CostWeights, ErrorNorm};
use crate::error::{Error, Result};
use crate::integrate::{SchemeForm, SolverSettings};

pub const CSV_HEADER: &str = "scheme,h,h_scaled,error,energy_drift,grad_evals,hess_evals,slope";
pub const CSV_FILE: &str = "results.csv";
pub const JSON_FILE: &str = "summary.json";
pub const GNUPLOT_FILE: &str = "plot.gp";

/// 17 significant digits: enough for every `f64` to parse back bit-exactly.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// One row per record in the given order; failed cells keep `scheme` and
/// `h` and leave the measured columns empty.
pub fn render_csv(records: &[RunRecord], reports: &[ConvergenceReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let slope = reports
            .iter()
            .find(|rep| rep.scheme == r.scheme)
            .and_then(|rep| rep.slope());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scheme,
            format_number(r.h),
            opt_number(r.h_scaled),
            opt_number(r.error),
            opt_number(r.energy_drift),
            r.counters
                .map(|c| c.gradient_evals.to_string())
                .unwrap_or_default(),
            r.counters
                .map(|c| c.hessian_evals.to_string())
                .unwrap_or_default(),
            opt_number(slope),
        );
    }
    out
}

#[derive(Serialize)]
struct Summary<'a> {
    scenario: Scenario,
    potential: Option<PotentialChoice>,
    dim: usize,
    radius: Option<f64>,
    period: f64,
    t_end: f64,
    ladder: &'a Ladder,
    step_sizes: &'a [f64],
    form: SchemeForm,
    solver: SolverSettings,
    dgrad: GradientChoice,
    cost_weights: CostWeights,
    norm: ErrorNorm,
    reports: &'a [ConvergenceReport],
}

/// Pretty-printed JSON mirroring the convergence reports, plus the settings
/// that produced them.
pub fn render_summary(config: &ExperimentConfig, outcome: &ExperimentOutcome) -> String {
    let summary = Summary {
        scenario: config.scenario,
        potential: config.potential,
        dim: config.dim,
        radius: config.radius,
        period: outcome.period,
        t_end: config.t_end,
        ladder: &config.ladder,
        step_sizes: &outcome.sweep.ladder,
        form: config.form,
        solver: config.solver,
        dgrad: config.gradient,
        cost_weights: config.weights,
        norm: config.norm,
        reports: &outcome.reports,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary is plain data");
    text.push('\n');
    text
}

/// Log-log error against scaled step, one series per scheme, read from the CSV.
pub fn render_gnuplot(config: &ExperimentConfig, csv_name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set logscale xy");
    let _ = writeln!(out, "set key left top");
    let _ = writeln!(out, "set xlabel 'scaled step'");
    let _ = writeln!(out, "set ylabel 'error at t = {}'", config.t_end);
    let _ = writeln!(out, "set title '{}'", config.scenario);
    let series: Vec<String> = config
        .schemes
        .iter()
        .map(|s| {
            format!(
                "'{csv_name}' skip 1 using (strcol(1) eq '{s}' ? $3 : 1/0):4 with linespoints title '{}'",
                s.name().to_uppercase()
            )
        })
        .collect();
    let _ = writeln!(out, "plot {}", series.join(", \\\n     "));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub gnuplot: PathBuf,
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes `results.csv`, `summary.json` and `plot.gp` into `dir`, creating it.
pub fn emit_outputs(
    config: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    dir: &Path,
) -> Result<OutputPaths> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let paths = OutputPaths {
        csv: dir.join(CSV_FILE),
        json: dir.join(JSON_FILE),
        gnuplot: dir.join(GNUPLOT_FILE),
    };
    write(&paths.csv, &render_csv(&outcome.records, &outcome.reports))?;
    write(&paths.json, &render_summary(config, outcome))?;
    write(&paths.gnuplot, &render_gnuplot(config, CSV_FILE))?;
    Ok(paths)
}
