use std::time::Duration;

use rayon::ThreadPoolBuilder;

use super::config::ExperimentConfig;
use crate::analysis::{assemble_reports, run_cells, ConvergenceReport, SweepSpec};
use crate::error::{Error, Result};
use crate::integrate::{Scheme, StepCounters};

/// One `(scheme, h)` cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scheme: Scheme,
    pub h: f64,
    pub h_scaled: Option<f64>,
    pub error: Option<f64>,
    pub energy_drift: Option<f64>,
    pub counters: Option<StepCounters>,
    /// Reported on the terminal only; emitted files stay reproducible.
    pub wall_time: Duration,
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub sweep: SweepSpec,
    pub period: f64,
    pub reports: Vec<ConvergenceReport>,
    /// Scheme order as configured, `h` descending.
    pub records: Vec<RunRecord>,
}

impl ExperimentOutcome {
    pub fn failed_cells(&self) -> usize {
        self.records.iter().filter(|r| r.failure.is_some()).count()
    }

    /// Schemes whose slope could not be fitted.
    pub fn failed_fits(&self) -> Vec<(Scheme, String)> {
        self.reports
            .iter()
            .filter_map(|r| r.fit_error.clone().map(|e| (r.scheme, e)))
            .collect()
    }

    /// 0 when every cell ran and every slope was fitted, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failed_cells() == 0 && self.failed_fits().is_empty() {
            0
        } else {
            2
        }
    }
}

/// Runs every `(scheme, h)` cell on `config.workers` threads. A failing cell
/// is recorded and the rest still run.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let sweep = config.sweep_spec()?;
    let pool = ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let cells = pool.install(|| run_cells(&sweep));
    let reports = assemble_reports(&sweep, &cells);

    let mut records = Vec::new();
    for report in &reports {
        let mut own: Vec<_> = cells.iter().filter(|c| c.scheme == report.scheme).collect();
        own.sort_by(|a, b| b.h.total_cmp(&a.h));
        for cell in own {
            let point = report.points.iter().find(|p| p.h == cell.h);
            let failure = report
                .failed
                .iter()
                .find(|f| f.h == cell.h)
                .map(|f| f.message.clone());
            records.push(RunRecord {
                scheme: cell.scheme,
                h: cell.h,
                h_scaled: point.map(|p| p.h_scaled),
                error: point.map(|p| p.error),
                energy_drift: point.map(|p| p.energy_drift),
                counters: point.map(|p| p.counters),
                wall_time: cell.elapsed,
                failure,
            });
        }
    }
    Ok(ExperimentOutcome {
        period: sweep.orbit.period(),
        sweep,
        reports,
        records,
    })
}
