use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::orbit::{circular_orbit_state, exact_circular_solution, CircularOrbitSpec};
use crate::dgrad::DiscreteGradientSpec;
use crate::error::{Error, Result};
use crate::integrate::{
    integrate_trajectory, step, Scheme, SchemeConfig, SchemeForm, SolverSettings, StepCounters,
    Trajectory,
};
use crate::model::{HamiltonianSystem, PhaseState};
use crate::vecops::{norm2, sub};

/// Which part of the state enters the error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorNorm {
    /// Euclidean norm of the full `(x, p)` difference.
    #[default]
    Phase,
    Position,
}

impl ErrorNorm {
    pub fn name(self) -> &'static str {
        match self {
            ErrorNorm::Phase => "phase",
            ErrorNorm::Position => "position",
        }
    }

    pub fn distance(self, a: &PhaseState, b: &PhaseState) -> f64 {
        match self {
            ErrorNorm::Phase => norm2(&sub(&a.to_vec(), &b.to_vec())),
            ErrorNorm::Position => norm2(&sub(&a.x, &b.x)),
        }
    }
}

impl std::str::FromStr for ErrorNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phase" => Ok(ErrorNorm::Phase),
            "position" => Ok(ErrorNorm::Position),
            other => Err(Error::InvalidParameter(format!("unknown norm '{other}'"))),
        }
    }
}

/// Distance between the endpoint of `traj` and the exact orbit at `t`.
pub fn global_error(
    traj: &Trajectory,
    spec: &CircularOrbitSpec,
    t: f64,
    norm: ErrorNorm,
) -> Result<f64> {
    let actual = traj.final_time();
    if (actual - t).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::TimeMismatch {
            expected: t,
            actual,
        });
    }
    Ok(norm.distance(traj.final_state(), &exact_circular_solution(spec, t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `ln(error)`.
    pub residual: f64,
}

/// Least-squares line through `(ln h, ln error)`.
pub fn fit_order(points: &[(f64, f64)]) -> Result<OrderFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(h, e) in points {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::DegenerateFit(format!(
                "step size {h} is not positive"
            )));
        }
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::DegenerateFit(format!("error {e} is not positive")));
        }
    }
    let mut sorted: Vec<f64> = points.iter().map(|p| p.0).collect();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit("step sizes are not distinct".into()));
    }
    let span = sorted[sorted.len() - 1] / sorted[0];
    if span < 2.0 {
        return Err(Error::DegenerateFit(format!(
            "step sizes span only a factor {span}"
        )));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(OrderFit {
        slope,
        intercept,
        residual,
    })
}

/// Weights turning evaluation counts into a cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub gradient: f64,
    pub hessian: f64,
    pub matrix_function: f64,
}

impl CostWeights {
    /// Every evaluation (gradient, Hessian, matrix-function build) counts as one.
    pub fn unit() -> Self {
        Self {
            gradient: 1.0,
            hessian: 1.0,
            matrix_function: 1.0,
        }
    }

    /// Dense-linear-algebra model in dimension `m`: a Hessian costs `m`
    /// gradients, a matrix-function build `m^2`.
    pub fn dense(m: usize) -> Self {
        let m = m as f64;
        Self {
            gradient: 1.0,
            hessian: m,
            matrix_function: m * m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, w) in [
            ("gradient", self.gradient),
            ("hessian", self.hessian),
            ("matrix_function", self.matrix_function),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "cost weight {name} must be non-negative, got {w}"
                )));
            }
        }
        Ok(())
    }

    pub fn cost(&self, c: &StepCounters) -> f64 {
        self.gradient * c.gradient_evals as f64
            + self.hessian * c.hessian_evals as f64
            + self.matrix_function * c.matrix_function_builds as f64
    }
}

/// One unit per gradient and per Hessian evaluation, two per matrix-function
/// build (an eigendecomposition followed by the spectral map).
impl Default for CostWeights {
    fn default() -> Self {
        Self {
            gradient: 1.0,
            hessian: 1.0,
            matrix_function: 2.0,
        }
    }
}

/// `h * cost(counters) / cost(baseline)`, both runs covering the same interval.
pub fn cost_scaled_step(
    counters: &StepCounters,
    baseline: &StepCounters,
    h: f64,
    weights: &CostWeights,
) -> Result<f64> {
    let own = weights.cost(counters);
    let base = weights.cost(baseline);
    if !(own > 0.0 && base > 0.0) {
        return Err(Error::ZeroCost);
    }
    Ok(h * own / base)
}

/// One-step errors `|step(y, h) - reference(y, h)|` over a ladder of `h`.
pub fn local_errors(
    sys: &HamiltonianSystem,
    config: &SchemeConfig,
    y: &PhaseState,
    ladder: &[f64],
    reference: impl Fn(f64) -> Result<PhaseState>,
) -> Result<Vec<(f64, f64)>> {
    ladder
        .iter()
        .map(|&h| {
            let mut counters = StepCounters::default();
            let approx = step(sys, config, y, h, &mut counters)?;
            let exact = reference(h)?;
            Ok((h, ErrorNorm::Phase.distance(&approx, &exact)))
        })
        .collect()
}

/// Fits a local-order ladder, dropping the smallest step when its error
/// sits within `10 * solver_tol` (it then measures the solver, not the scheme).
pub fn fit_local_order(points: &[(f64, f64)], solver_tol: f64) -> Result<OrderFit> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    if pts.len() > 3 && pts.last().is_some_and(|p| p.1 <= 10.0 * solver_tol) {
        pts.pop();
    }
    fit_order(&pts)
}

/// Makes `t_end` a whole number of steps: `t_end / round(t_end / h)`.
pub fn snap_step(t_end: f64, h: f64) -> f64 {
    let n = (t_end / h).round().max(1.0);
    t_end / n
}

/// A global-error convergence study on a circular orbit.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub orbit: CircularOrbitSpec,
    pub dgrad: DiscreteGradientSpec,
    pub form: SchemeForm,
    pub solver: SolverSettings,
    pub t_end: f64,
    /// Requested step sizes; each is snapped with [`snap_step`].
    pub ladder: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub weights: CostWeights,
    pub norm: ErrorNorm,
}

/// Result of one `(scheme, h)` integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellMeasurement {
    pub error: f64,
    pub energy_drift: f64,
    pub counters: StepCounters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub scheme: Scheme,
    pub h: f64,
    pub result: Result<CellMeasurement>,
    /// Not part of any emitted output.
    pub elapsed: Duration,
}

/// Integrates `scheme` with step `h` over `[0, t_end]` and measures it.
pub fn run_cell(spec: &SweepSpec, scheme: Scheme, h: f64) -> Result<CellMeasurement> {
    let sys = HamiltonianSystem::new(spec.orbit.potential().clone());
    let config = SchemeConfig::new(scheme, h, spec.dgrad.clone())
        .with_solver(spec.solver)
        .with_form(spec.form);
    let (y0, _) = circular_orbit_state(&spec.orbit);
    let traj = integrate_trajectory(&sys, &config, &y0, spec.t_end)?;
    Ok(CellMeasurement {
        error: global_error(&traj, &spec.orbit, spec.t_end, spec.norm)?,
        energy_drift: traj.max_energy_drift(),
        counters: traj.counters,
    })
}

/// Schemes actually integrated: the configured ones plus the AVF baseline.
fn cell_schemes(spec: &SweepSpec) -> Vec<Scheme> {
    let mut schemes = spec.schemes.clone();
    if !schemes.contains(&Scheme::Avf) {
        schemes.push(Scheme::Avf);
    }
    schemes
}

/// Runs every `(scheme, h)` cell on the current rayon pool. Output order is
/// scheme-major in configured order (AVF appended if absent), then ladder order.
pub fn run_cells(spec: &SweepSpec) -> Vec<CellOutcome> {
    let cells: Vec<(Scheme, f64)> = cell_schemes(spec)
        .into_iter()
        .flat_map(|s| {
            spec.ladder
                .iter()
                .map(move |&h| (s, snap_step(spec.t_end, h)))
        })
        .collect();
    cells
        .into_par_iter()
        .map(|(scheme, h)| {
            let start = Instant::now();
            let result = run_cell(spec, scheme, h);
            CellOutcome {
                scheme,
                h,
                result,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub h: f64,
    pub h_scaled: f64,
    pub error: f64,
    pub energy_drift: f64,
    pub counters: StepCounters,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedCell {
    pub h: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    /// Successful cells, `h` descending.
    pub points: Vec<ConvergencePoint>,
    pub fit: Option<OrderFit>,
    /// Why no slope could be fitted, if so.
    pub fit_error: Option<String>,
    pub failed: Vec<FailedCell>,
}

impl ConvergenceReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

/// Folds cell outcomes into one report per configured scheme.
pub fn assemble_reports(spec: &SweepSpec, cells: &[CellOutcome]) -> Vec<ConvergenceReport> {
    let baseline = |h: f64| {
        cells
            .iter()
            .find(|c| c.scheme == Scheme::Avf && c.h == h)
            .and_then(|c| c.result.as_ref().ok())
            .map(|m| m.counters)
    };
    spec.schemes
        .iter()
        .map(|&scheme| {
            let mut points = Vec::new();
            let mut failed = Vec::new();
            for cell in cells.iter().filter(|c| c.scheme == scheme) {
                let scaled = cell.result.as_ref().map_err(Error::clone).and_then(|m| {
                    let base = baseline(cell.h).ok_or(Error::ZeroCost)?;
                    Ok((
                        m,
                        cost_scaled_step(&m.counters, &base, cell.h, &spec.weights)?,
                    ))
                });
                match scaled {
                    Ok((m, h_scaled)) => points.push(ConvergencePoint {
                        h: cell.h,
                        h_scaled,
                        error: m.error,
                        energy_drift: m.energy_drift,
                        counters: m.counters,
                        cost: spec.weights.cost(&m.counters),
                    }),
                    Err(e) => failed.push(FailedCell {
                        h: cell.h,
                        message: e.to_string(),
                    }),
                }
            }
            points.sort_by(|a, b| b.h.total_cmp(&a.h));
            failed.sort_by(|a, b| b.h.total_cmp(&a.h));
            let fit = fit_order(
                &points
                    .iter()
                    .map(|p| (p.h_scaled, p.error))
                    .collect::<Vec<_>>(),
            );
            ConvergenceReport {
                scheme,
                points,
                fit: fit.as_ref().ok().copied(),
                fit_error: fit.err().map(|e| e.to_string()),
                failed,
            }
        })
        .collect()
}

/// [`run_cells`] followed by [`assemble_reports`].
pub fn convergence_sweep(spec: &SweepSpec) -> Vec<ConvergenceReport> {
    assemble_reports(spec, &run_cells(spec))
}

/// Error of `report` at scaled step `h_scaled`, interpolated linearly in
/// `(ln h_scaled, ln error)` between neighbouring points.
pub fn interpolate_error(report: &ConvergenceReport, h_scaled: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = report
        .points
        .iter()
        .map(|p| (p.h_scaled.ln(), p.error.ln()))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x = h_scaled.ln();
    pts.windows(2)
        .find(|w| w[0].0 <= x && x <= w[1].0)
        .map(|w| {
            let t = (x - w[0].0) / (w[1].0 - w[0].0);
            (w[0].1 + t * (w[1].1 - w[0].1)).exp()
        })
}
