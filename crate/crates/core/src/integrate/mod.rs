//! One-step maps for AVF, AVF-LEX and AVF-SLEX, and the fixed-step driver.
//!
//! Every scheme is an implicit map `y1 = G(y1)` solved by
//! [`solve_fixed_point`] from an explicit Euler predictor. In separable form
//! the locally exact schemes replace `h` by the symmetric modifier
//! `delta = h phi((h/2)^2 V_xx(x_bar))`:
//!
//! ```text
//! x1 - x0 = delta (p0 + p1) / 2
//! p1 - p0 = -delta^T grad_bar V(x0, x1)
//! ```
//!
//! with `x_bar = x0` (LEX) or `x_bar = (x0 + x1) / 2` (SLEX). The general
//! form uses the phase-space modifier `Lambda S^{-1} = h tanhc(h F'/2)`
//! instead and does not rely on separability.

mod solver;
mod trajectory;

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use solver::{solve_fixed_point, FixedPointSolution, SolverSettings};
pub use trajectory::{integrate_trajectory, step_count, Trajectory};

use crate::dgrad::{avf_gradient, DiscreteGradientSpec};
use crate::error::{Error, Result};
use crate::matfun::{delta_matrix, lambda_half_product, SquareMatrix};
use crate::model::{HamiltonianSystem, PhaseState};
use crate::vecops::{midpoint, scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Avf,
    Lex,
    Slex,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Avf, Scheme::Lex, Scheme::Slex];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Avf => "avf",
            Scheme::Lex => "lex",
            Scheme::Slex => "slex",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "avf" => Ok(Scheme::Avf),
            "lex" | "avf-lex" => Ok(Scheme::Lex),
            "slex" | "avf-slex" => Ok(Scheme::Slex),
            other => Err(Error::InvalidParameter(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Which modifier the locally exact schemes use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeForm {
    /// `m x m` modifier `delta` built from `V_xx`.
    #[default]
    Separable,
    /// `2m x 2m` modifier `Lambda` built from `F'`.
    General,
}

/// Evaluation counts accumulated over steps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounters {
    /// Potential-gradient evaluations, including those inside discrete
    /// gradients (a closed-form discrete gradient counts once).
    pub gradient_evals: u64,
    pub hessian_evals: u64,
    pub matrix_function_builds: u64,
    pub solver_iterations: u64,
}

impl AddAssign for StepCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.gradient_evals += rhs.gradient_evals;
        self.hessian_evals += rhs.hessian_evals;
        self.matrix_function_builds += rhs.matrix_function_builds;
        self.solver_iterations += rhs.solver_iterations;
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub form: SchemeForm,
    pub h: f64,
    pub solver: SolverSettings,
    pub dgrad: DiscreteGradientSpec,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, h: f64, dgrad: DiscreteGradientSpec) -> Self {
        Self {
            scheme,
            form: SchemeForm::Separable,
            h,
            solver: SolverSettings::default(),
            dgrad,
        }
    }

    pub fn with_solver(mut self, solver: SolverSettings) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_form(mut self, form: SchemeForm) -> Self {
        self.form = form;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step size must be positive, got {}",
                self.h
            )));
        }
        self.solver.validate()
    }
}

/// Advances `y` by one step of the configured scheme with step `h` (which
/// may be negative, for time-reversal checks).
pub fn step(
    sys: &HamiltonianSystem,
    config: &SchemeConfig,
    y: &PhaseState,
    h: f64,
    counters: &mut StepCounters,
) -> Result<PhaseState> {
    match config.scheme {
        Scheme::Avf => avf_step(sys, config, y, h, counters),
        Scheme::Lex => lex_step(sys, config, y, h, counters),
        Scheme::Slex => slex_step(sys, config, y, h, counters),
    }
}

/// The AVF step: `x1 - x0 = h (p0 + p1)/2`, `p1 - p0 = -h grad_bar V(x0, x1)`.
pub fn avf_step(
    sys: &HamiltonianSystem,
    config: &SchemeConfig,
    y: &PhaseState,
    h: f64,
    counters: &mut StepCounters,
) -> Result<PhaseState> {
    let m = check_dims(sys, config, y)?;
    if h == 0.0 {
        return Ok(y.clone());
    }
    let cost = config.dgrad.evaluation_cost();
    let guess = predictor(sys, y, h, counters)?;
    let mut local = StepCounters::default();
    let sol = solve_fixed_point(
        |z| {
            let g = avf_gradient(&config.dgrad, &y.x, &z[..m])?;
            local.gradient_evals += cost;
            Ok(separable_update(y, &g, |v| scale(h, v), |v| scale(h, v)))
        },
        &guess,
        &config.solver,
    )?;
    local.solver_iterations = sol.iterations as u64;
    *counters += local;
    Ok(PhaseState::from_slice(&sol.state))
}

/// Locally exact step anchored at `y`: the modifier is built once.
pub fn lex_step(
    sys: &HamiltonianSystem,
    config: &SchemeConfig,
    y: &PhaseState,
    h: f64,
    counters: &mut StepCounters,
) -> Result<PhaseState> {
    let m = check_dims(sys, config, y)?;
    if h == 0.0 {
        return Ok(y.clone());
    }
    let cost = config.dgrad.evaluation_cost();
    let modifier = build_modifier(sys, config.form, y, h)?;
    counters.hessian_evals += 1;
    counters.matrix_function_builds += 1;
    let guess = predictor(sys, y, h, counters)?;
    let mut local = StepCounters::default();
    let sol = solve_fixed_point(
        |z| {
            let (x1, p1) = z.split_at(m);
            let g = avf_gradient(&config.dgrad, &y.x, x1)?;
            local.gradient_evals += cost;
            Ok(modifier.apply(y, p1, &g))
        },
        &guess,
        &config.solver,
    )?;
    local.solver_iterations = sol.iterations as u64;
    *counters += local;
    Ok(PhaseState::from_slice(&sol.state))
}

/// Locally exact step anchored at the midpoint: the modifier is rebuilt
/// from `(y0 + y1)/2` at every solver iteration.
pub fn slex_step(
    sys: &HamiltonianSystem,
    config: &SchemeConfig,
    y: &PhaseState,
    h: f64,
    counters: &mut StepCounters,
) -> Result<PhaseState> {
    let m = check_dims(sys, config, y)?;
    if h == 0.0 {
        return Ok(y.clone());
    }
    let cost = config.dgrad.evaluation_cost();
    let guess = predictor(sys, y, h, counters)?;
    let mut local = StepCounters::default();
    let sol = solve_fixed_point(
        |z| {
            let (x1, p1) = z.split_at(m);
            let anchor = PhaseState {
                x: midpoint(&y.x, x1),
                p: midpoint(&y.p, p1),
            };
            let modifier = build_modifier(sys, config.form, &anchor, h)?;
            local.hessian_evals += 1;
            local.matrix_function_builds += 1;
            let g = avf_gradient(&config.dgrad, &y.x, x1)?;
            local.gradient_evals += cost;
            Ok(modifier.apply(y, p1, &g))
        },
        &guess,
        &config.solver,
    )?;
    local.solver_iterations = sol.iterations as u64;
    *counters += local;
    Ok(PhaseState::from_slice(&sol.state))
}

fn check_dims(sys: &HamiltonianSystem, config: &SchemeConfig, y: &PhaseState) -> Result<usize> {
    let m = sys.dim();
    if y.x.len() != m || y.p.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: y.x.len(),
        });
    }
    if config.dgrad.potential().dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: config.dgrad.potential().dim(),
        });
    }
    Ok(m)
}

/// Explicit Euler momentum `p0 - h V_x(x0)` with the position advanced by
/// the trapezoid `x0 + h (p0 + p1)/2`, stacked. One gradient evaluation;
/// the position guess is off by `O(h^3)` instead of `O(h^2)`.
fn predictor(
    sys: &HamiltonianSystem,
    y: &PhaseState,
    h: f64,
    counters: &mut StepCounters,
) -> Result<Vec<f64>> {
    let f = sys.vector_field(y)?;
    counters.gradient_evals += 1;
    let p1: Vec<f64> = y.p.iter().zip(&f.p).map(|(a, b)| a + h * b).collect();
    let mut guess: Vec<f64> =
        y.x.iter()
            .zip(midpoint(&y.p, &p1))
            .map(|(a, b)| a + h * b)
            .collect();
    guess.extend(p1);
    Ok(guess)
}

/// `p1 = p0 - B g`, then `x1 = x0 + A (p0 + p1)/2` with that fresh `p1`,
/// stacked. Using the new momentum (rather than the iterate's) leaves the
/// fixed point unchanged and makes the iteration contract like `h^2 V_xx`.
fn separable_update(
    y: &PhaseState,
    g: &[f64],
    apply_x: impl Fn(&[f64]) -> Vec<f64>,
    apply_p: impl Fn(&[f64]) -> Vec<f64>,
) -> Vec<f64> {
    let dp = apply_p(g);
    let p1: Vec<f64> = y.p.iter().zip(&dp).map(|(a, b)| a - b).collect();
    let dx = apply_x(&midpoint(&y.p, &p1));
    let mut out: Vec<f64> = y.x.iter().zip(&dx).map(|(a, b)| a + b).collect();
    out.extend(p1);
    out
}

enum Modifier {
    /// `delta` (m x m, symmetric)
    Separable(SquareMatrix),
    /// `Lambda S^{-1}` (2m x 2m)
    General(SquareMatrix),
}

impl Modifier {
    fn apply(&self, y: &PhaseState, p1: &[f64], g: &[f64]) -> Vec<f64> {
        match self {
            Modifier::Separable(delta) => {
                separable_update(y, g, |v| delta.mul_vec(v), |v| delta.tr_mul_vec(v))
            }
            Modifier::General(lambda_s_inv) => {
                // y1 = y0 + (Lambda S^-1) S grad_bar H, with S grad_bar H = ((p0+p1)/2, -g)
                let mut w = midpoint(&y.p, p1);
                w.extend(g.iter().map(|v| -v));
                let dy = lambda_s_inv.mul_vec(&w);
                y.x.iter()
                    .chain(&y.p)
                    .zip(&dy)
                    .map(|(a, b)| a + b)
                    .collect()
            }
        }
    }
}

fn build_modifier(
    sys: &HamiltonianSystem,
    form: SchemeForm,
    anchor: &PhaseState,
    h: f64,
) -> Result<Modifier> {
    match form {
        SchemeForm::Separable => {
            let vxx = sys.potential().hessian(&anchor.x)?;
            Ok(Modifier::Separable(delta_matrix(h, &vxx)?))
        }
        SchemeForm::General => {
            let fprime = sys.jacobian(anchor)?;
            Ok(Modifier::General(lambda_half_product(h, &fprime)?))
        }
    }
}

#[cfg(test)]
mod tests;
