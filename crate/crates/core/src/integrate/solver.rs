//! Fixed-point iteration with a finite-difference Newton fallback.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecops::norm_inf;

/// Residuals this close to the rounding level are accepted once they stop
/// shrinking.
const ROUNDOFF_FLOOR: f64 = 32.0 * f64::EPSILON;
/// An iteration that does not cut the residual by this factor is stagnant.
const STAGNATION_RATIO: f64 = 0.9;
/// Contraction estimates above this are not used to predict the residual.
const MAX_TRUSTED_CONTRACTION: f64 = 0.5;
/// An iteration that grows the residual by this factor is divergent.
const DIVERGENCE_RATIO: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation of the fixed-point update, in (0, 1].
    pub damping: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iter: 100,
            damping: 1.0,
        }
    }
}

impl SolverSettings {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1e-16..=1e-6).contains(&self.tol) {
            return Err(Error::InvalidParameter(format!(
                "solver tolerance {} outside [1e-16, 1e-6]",
                self.tol
            )));
        }
        if !(1..=500).contains(&self.max_iter) {
            return Err(Error::InvalidParameter(format!(
                "solver max_iter {} outside [1, 500]",
                self.max_iter
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping {} outside (0, 1]",
                self.damping
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSolution {
    pub state: Vec<f64>,
    /// Fixed-point plus Newton iterations.
    pub iterations: usize,
    pub residual: f64,
    pub used_newton: bool,
}

/// Solves `y = update_map(y)` starting from `guess`.
///
/// Converged when `|y - update_map(y)|_inf <= tol (1 + |y|_inf)` holds for
/// the returned iterate, predicted from the contraction rate observed over
/// the last two iterations when it is fast enough to trust. Plain
/// (optionally damped) iteration runs first; if it diverges or stalls for
/// `max_iter / 2` iterations, Newton's method on `y - update_map(y)` with a
/// forward-difference Jacobian takes over from the best iterate seen.
pub fn solve_fixed_point<F>(
    mut update_map: F,
    guess: &[f64],
    settings: &SolverSettings,
) -> Result<FixedPointSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let tol = settings.tol;
    let mut y = guess.to_vec();
    let mut best = (y.clone(), f64::INFINITY);
    let mut prev = f64::INFINITY;
    let mut stagnant = 0;
    let stall_limit = (settings.max_iter / 2).max(1);
    let mut iterations = 0;

    while iterations < settings.max_iter {
        let g = update_map(&y)?;
        iterations += 1;
        let res = residual(&y, &g);
        let scale = 1.0 + norm_inf(&y);
        // The returned G(y) has residual about q * res, q the observed contraction.
        let q = res / prev;
        let predicted = if prev.is_finite() && q < MAX_TRUSTED_CONTRACTION {
            q * res
        } else {
            res
        };
        if predicted <= tol * scale || (res <= ROUNDOFF_FLOOR * scale && res >= 0.5 * prev) {
            return Ok(FixedPointSolution {
                state: g,
                iterations,
                residual: predicted,
                used_newton: false,
            });
        }
        if res < best.1 {
            best = (y.clone(), res);
        }
        if !res.is_finite() || res > DIVERGENCE_RATIO * prev {
            break;
        }
        if res > STAGNATION_RATIO * prev {
            stagnant += 1;
            if stagnant >= stall_limit {
                break;
            }
        }
        prev = res;
        if settings.damping == 1.0 {
            y = g;
        } else {
            for (yi, gi) in y.iter_mut().zip(&g) {
                *yi += settings.damping * (gi - *yi);
            }
        }
    }

    newton(update_map, best.0, best.1, iterations, settings)
}

fn residual(y: &[f64], g: &[f64]) -> f64 {
    y.iter().zip(g).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

fn newton<F>(
    mut update_map: F,
    mut y: Vec<f64>,
    mut last: f64,
    mut iterations: usize,
    settings: &SolverSettings,
) -> Result<FixedPointSolution>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = y.len();
    let mut prev = f64::INFINITY;
    while iterations < settings.max_iter {
        iterations += 1;
        let g = update_map(&y)?;
        let r: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a - b).collect();
        let res = norm_inf(&r);
        last = res;
        let scale = 1.0 + norm_inf(&y);
        if res <= settings.tol * scale || (res <= ROUNDOFF_FLOOR * scale && res >= 0.5 * prev) {
            return Ok(FixedPointSolution {
                state: y,
                iterations,
                residual: res,
                used_newton: true,
            });
        }
        prev = res;
        // J = I - dG/dy, column by column
        let mut jac = vec![0.0; n * n];
        let mut probe = y.clone();
        for j in 0..n {
            let step = f64::EPSILON.sqrt() * y[j].abs().max(1.0);
            probe[j] = y[j] + step;
            let gj = update_map(&probe)?;
            probe[j] = y[j];
            for i in 0..n {
                let d = (gj[i] - g[i]) / step;
                jac[i * n + j] = if i == j { 1.0 - d } else { -d };
            }
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = solve_dense(jac, rhs, n).ok_or(Error::NoConvergence {
            what: "Newton solver (singular Jacobian)",
            iterations,
            last_residual: res,
        })?;
        for (yi, d) in y.iter_mut().zip(&delta) {
            *yi += d;
        }
    }
    Err(Error::NoConvergence {
        what: "implicit step solver",
        iterations,
        last_residual: last,
    })
}

/// Gaussian elimination with partial pivoting on a row-major `n x n` system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot =
            (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col] == 0.0 || !a[pivot * n + col].is_finite() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let d = a[col * n + col];
        for row in (col + 1)..n {
            let f = a[row * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= f * a[col * n + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_map() {
        let c = vec![3.0, -1.0];
        let sol = solve_fixed_point(|_| Ok(c.clone()), &c, &SolverSettings::default()).unwrap();
        assert_eq!(sol.state, c);
        assert_eq!(sol.iterations, 1);
        // from elsewhere: one update lands on c, the next confirms it
        let sol =
            solve_fixed_point(|_| Ok(c.clone()), &[0.0, 0.0], &SolverSettings::default()).unwrap();
        assert_eq!(sol.state, c);
        assert_eq!(sol.iterations, 2);
    }

    #[test]
    fn linear_contraction() {
        let settings = SolverSettings::with_tol(1e-13);
        let sol = solve_fixed_point(|y| Ok(vec![0.5 * y[0] + 1.0]), &[0.0], &settings).unwrap();
        assert!((sol.state[0] - 2.0).abs() <= 1e-12);
        assert!(!sol.used_newton);
    }

    #[test]
    fn damping_slows_but_converges() {
        let settings = SolverSettings {
            tol: 1e-12,
            max_iter: 200,
            damping: 0.5,
        };
        let sol = solve_fixed_point(|y| Ok(vec![0.5 * y[0] + 1.0]), &[0.0], &settings).unwrap();
        assert!((sol.state[0] - 2.0).abs() <= 1e-11);
    }

    #[test]
    fn newton_rescues_expanding_map() {
        // y = 3y - 4 has fixed point 2 but repels plain iteration
        let sol = solve_fixed_point(
            |y| Ok(vec![3.0 * y[0] - 4.0, -2.0 * y[1] + 3.0]),
            &[0.0, 0.0],
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(sol.used_newton);
        assert!((sol.state[0] - 2.0).abs() < 1e-13);
        assert!((sol.state[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn reports_no_convergence() {
        // no real fixed point: y = y^2 + 1
        let settings = SolverSettings {
            tol: 1e-12,
            max_iter: 20,
            damping: 1.0,
        };
        let err =
            solve_fixed_point(|y| Ok(vec![y[0] * y[0] + 1.0]), &[0.0], &settings).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }

    #[test]
    fn map_errors_propagate() {
        let err = solve_fixed_point(|_| Err(Error::ZeroCost), &[0.0], &SolverSettings::default())
            .unwrap_err();
        assert_eq!(err, Error::ZeroCost);
    }

    #[test]
    fn settings_validation() {
        assert!(SolverSettings::default().validate().is_ok());
        assert!(SolverSettings::with_tol(1e-17).validate().is_err());
        assert!(SolverSettings::with_tol(1e-5).validate().is_err());
        let mut s = SolverSettings {
            max_iter: 0,
            ..SolverSettings::default()
        };
        assert!(s.validate().is_err());
        s.max_iter = 501;
        assert!(s.validate().is_err());
    }

    #[test]
    fn dense_solve() {
        let x = solve_dense(vec![0.0, 2.0, 1.0, 1.0], vec![4.0, 3.0], 2).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
        assert!(solve_dense(vec![1.0, 2.0, 2.0, 4.0], vec![1.0, 1.0], 2).is_none());
    }
}
