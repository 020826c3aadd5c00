//! Taylor coefficients of the exact flow of `x' = p, p' = -V_x(x)` and a
//! high-accuracy reference integrator to check them (and the schemes)
//! against.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{HamiltonianSystem, PhaseState};

/// `x(t+h) = x + sum_k a_k h^k`, `p(t+h) = p + sum_k b_k h^k`, `k = 1..=4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoefficients {
    pub a: [Vec<f64>; 4],
    pub b: [Vec<f64>; 4],
}

impl TaylorCoefficients {
    /// The degree-4 Taylor polynomial at step `h`.
    pub fn evaluate(&self, y: &PhaseState, h: f64) -> PhaseState {
        let poly = |base: &[f64], coeffs: &[Vec<f64>; 4]| -> Vec<f64> {
            (0..base.len())
                .map(|i| {
                    let horner = coeffs.iter().rev().fold(0.0, |acc, c| (acc + c[i]) * h);
                    base[i] + horner
                })
                .collect()
        };
        PhaseState {
            x: poly(&y.x, &self.a),
            p: poly(&y.p, &self.b),
        }
    }
}

/// Exact-flow coefficients through order 4 (with `g = V_x`, `H = V_xx`):
///
/// ```text
/// a1 = p                       b1 = -g
/// a2 = -g/2                    b2 = -H p/2
/// a3 = -H p/6                  b3 = H g/6 - V'''[p,p]/6
/// a4 = H g/24 - V'''[p,p]/24   b4 = V'''[g,p]/8 + H H p/24 - V''''[p,p,p]/24
/// ```
pub fn taylor_exact_coeffs(sys: &HamiltonianSystem, y: &PhaseState) -> Result<TaylorCoefficients> {
    let pot = sys.potential();
    let p = &y.p;
    let g = pot.gradient(&y.x)?;
    let hess = pot.hessian(&y.x)?;
    let hp = hess.mul_vec(p);
    let hg = hess.mul_vec(&g);
    let hhp = hess.mul_vec(&hp);
    let t_pp = pot.third_contract(&y.x, p, p)?;
    let t_gp = pot.third_contract(&y.x, &g, p)?;
    let q_ppp = pot.fourth_contract(&y.x, p, p, p)?;

    let lin = |terms: &[(f64, &Vec<f64>)]| -> Vec<f64> {
        (0..p.len())
            .map(|i| terms.iter().map(|(c, v)| c * v[i]).sum())
            .collect()
    };
    Ok(TaylorCoefficients {
        a: [
            p.clone(),
            lin(&[(-0.5, &g)]),
            lin(&[(-1.0 / 6.0, &hp)]),
            lin(&[(1.0 / 24.0, &hg), (-1.0 / 24.0, &t_pp)]),
        ],
        b: [
            lin(&[(-1.0, &g)]),
            lin(&[(-0.5, &hp)]),
            lin(&[(1.0 / 6.0, &hg), (-1.0 / 6.0, &t_pp)]),
            lin(&[
                (1.0 / 8.0, &t_gp),
                (1.0 / 24.0, &hhp),
                (-1.0 / 24.0, &q_ppp),
            ]),
        ],
    })
}

/// Largest substep of the reference integrator.
pub const REFERENCE_SUBSTEP: f64 = 2e-4;

/// Advances `y` by `h` with classical RK4 on substeps of at most
/// [`REFERENCE_SUBSTEP`], accumulating the state with compensated
/// summation. Independent of every scheme under test.
pub fn reference_flow(sys: &HamiltonianSystem, y: &PhaseState, h: f64) -> Result<PhaseState> {
    let n = ((h.abs() / REFERENCE_SUBSTEP).ceil() as usize).max(1);
    let dt = h / n as f64;
    let m = y.dim();
    let mut state = y.to_vec();
    let mut carry = vec![0.0; 2 * m];
    let field = |s: &[f64]| -> Result<Vec<f64>> {
        Ok(sys.vector_field(&PhaseState::from_slice(s))?.to_vec())
    };
    let shifted = |s: &[f64], k: &[f64], c: f64| -> Vec<f64> {
        s.iter().zip(k).map(|(a, b)| a + c * b).collect()
    };
    for _ in 0..n {
        let k1 = field(&state)?;
        let k2 = field(&shifted(&state, &k1, 0.5 * dt))?;
        let k3 = field(&shifted(&state, &k2, 0.5 * dt))?;
        let k4 = field(&shifted(&state, &k3, dt))?;
        for i in 0..2 * m {
            let inc = dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) - carry[i];
            let next = state[i] + inc;
            carry[i] = (next - state[i]) - inc;
            state[i] = next;
        }
    }
    Ok(PhaseState::from_slice(&state))
}
