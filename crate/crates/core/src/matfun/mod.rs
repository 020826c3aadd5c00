//! Dense matrix utilities and the matrix modifiers of the locally exact
//! schemes.
//!
//! Two routes evaluate `phi` on a matrix argument:
//! * symmetric arguments (the separable modifier built from `V_xx`) go
//!   through an eigendecomposition, exact for any step below the pole;
//! * general arguments (the full phase-space modifier built from `F'`) go
//!   through the truncated power series, guarded by a spectral bound.

mod eigen;
mod matrix;
mod phi;

pub use eigen::{sym_eigen, EigenDecomposition};
pub use matrix::{canonical_symplectic, SquareMatrix, SYMMETRY_TOL};
pub use phi::{phi_tanc, series_coefficients, POLE, POLE_GUARD, SERIES_TERMS};

use crate::error::{Error, Result};

/// Largest spectral-radius estimate accepted by the series route.
pub const SERIES_SAFE_RADIUS: f64 = 1.5;

/// Relative size of the last kept term at which the series stops.
const SERIES_STOP: f64 = 1e-16;

/// `delta = h * phi((h/2)^2 V_xx)`, the separable locally exact modifier.
///
/// `vxx` must be symmetric. The result is symmetric and tends to `h I`.
pub fn delta_matrix(h: f64, vxx: &SquareMatrix) -> Result<SquareMatrix> {
    let quarter_h2 = 0.25 * h * h;
    if vxx.dim() == 1 {
        let d = h * phi_tanc(quarter_h2 * vxx.get(0, 0))?;
        return Ok(SquareMatrix::from_diagonal(&[d]));
    }
    let eig = sym_eigen(vxx)?;
    eig.try_map_spectrum(|lambda| Ok(h * phi_tanc(quarter_h2 * lambda)?))
}

/// `Lambda S^{-1} = h * phi(-(h/2)^2 F'^2) = h tanhc(h F'/2)` for a general
/// Jacobian `F'`. Multiply the result by `S` on the right to get `Lambda`.
pub fn lambda_half_product(h: f64, fprime: &SquareMatrix) -> Result<SquareMatrix> {
    let n = fprime.dim();
    let quarter_h2 = 0.25 * h * h;
    // series variable Z = -(h/2)^2 F'^2; phi(Z) = sum c_k Z^k
    let z = fprime.matmul(fprime).scaled(-quarter_h2);
    let estimate = spectral_bound(&z);
    if estimate > SERIES_SAFE_RADIUS {
        return Err(Error::SeriesDivergence {
            estimate,
            radius: SERIES_SAFE_RADIUS,
        });
    }
    let coeffs = series_coefficients();
    let mut acc = SquareMatrix::identity(n);
    let mut power = SquareMatrix::identity(n);
    let mut converged = false;
    for ck in coeffs.iter().skip(1) {
        power = power.matmul(&z);
        let term = power.scaled(*ck);
        let term_norm = term.norm_inf();
        acc = acc.add(&term);
        if term_norm <= SERIES_STOP * acc.norm_inf() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesDivergence {
            estimate,
            radius: SERIES_SAFE_RADIUS,
        });
    }
    Ok(acc.scaled(h))
}

/// Upper estimate of the spectral radius: `||Z^8||^(1/8)` by repeated
/// squaring. Never below the true radius.
fn spectral_bound(z: &SquareMatrix) -> f64 {
    let z2 = z.matmul(z);
    let z4 = z2.matmul(&z2);
    let z8 = z4.matmul(&z4);
    z8.norm_inf().powf(0.125)
}
