//! The even analytic extension of `tan(x)/x`.
//!
//! `phi(z) = tan(sqrt z)/sqrt z` for `z > 0`, `tanh(sqrt -z)/sqrt -z` for
//! `z < 0` and `1` at the origin. It covers `tanc` and `tanhc` with one
//! function of the squared argument, which is what lets matrix arguments
//! such as `(h/2)^2 V_xx` be fed in without taking square roots.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Maximum number of series terms kept.
pub const SERIES_TERMS: usize = 40;

/// The first pole of `phi`, at `(pi/2)^2`.
pub const POLE: f64 = FRAC_PI_2 * FRAC_PI_2;

/// Arguments within this relative distance of the pole are rejected.
pub const POLE_GUARD: f64 = 1e-8;

const SMALL_ARGUMENT: f64 = 1e-8;

/// Evaluates `phi(z)`.
pub fn phi_tanc(z: f64) -> Result<f64> {
    if z.is_nan() {
        return Err(Error::InvalidParameter("phi_tanc argument is NaN".into()));
    }
    if z >= POLE * (1.0 - POLE_GUARD) {
        return Err(Error::PoleProximity { z });
    }
    if z.abs() < SMALL_ARGUMENT {
        return Ok(1.0 + z * (1.0 / 3.0 + z * (2.0 / 15.0)));
    }
    if z > 0.0 {
        let x = z.sqrt();
        Ok(x.tan() / x)
    } else {
        let x = (-z).sqrt();
        Ok(x.tanh() / x)
    }
}

/// Taylor coefficients `c_k` of `phi(z) = sum c_k z^k`, i.e. of `tan(x)/x`
/// in powers of `x^2`. Obtained from `tan' = 1 + tan^2`.
pub fn series_coefficients() -> &'static [f64; SERIES_TERMS] {
    static COEFFS: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; SERIES_TERMS];
        c[0] = 1.0;
        for k in 1..SERIES_TERMS {
            let conv: f64 = (0..k).map(|i| c[i] * c[k - 1 - i]).sum();
            c[k] = conv / (2 * k + 1) as f64;
        }
        c
    })
}
