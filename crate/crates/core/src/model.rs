//! Separable Hamiltonian systems `H = |p|^2 / 2 + V(x)` and their potentials.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfun::SquareMatrix;
use crate::vecops::{dot, norm2};

/// Radius below which singular radial potentials refuse to evaluate.
pub const SINGULAR_RADIUS: f64 = 1e-12;

const FD_GRADIENT_STEP: f64 = 1e-6;
const FD_HESSIAN_STEP: f64 = 1e-4;

/// Phase-space point `(x, p)` with unit mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidParameter(
                "phase state needs dimension >= 1".into(),
            ));
        }
        if x.len() != p.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: p.len(),
            });
        }
        if !x.iter().chain(&p).all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "phase state has non-finite entries".into(),
            ));
        }
        Ok(Self { x, p })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Stacked `(x, p)` vector of length `2m`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.p);
        v
    }

    /// Inverse of [`to_vec`](Self::to_vec); `y.len()` must be even.
    pub fn from_slice(y: &[f64]) -> Self {
        let m = y.len() / 2;
        Self {
            x: y[..m].to_vec(),
            p: y[m..].to_vec(),
        }
    }
}

/// A term `coeff * r^exponent` of a radial potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialTerm {
    pub coeff: f64,
    pub exponent: f64,
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// User-supplied potential known only through its values.
#[derive(Clone)]
pub struct GeneralPotential {
    name: String,
    value: ValueFn,
}

impl GeneralPotential {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            value: Arc::new(value),
        }
    }
}

impl fmt::Debug for GeneralPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralPotential")
            .field("name", &self.name)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum PotentialKind {
    /// `V = -kappa / r`
    Kepler { kappa: f64 },
    /// `V = alpha r^2 - beta r^4`
    Anharmonic { alpha: f64, beta: f64 },
    /// `V = coeff * r^exponent`
    RadialPower { coeff: f64, exponent: f64 },
    /// `V = x^T K x / 2`
    Quadratic { stiffness: SquareMatrix },
    /// Derivatives by finite differences.
    General(GeneralPotential),
}

/// A potential together with the configuration-space dimension it lives in.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    kind: PotentialKind,
    dim: usize,
}

impl PotentialModel {
    pub fn kepler(kappa: f64, dim: usize) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Kepler coupling must be positive, got {kappa}"
            )));
        }
        Self::with_kind(PotentialKind::Kepler { kappa }, dim)
    }

    pub fn anharmonic(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(
                "anharmonic coefficients must be finite".into(),
            ));
        }
        Self::with_kind(PotentialKind::Anharmonic { alpha, beta }, dim)
    }

    /// `V = r^2 / 2`.
    pub fn harmonic(dim: usize) -> Result<Self> {
        Self::anharmonic(0.5, 0.0, dim)
    }

    pub fn radial_power(coeff: f64, exponent: f64, dim: usize) -> Result<Self> {
        if !(coeff.is_finite() && exponent.is_finite()) {
            return Err(Error::InvalidParameter(
                "radial power parameters must be finite".into(),
            ));
        }
        Self::with_kind(PotentialKind::RadialPower { coeff, exponent }, dim)
    }

    pub fn quadratic(stiffness: SquareMatrix) -> Result<Self> {
        let stiffness = stiffness.into_symmetric()?;
        let dim = stiffness.dim();
        Self::with_kind(PotentialKind::Quadratic { stiffness }, dim)
    }

    pub fn general(potential: GeneralPotential, dim: usize) -> Result<Self> {
        Self::with_kind(PotentialKind::General(potential), dim)
    }

    fn with_kind(kind: PotentialKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "potential dimension must be >= 1".into(),
            ));
        }
        Ok(Self { kind, dim })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Radial kinds expand into `sum coeff * r^exponent`.
    pub fn radial_terms(&self) -> Option<Vec<RadialTerm>> {
        let t = |coeff, exponent| RadialTerm { coeff, exponent };
        match &self.kind {
            PotentialKind::Kepler { kappa } => Some(vec![t(-kappa, -1.0)]),
            PotentialKind::Anharmonic { alpha, beta } => Some(vec![t(*alpha, 2.0), t(-beta, 4.0)]),
            PotentialKind::RadialPower { coeff, exponent } => Some(vec![t(*coeff, *exponent)]),
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        self.radial_terms().is_some()
    }

    /// `[V, V', V'', V''', V'''']` as functions of the radius.
    pub fn radial_derivatives(&self, r: f64) -> Result<[f64; 5]> {
        let terms = self
            .radial_terms()
            .ok_or(Error::DerivativeUnavailable { order: 0 })?;
        self.check_radius(r, &terms)?;
        let mut out = [0.0; 5];
        for term in &terms {
            let mut falling = term.coeff;
            for (k, slot) in out.iter_mut().enumerate() {
                if falling != 0.0 {
                    *slot += falling * rpow(r, term.exponent - k as f64);
                }
                falling *= term.exponent - k as f64;
            }
        }
        Ok(out)
    }

    /// Derivatives `W^(k)(s)`, k = 0..=4, of `V = W(s)` with `s = |x|^2 / 2`.
    ///
    /// With these, every Cartesian derivative of a radial potential is a
    /// polynomial in `x` and the identity.
    fn s_derivatives(&self, terms: &[RadialTerm], r: f64) -> [f64; 5] {
        let mut out = [0.0; 5];
        for term in terms {
            let mut falling = term.coeff;
            for (k, slot) in out.iter_mut().enumerate() {
                if falling != 0.0 {
                    *slot += falling * rpow(r, term.exponent - 2.0 * k as f64);
                }
                falling *= term.exponent - 2.0 * k as f64;
            }
        }
        out
    }

    fn check_radius(&self, r: f64, terms: &[RadialTerm]) -> Result<()> {
        // only non-negative even powers are smooth at the origin
        let singular = terms
            .iter()
            .any(|t| t.coeff != 0.0 && !(t.exponent >= 0.0 && t.exponent % 2.0 == 0.0));
        if singular && r < SINGULAR_RADIUS {
            return Err(Error::SingularPoint { radius: r });
        }
        Ok(())
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn radial_setup(&self, x: &[f64]) -> Result<Option<[f64; 5]>> {
        self.check_dim(x)?;
        match self.radial_terms() {
            Some(terms) => {
                let r = norm2(x);
                self.check_radius(r, &terms)?;
                Ok(Some(self.s_derivatives(&terms, r)))
            }
            None => Ok(None),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if let Some(w) = self.radial_setup(x)? {
            return Ok(w[0]);
        }
        match &self.kind {
            PotentialKind::Quadratic { stiffness } => Ok(0.5 * dot(x, &stiffness.mul_vec(x))),
            PotentialKind::General(g) => Ok((g.value)(x)),
            _ => unreachable!("radial kinds handled above"),
        }
    }

    /// `V_x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if let Some(w) = self.radial_setup(x)? {
            return Ok(x.iter().map(|xi| w[1] * xi).collect());
        }
        match &self.kind {
            PotentialKind::Quadratic { stiffness } => Ok(stiffness.mul_vec(x)),
            PotentialKind::General(g) => Ok(fd_gradient(&*g.value, x)),
            _ => unreachable!("radial kinds handled above"),
        }
    }

    /// `V_xx`, flagged symmetric.
    pub fn hessian(&self, x: &[f64]) -> Result<SquareMatrix> {
        if let Some(w) = self.radial_setup(x)? {
            let n = x.len();
            let mut h = SquareMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let mut v = w[2] * (x[i] * x[j]);
                    if i == j {
                        v += w[1];
                    }
                    h.set(i, j, v);
                    h.set(j, i, v);
                }
            }
            return h.into_symmetric();
        }
        match &self.kind {
            PotentialKind::Quadratic { stiffness } => Ok(stiffness.clone()),
            PotentialKind::General(g) => fd_hessian(&*g.value, x).into_symmetric(),
            _ => unreachable!("radial kinds handled above"),
        }
    }

    /// Third derivative contracted twice: `V,_{g mu nu} u^mu v^nu`.
    pub fn third_contract(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        if let Some(w) = self.radial_setup(x)? {
            let (xu, xv, uv) = (dot(x, u), dot(x, v), dot(u, v));
            return Ok((0..x.len())
                .map(|g| w[3] * x[g] * xu * xv + w[2] * (uv * x[g] + u[g] * xv + v[g] * xu))
                .collect());
        }
        match &self.kind {
            PotentialKind::Quadratic { .. } => Ok(vec![0.0; x.len()]),
            PotentialKind::General(_) => Err(Error::DerivativeUnavailable { order: 3 }),
            _ => unreachable!("radial kinds handled above"),
        }
    }

    /// Fourth derivative contracted three times: `V,_{g mu nu s} u^mu v^nu w^s`.
    pub fn fourth_contract(&self, x: &[f64], u: &[f64], v: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        if let Some(w) = self.radial_setup(x)? {
            let (xu, xv, xz) = (dot(x, u), dot(x, v), dot(x, z));
            let (uv, uz, vz) = (dot(u, v), dot(u, z), dot(v, z));
            return Ok((0..x.len())
                .map(|g| {
                    w[4] * x[g] * xu * xv * xz
                        + w[3]
                            * (x[g] * (uv * xz + uz * xv + vz * xu)
                                + u[g] * xv * xz
                                + v[g] * xu * xz
                                + z[g] * xu * xv)
                        + w[2] * (u[g] * vz + v[g] * uz + z[g] * uv)
                })
                .collect());
        }
        match &self.kind {
            PotentialKind::Quadratic { .. } => Ok(vec![0.0; x.len()]),
            PotentialKind::General(_) => Err(Error::DerivativeUnavailable { order: 4 }),
            _ => unreachable!("radial kinds handled above"),
        }
    }
}

fn rpow(r: f64, e: f64) -> f64 {
    if e.fract() == 0.0 && e.abs() < 64.0 {
        r.powi(e as i32)
    } else {
        r.powf(e)
    }
}

fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let step = FD_GRADIENT_STEP * x[i].abs().max(1.0);
            probe[i] = x[i] + step;
            let fp = f(&probe);
            probe[i] = x[i] - step;
            let fm = f(&probe);
            probe[i] = x[i];
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> SquareMatrix {
    let n = x.len();
    let steps: Vec<f64> = x
        .iter()
        .map(|v| FD_HESSIAN_STEP * v.abs().max(1.0))
        .collect();
    let mut probe = x.to_vec();
    let mut eval = |di: f64, dj: f64, i: usize, j: usize| {
        probe[i] += di;
        probe[j] += dj;
        let v = f(&probe);
        probe[i] = x[i];
        probe[j] = x[j];
        v
    };
    let mut h = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let (a, b) = (steps[i], steps[j]);
            let v = (eval(a, b, i, j) - eval(a, -b, i, j) - eval(-a, b, i, j) + eval(-a, -b, i, j))
                / (4.0 * a * b);
            h.set(i, j, v);
            h.set(j, i, v);
        }
    }
    h
}

/// `H = |p|^2 / 2 + V(x)` with the canonical structure `F = S grad H`.
#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    potential: PotentialModel,
}

impl HamiltonianSystem {
    pub fn new(potential: PotentialModel) -> Self {
        Self { potential }
    }

    pub fn potential(&self) -> &PotentialModel {
        &self.potential
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    fn check(&self, y: &PhaseState) -> Result<()> {
        if y.dim() != self.dim() || y.p.len() != y.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: y.dim(),
            });
        }
        Ok(())
    }

    pub fn energy(&self, y: &PhaseState) -> Result<f64> {
        self.check(y)?;
        Ok(0.5 * dot(&y.p, &y.p) + self.potential.value(&y.x)?)
    }

    /// `F(y) = (p, -V_x(x))`.
    pub fn vector_field(&self, y: &PhaseState) -> Result<PhaseState> {
        self.check(y)?;
        let force = self.potential.gradient(&y.x)?.iter().map(|g| -g).collect();
        Ok(PhaseState {
            x: y.p.clone(),
            p: force,
        })
    }

    /// `F' = [[0, I], [-V_xx, 0]]`.
    pub fn jacobian(&self, y: &PhaseState) -> Result<SquareMatrix> {
        self.check(y)?;
        let m = self.dim();
        let vxx = self.potential.hessian(&y.x)?;
        let zero = SquareMatrix::zeros(m);
        Ok(SquareMatrix::from_blocks(
            &zero,
            &SquareMatrix::identity(m),
            &vxx.scaled(-1.0),
            &zero,
        ))
    }
}
