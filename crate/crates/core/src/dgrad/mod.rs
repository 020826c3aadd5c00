//! AVF discrete gradients `grad_bar V(x0, x1) = int_0^1 V_x(x0 + t (x1 - x0)) dt`.
//!
//! Two closed forms are exact: the Kepler potential and the
//! `alpha r^2 - beta r^4` oscillator (whose integrand is a cubic in `t`, so
//! Simpson's rule integrates it exactly). Everything else goes through a
//! tabulated Gauss-Legendre rule, which conserves energy only up to its
//! quadrature error.

mod table;

use crate::error::{Error, Result};
use crate::model::{PotentialKind, PotentialModel};
use crate::vecops::{dot, midpoint, norm2, sub};

pub use table::TABULATED_COUNTS;

/// Relative threshold on `r0 r1 + x0.x1` below which the Kepler closed form
/// is refused.
pub const ANTIPODAL_EPS: f64 = 1e-10;

pub const DEFAULT_GAUSS_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientStrategy {
    ClosedKepler,
    ClosedAnharmonic,
    GaussLegendre(usize),
}

/// A discrete-gradient strategy bound to the potential it integrates.
#[derive(Debug, Clone)]
pub struct DiscreteGradientSpec {
    strategy: GradientStrategy,
    potential: PotentialModel,
    certify: Option<f64>,
}

impl DiscreteGradientSpec {
    pub fn new(strategy: GradientStrategy, potential: PotentialModel) -> Result<Self> {
        match (strategy, potential.kind()) {
            (GradientStrategy::ClosedKepler, PotentialKind::Kepler { .. }) => {}
            (GradientStrategy::ClosedAnharmonic, PotentialKind::Anharmonic { .. }) => {}
            (GradientStrategy::GaussLegendre(n), _) => {
                if !(2..=64).contains(&n) || table::half_rule(n).is_none() {
                    return Err(Error::InvalidParameter(format!(
                        "Gauss-Legendre node count {n} is not tabulated (available: {TABULATED_COUNTS:?})"
                    )));
                }
            }
            (s, _) => {
                return Err(Error::InvalidParameter(format!(
                    "strategy {s:?} does not apply to potential {:?}",
                    potential.kind()
                )))
            }
        }
        Ok(Self {
            strategy,
            potential,
            certify: None,
        })
    }

    /// The exact closed form when the potential has one, otherwise
    /// Gauss-Legendre with the default node count.
    pub fn preferred(potential: PotentialModel) -> Self {
        let strategy = match potential.kind() {
            PotentialKind::Kepler { .. } => GradientStrategy::ClosedKepler,
            PotentialKind::Anharmonic { .. } => GradientStrategy::ClosedAnharmonic,
            _ => GradientStrategy::GaussLegendre(DEFAULT_GAUSS_NODES),
        };
        Self {
            strategy,
            potential,
            certify: None,
        }
    }

    /// Makes Gauss-Legendre evaluations compare against the next larger
    /// tabulated rule and fail when they differ by more than `tolerance`
    /// (relative to the gradient size).
    pub fn with_certification(mut self, tolerance: f64) -> Self {
        self.certify = Some(tolerance);
        self
    }

    pub fn strategy(&self) -> GradientStrategy {
        self.strategy
    }

    pub fn potential(&self) -> &PotentialModel {
        &self.potential
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self.strategy, GradientStrategy::GaussLegendre(_))
    }

    /// Potential-gradient evaluations one call costs.
    pub fn evaluation_cost(&self) -> u64 {
        match self.strategy {
            GradientStrategy::ClosedKepler | GradientStrategy::ClosedAnharmonic => 1,
            GradientStrategy::GaussLegendre(n) => n as u64,
        }
    }
}

/// Evaluates the AVF discrete gradient between `x0` and `x1`.
pub fn avf_gradient(spec: &DiscreteGradientSpec, x0: &[f64], x1: &[f64]) -> Result<Vec<f64>> {
    let m = spec.potential.dim();
    for x in [x0, x1] {
        if x.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: x.len(),
            });
        }
    }
    match (spec.strategy, spec.potential.kind()) {
        (GradientStrategy::ClosedKepler, PotentialKind::Kepler { kappa }) => {
            kepler_gradient_closed(*kappa, x0, x1)
        }
        (GradientStrategy::ClosedAnharmonic, PotentialKind::Anharmonic { .. }) => {
            simpson_gradient(&spec.potential, x0, x1)
        }
        (GradientStrategy::GaussLegendre(n), _) => {
            let value = gauss_legendre_gradient(&spec.potential, n, x0, x1)?;
            if let Some(tol) = spec.certify {
                let finer = TABULATED_COUNTS
                    .iter()
                    .copied()
                    .find(|&k| k > n)
                    .unwrap_or(n);
                if finer != n {
                    let check = gauss_legendre_gradient(&spec.potential, finer, x0, x1)?;
                    let estimate = norm2(&sub(&value, &check));
                    let tolerance = tol * norm2(&check).max(f64::MIN_POSITIVE);
                    if estimate > tolerance {
                        return Err(Error::QuadratureTolerance {
                            nodes: n,
                            estimate,
                            tolerance,
                        });
                    }
                }
            }
            Ok(value)
        }
        _ => unreachable!("strategy/potential pairing validated on construction"),
    }
}

/// `kappa (x0/r0 + x1/r1) / (r0 r1 + x0.x1)`: exact AVF gradient of `-kappa/r`.
pub fn kepler_gradient_closed(kappa: f64, x0: &[f64], x1: &[f64]) -> Result<Vec<f64>> {
    let r0 = norm2(x0);
    let r1 = norm2(x1);
    for r in [r0, r1] {
        if r < crate::model::SINGULAR_RADIUS {
            return Err(Error::SingularPoint { radius: r });
        }
    }
    let rr = r0 * r1;
    let denom = rr + dot(x0, x1);
    if denom <= ANTIPODAL_EPS * rr {
        return Err(Error::AntipodalSingularity { ratio: denom / rr });
    }
    let s = kappa / denom;
    Ok(x0
        .iter()
        .zip(x1)
        .map(|(a, b)| s * (a / r0 + b / r1))
        .collect())
}

/// Simpson's rule `(g(x0) + 4 g(mid) + g(x1)) / 6` on the anharmonic
/// potential `alpha r^2 - beta r^4`.
pub fn anharmonic_gradient_simpson(
    alpha: f64,
    beta: f64,
    x0: &[f64],
    x1: &[f64],
) -> Result<Vec<f64>> {
    if x0.len() != x1.len() || x0.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            actual: x1.len(),
        });
    }
    let potential = PotentialModel::anharmonic(alpha, beta, x0.len())?;
    simpson_gradient(&potential, x0, x1)
}

fn simpson_gradient(potential: &PotentialModel, x0: &[f64], x1: &[f64]) -> Result<Vec<f64>> {
    let g0 = potential.gradient(x0)?;
    let gm = potential.gradient(&midpoint(x0, x1))?;
    let g1 = potential.gradient(x1)?;
    Ok(g0
        .iter()
        .zip(&gm)
        .zip(&g1)
        .map(|((a, m), b)| ((a + b) + 4.0 * m) / 6.0)
        .collect())
}

/// Gauss-Legendre rule with `nodes` points for the AVF integral.
///
/// Nodes are placed symmetrically about the midpoint and summed in
/// mirrored pairs, so swapping `x0` and `x1` reproduces the result bit for
/// bit.
pub fn gauss_legendre_gradient(
    potential: &PotentialModel,
    nodes: usize,
    x0: &[f64],
    x1: &[f64],
) -> Result<Vec<f64>> {
    let rule = table::half_rule(nodes).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "Gauss-Legendre node count {nodes} is not tabulated"
        ))
    })?;
    let mid = midpoint(x0, x1);
    let half: Vec<f64> = x1.iter().zip(x0).map(|(b, a)| 0.5 * (b - a)).collect();
    let mut acc = vec![0.0; mid.len()];
    for (&t, &w) in rule.nodes.iter().zip(rule.weights) {
        if t == 0.0 {
            let g = potential.gradient(&mid)?;
            for (a, gi) in acc.iter_mut().zip(&g) {
                *a += w * gi;
            }
            continue;
        }
        let plus: Vec<f64> = mid.iter().zip(&half).map(|(c, d)| c + t * d).collect();
        let minus: Vec<f64> = mid.iter().zip(&half).map(|(c, d)| c - t * d).collect();
        let gp = potential.gradient(&plus)?;
        let gm = potential.gradient(&minus)?;
        for ((a, p), q) in acc.iter_mut().zip(&gp).zip(&gm) {
            *a += w * (p + q);
        }
    }
    // weights sum to 2 on [-1, 1]
    Ok(acc.into_iter().map(|a| 0.5 * a).collect())
}

/// `|grad_bar V . (x1 - x0) - (V(x1) - V(x0))|`, the discrete-gradient
/// identity residual.
pub fn dg_identity_residual(spec: &DiscreteGradientSpec, x0: &[f64], x1: &[f64]) -> Result<f64> {
    let g = avf_gradient(spec, x0, x1)?;
    let dv = spec.potential.value(x1)? - spec.potential.value(x0)?;
    Ok((dot(&g, &sub(x1, x0)) - dv).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matfun::SquareMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kepler_spec(strategy: GradientStrategy) -> DiscreteGradientSpec {
        DiscreteGradientSpec::new(strategy, PotentialModel::kepler(1.0, 3).unwrap()).unwrap()
    }

    fn random_vec(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..m).map(|_| rng.gen_range(lo..hi)).collect()
    }

    /// Legendre roots by Newton iteration on the three-term recurrence,
    /// independent of the tabulated digits.
    fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for k in 1..=n {
            let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        (nodes, weights)
    }

    #[test]
    fn tables_match_newton_roots() {
        for &n in TABULATED_COUNTS.iter() {
            let rule = table::half_rule(n).unwrap();
            let (nodes, weights) = legendre_rule(n);
            for (&t, &w) in rule.nodes.iter().zip(rule.weights) {
                let (i, _) = nodes
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                    .unwrap();
                assert!((nodes[i] - t).abs() < 1e-14, "n={n} node {t}");
                assert!((weights[i] - w).abs() < 1e-13, "n={n} weight {w}");
            }
            let total: f64 = rule
                .nodes
                .iter()
                .zip(rule.weights)
                .map(|(t, w)| if *t == 0.0 { *w } else { 2.0 * w })
                .sum();
            assert!((total - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn coincident_points_give_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let potentials = [
            PotentialModel::kepler(1.0, 3).unwrap(),
            PotentialModel::anharmonic(0.5, 0.01, 3).unwrap(),
        ];
        for pot in potentials {
            let closed = DiscreteGradientSpec::preferred(pot.clone());
            let gl =
                DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(8), pot.clone()).unwrap();
            for _ in 0..50 {
                let x = random_vec(&mut rng, 3, 0.5, 4.0);
                let g = pot.gradient(&x).unwrap();
                for spec in [&closed, &gl] {
                    let d = avf_gradient(spec, &x, &x).unwrap();
                    assert!(norm2(&sub(&d, &g)) <= 1e-13 * norm2(&g));
                }
            }
        }
    }

    #[test]
    fn harmonic_is_midpoint() {
        let spec = DiscreteGradientSpec::new(
            GradientStrategy::ClosedAnharmonic,
            PotentialModel::harmonic(2).unwrap(),
        )
        .unwrap();
        let g = avf_gradient(&spec, &[1.0, 2.0], &[3.0, -1.0]).unwrap();
        assert_eq!(g, vec![2.0, 0.5]);
        let g = anharmonic_gradient_simpson(0.5, 0.0, &[1.0, 2.0], &[3.0, -1.0]).unwrap();
        assert_eq!(g, vec![2.0, 0.5]);
    }

    #[test]
    fn kepler_examples() {
        let g = kepler_gradient_closed(1.0, &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(g, vec![1.0, 0.0, 0.0]);
        let g = kepler_gradient_closed(1.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(g, vec![1.0, 1.0, 0.0]);
        let spec = kepler_spec(GradientStrategy::ClosedKepler);
        assert_eq!(
            dg_identity_residual(&spec, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap(),
            0.0
        );
        let quad = avf_gradient(
            &kepler_spec(GradientStrategy::GaussLegendre(32)),
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
        )
        .unwrap();
        assert!(norm2(&sub(&quad, &[1.0, 1.0, 0.0])) <= 1e-12);
    }

    #[test]
    fn kepler_antipodal_pole() {
        let err = kepler_gradient_closed(1.0, &[1.0, 0.0, 0.0], &[-2.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::AntipodalSingularity { .. }));
        let err = kepler_gradient_closed(1.0, &[1.0, 0.0, 0.0], &[-2.0, 1e-6, 0.0]).unwrap_err();
        assert!(matches!(err, Error::AntipodalSingularity { .. }));
        assert!(kepler_gradient_closed(1.0, &[1.0, 0.0, 0.0], &[-2.0, 1e-3, 0.0]).is_ok());
        assert!(matches!(
            kepler_gradient_closed(1.0, &[0.0; 3], &[1.0, 0.0, 0.0]),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn kepler_identity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let spec = kepler_spec(GradientStrategy::ClosedKepler);
        let pot = spec.potential().clone();
        for _ in 0..1000 {
            let x0 = random_vec(&mut rng, 3, -4.0, 4.0);
            let x1 = random_vec(&mut rng, 3, -4.0, 4.0);
            if norm2(&x0) < 0.5 || norm2(&x1) < 0.5 {
                continue;
            }
            match dg_identity_residual(&spec, &x0, &x1) {
                Ok(res) => {
                    let scale = pot.value(&x0).unwrap().abs() + pot.value(&x1).unwrap().abs();
                    assert!(res <= 1e-13 * scale, "residual {res}");
                }
                Err(Error::AntipodalSingularity { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn simpson_matches_three_point_gauss() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let x0 = [3.5, 0.0, 0.0];
        let x1 = [3.5, 0.1, 0.0];
        let pot = PotentialModel::anharmonic(0.5, 0.01, 3).unwrap();
        let s = anharmonic_gradient_simpson(0.5, 0.01, &x0, &x1).unwrap();
        let g = gauss_legendre_gradient(&pot, 3, &x0, &x1).unwrap();
        assert!(norm2(&sub(&s, &g)) <= 1e-14);

        for _ in 0..200 {
            let x0 = random_vec(&mut rng, 3, -4.0, 4.0);
            let x1 = random_vec(&mut rng, 3, -4.0, 4.0);
            let s = anharmonic_gradient_simpson(0.5, 0.01, &x0, &x1).unwrap();
            let g = gauss_legendre_gradient(&pot, 3, &x0, &x1).unwrap();
            for (a, b) in s.iter().zip(&g) {
                assert!((a - b).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn quartic_expanded_form() {
        // grad_bar(r^4/4) = ((r0^2 + r1^2/3 + 2/3 x0.x1) x0 + (r1^2 + r0^2/3 + 2/3 x0.x1) x1) / 4
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..200 {
            let x0 = random_vec(&mut rng, 3, -2.0, 2.0);
            let x1 = random_vec(&mut rng, 3, -2.0, 2.0);
            // V = -(-1/4) r^4 = r^4 / 4
            let g = anharmonic_gradient_simpson(0.0, -0.25, &x0, &x1).unwrap();
            let (r0s, r1s, d) = (dot(&x0, &x0), dot(&x1, &x1), dot(&x0, &x1));
            let c0 = r0s + r1s / 3.0 + 2.0 * d / 3.0;
            let c1 = r1s + r0s / 3.0 + 2.0 * d / 3.0;
            for i in 0..3 {
                let expanded = (c0 * x0[i] + c1 * x1[i]) / 4.0;
                assert!((g[i] - expanded).abs() <= 1e-13, "{} vs {}", g[i], expanded);
            }
        }
    }

    #[test]
    fn gauss_exactness_and_convergence() {
        // quadratic potential: integrand linear in t, every rule is exact
        let k = SquareMatrix::new_symmetric(2, vec![2.0, 0.5, 0.5, 1.0]).unwrap();
        let quad = PotentialModel::quadratic(k).unwrap();
        let spec = DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(2), quad).unwrap();
        let res = dg_identity_residual(&spec, &[1.0, -2.0], &[0.3, 0.8]).unwrap();
        assert!(res <= 1e-13 * 4.0);

        // r^6 gives a degree-5 integrand; 3 nodes are exact
        let sextic = PotentialModel::radial_power(1.0, 6.0, 2).unwrap();
        let spec =
            DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(3), sextic.clone()).unwrap();
        let (x0, x1) = ([1.0, -0.5], [0.2, 1.1]);
        let scale = sextic.value(&x0).unwrap().abs() + sextic.value(&x1).unwrap().abs();
        assert!(dg_identity_residual(&spec, &x0, &x1).unwrap() <= 1e-13 * scale);

        // Kepler: the residual falls with the node count
        let x0 = [1.0, 0.2, 0.0];
        let x1 = [-0.3, 1.5, 0.4];
        let mut last = f64::INFINITY;
        for n in [2, 3, 4, 6, 8] {
            let r =
                dg_identity_residual(&kepler_spec(GradientStrategy::GaussLegendre(n)), &x0, &x1)
                    .unwrap();
            assert!(r < last, "n={n}: {r} !< {last}");
            last = r;
        }
    }

    #[test]
    fn symmetry_in_the_endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let specs = [
            kepler_spec(GradientStrategy::ClosedKepler),
            kepler_spec(GradientStrategy::GaussLegendre(7)),
            kepler_spec(GradientStrategy::GaussLegendre(8)),
            DiscreteGradientSpec::preferred(PotentialModel::anharmonic(0.5, 0.01, 3).unwrap()),
        ];
        for _ in 0..200 {
            let a = random_vec(&mut rng, 3, 0.5, 3.0);
            let b = random_vec(&mut rng, 3, 0.5, 3.0);
            for spec in &specs {
                assert_eq!(
                    avf_gradient(spec, &a, &b).unwrap(),
                    avf_gradient(spec, &b, &a).unwrap()
                );
            }
        }
    }

    #[test]
    fn rotation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let specs = [
            kepler_spec(GradientStrategy::ClosedKepler),
            DiscreteGradientSpec::preferred(PotentialModel::anharmonic(0.5, 0.01, 3).unwrap()),
        ];
        for _ in 0..100 {
            // random orthogonal Q from a Householder reflection times a rotation
            let v = random_vec(&mut rng, 3, -1.0, 1.0);
            let vv = dot(&v, &v);
            let house =
                SquareMatrix::identity(3).sub(&SquareMatrix::outer(&v, &v).scaled(2.0 / vv));
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rot = SquareMatrix::new(
                3,
                vec![
                    th.cos(),
                    -th.sin(),
                    0.0,
                    th.sin(),
                    th.cos(),
                    0.0,
                    0.0,
                    0.0,
                    1.0,
                ],
            )
            .unwrap();
            let q = house.matmul(&rot);
            let x0 = random_vec(&mut rng, 3, 0.5, 3.0);
            let x1 = random_vec(&mut rng, 3, 0.5, 3.0);
            for spec in &specs {
                let g = avf_gradient(spec, &x0, &x1).unwrap();
                let gq = avf_gradient(spec, &q.mul_vec(&x0), &q.mul_vec(&x1)).unwrap();
                let qg = q.mul_vec(&g);
                assert!(norm2(&sub(&gq, &qg)) <= 1e-13 * norm2(&g).max(1.0));
            }
        }
    }

    #[test]
    fn strategy_validation() {
        let anh = PotentialModel::anharmonic(0.5, 0.01, 3).unwrap();
        assert!(DiscreteGradientSpec::new(GradientStrategy::ClosedKepler, anh.clone()).is_err());
        assert!(
            DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(1), anh.clone()).is_err()
        );
        assert!(
            DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(17), anh.clone()).is_err()
        );
        assert!(DiscreteGradientSpec::new(GradientStrategy::GaussLegendre(64), anh).is_ok());
    }

    #[test]
    fn certification_flags_coarse_rules() {
        let spec = kepler_spec(GradientStrategy::GaussLegendre(2)).with_certification(1e-12);
        let err = avf_gradient(&spec, &[1.0, 0.0, 0.0], &[-0.5, 1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::QuadratureTolerance { nodes: 2, .. }));
        let spec = kepler_spec(GradientStrategy::GaussLegendre(32)).with_certification(1e-12);
        assert!(avf_gradient(&spec, &[1.0, 0.0, 0.0], &[0.9, 0.1, 0.0]).is_ok());
    }
}
