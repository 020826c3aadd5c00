//! Cyclic Jacobi eigensolver for small symmetric matrices.

use super::matrix::SquareMatrix;
use crate::error::{Error, Result};

const OFF_DIAGONAL_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 50;

/// `A = Q diag(eigenvalues) Q^T` with orthogonal `Q` (eigenvectors in columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: SquareMatrix,
}

impl EigenDecomposition {
    /// `Q diag(f(lambda)) Q^T`, symmetric by construction.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SquareMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reassemble(&values)
    }

    /// Fallible variant of [`map_spectrum`](Self::map_spectrum).
    pub fn try_map_spectrum(&self, f: impl Fn(f64) -> Result<f64>) -> Result<SquareMatrix> {
        let values = self
            .eigenvalues
            .iter()
            .map(|&l| f(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.reassemble(&values))
    }

    fn reassemble(&self, values: &[f64]) -> SquareMatrix {
        let q = &self.eigenvectors;
        let n = q.dim();
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = (0..n).map(|k| q.get(i, k) * q.get(j, k) * values[k]).sum();
                out.set(i, j, v);
                out.set(j, i, v);
            }
        }
        out.mark_symmetric_unchecked()
    }
}

/// Eigen-decomposes a symmetric-flagged matrix by cyclic Jacobi rotations.
pub fn sym_eigen(a: &SquareMatrix) -> Result<EigenDecomposition> {
    if !a.is_symmetric() {
        // unflagged input still gets a chance if it passes the check
        a.clone().into_symmetric()?;
    }
    let n = a.dim();
    let mut w: Vec<f64> = a.entries().to_vec();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let scale = a.norm_max();
    let threshold = OFF_DIAGONAL_TOL * scale;

    let off_max = |w: &[f64]| {
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                m = m.max(w[i * n + j].abs());
            }
        }
        m
    };

    let mut sweeps = 0;
    while off_max(&w) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                what: "Jacobi eigensolver",
                iterations: sweeps,
                last_residual: off_max(&w),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = w[p * n + r];
                if apr.abs() <= threshold * 1e-3 {
                    continue;
                }
                let app = w[p * n + p];
                let arr = w[r * n + r];
                // rotation annihilating w[p][r]
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let wkp = w[k * n + p];
                    let wkr = w[k * n + r];
                    w[k * n + p] = c * wkp - s * wkr;
                    w[k * n + r] = s * wkp + c * wkr;
                }
                for k in 0..n {
                    let wpk = w[p * n + k];
                    let wrk = w[r * n + k];
                    w[p * n + k] = c * wpk - s * wrk;
                    w[r * n + k] = s * wpk + c * wrk;
                }
                w[p * n + r] = 0.0;
                w[r * n + p] = 0.0;
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[i * n + i].total_cmp(&w[j * n + j]));
    let eigenvalues = order.iter().map(|&i| w[i * n + i]).collect();
    let eigenvectors = SquareMatrix::from_fn(n, |i, j| q[i * n + order[j]]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reconstruction_error(a: &SquareMatrix, e: &EigenDecomposition) -> f64 {
        e.map_spectrum(|l| l).sub(a).norm_max()
    }

    fn orthogonality_error(q: &SquareMatrix) -> f64 {
        q.transpose()
            .matmul(q)
            .sub(&SquareMatrix::identity(q.dim()))
            .norm_max()
    }

    #[test]
    fn identity_and_diagonal() {
        let e = sym_eigen(&SquareMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        assert_eq!(e.eigenvectors, SquareMatrix::identity(2));

        let e = sym_eigen(&SquareMatrix::from_diagonal(&[9.0, 4.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![4.0, 9.0]);
    }

    #[test]
    fn two_by_two_characteristic_polynomial() {
        // lambda^2 - 4 lambda + 3 = 0
        let a = SquareMatrix::new_symmetric(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = sym_eigen(&a).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-15);
        assert!(reconstruction_error(&a, &e) < 1e-15);
    }

    #[test]
    fn rejects_nonsymmetric() {
        let a = SquareMatrix::new(2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert!(matches!(sym_eigen(&a), Err(Error::NonSymmetric { .. })));
    }

    #[test]
    fn zero_matrix() {
        let e = sym_eigen(&SquareMatrix::zeros(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
        assert_eq!(e.eigenvectors, SquareMatrix::identity(3));
    }

    #[test]
    fn random_symmetric_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let mut a = SquareMatrix::zeros(n);
            let mag = 10f64.powi(rng.gen_range(-3..4));
            for i in 0..n {
                for j in i..n {
                    let v = mag * rng.gen_range(-1.0..1.0);
                    a.set(i, j, v);
                    a.set(j, i, v);
                }
            }
            let a = a.into_symmetric().unwrap();
            let e = sym_eigen(&a).unwrap();
            assert!(orthogonality_error(&e.eigenvectors) <= 1e-12);
            assert!(reconstruction_error(&a, &e) <= 1e-10 * a.norm_max());
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
