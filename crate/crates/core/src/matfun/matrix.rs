use std::fmt;

use crate::error::{Error, Result};

/// Relative asymmetry tolerated by a symmetric-flagged matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense row-major square matrix, small enough that nothing fancier pays off.
#[derive(Clone)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<f64>,
    symmetric: bool,
}

impl SquareMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimension must be >= 1".into(),
            ));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Ok(Self {
            dim,
            entries,
            symmetric: false,
        })
    }

    /// Builds a matrix flagged symmetric, rejecting it if the flag would lie.
    pub fn new_symmetric(dim: usize, entries: Vec<f64>) -> Result<Self> {
        Self::new(dim, entries)?.into_symmetric()
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
            symmetric: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * dim + i] = *d;
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self {
            dim,
            entries,
            symmetric: false,
        }
    }

    /// Outer product `u v^T`.
    pub fn outer(u: &[f64], v: &[f64]) -> Self {
        debug_assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j])
    }

    /// Block matrix `[[a, b], [c, d]]` of doubled dimension.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let m = a.dim;
        Self::from_fn(2 * m, |i, j| {
            let blk = match (i < m, j < m) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk.get(i % m, j % m)
        })
    }

    /// Checks the symmetry invariant and sets the flag.
    pub fn into_symmetric(mut self) -> Result<Self> {
        let asym = self.max_asymmetry();
        let bound = SYMMETRY_TOL * self.norm_max();
        if asym > bound {
            return Err(Error::NonSymmetric {
                asymmetry: asym,
                bound,
            });
        }
        self.symmetric = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
        self.symmetric = false;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum (induced infinity norm).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::from_fn(self.dim, |i, j| self.get(j, i));
        t.symmetric = self.symmetric;
        t
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Self {
            dim: n,
            entries: out,
            symmetric: false,
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.dim, v.len(), "mul_vec dimension mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^T v`
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.dim, v.len(), "tr_mul_vec dimension mismatch");
        let mut out = vec![0.0; self.dim];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| s * v).collect(),
            symmetric: self.symmetric,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
            symmetric: self.symmetric && rhs.symmetric,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scaled(-1.0))
    }

    pub(crate) fn mark_symmetric_unchecked(mut self) -> Self {
        self.symmetric = true;
        self
    }
}

impl PartialEq for SquareMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "SquareMatrix({}x{}{})",
            self.dim,
            self.dim,
            if self.symmetric { ", sym" } else { "" }
        )?;
        for i in 0..self.dim {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// The canonical symplectic matrix `[[0, I], [-I, 0]]` of size `2m`.
pub fn canonical_symplectic(m: usize) -> SquareMatrix {
    SquareMatrix::from_fn(2 * m, |i, j| {
        if i < m && j == i + m {
            1.0
        } else if i >= m && j + m == i {
            -1.0
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(SquareMatrix::new(0, vec![]).is_err());
        assert_eq!(
            SquareMatrix::new(2, vec![1.0; 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                actual: 3
            })
        );
    }

    #[test]
    fn symmetry_flag_is_checked() {
        assert!(SquareMatrix::new_symmetric(2, vec![1.0, 2.0, 2.0, 1.0]).is_ok());
        let err = SquareMatrix::new_symmetric(2, vec![1.0, 2.0, 2.1, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonSymmetric { .. }));
        // within the relative tolerance
        assert!(SquareMatrix::new_symmetric(2, vec![1e3, 1.0, 1.0 + 1e-10, 1.0]).is_ok());
    }

    #[test]
    fn symplectic_structure() {
        let s = canonical_symplectic(2);
        let st_s = s.transpose().matmul(&s);
        assert_eq!(st_s, SquareMatrix::identity(4));
        let s2 = s.matmul(&s);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s2.get(i, j), if i == j { -1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn transpose_products() {
        let a = SquareMatrix::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(a.tr_mul_vec(&[1.0, 1.0]), vec![4.0, 6.0]);
        assert_eq!(a.norm_inf(), 7.0);
        assert_eq!(a.norm_max(), 4.0);
    }
}
