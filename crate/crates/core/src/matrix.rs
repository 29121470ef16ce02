//! Dense square complex matrices in row-major storage.
//!
//! Everything in this crate operates on small matrices (dimension at most
//! [`MAX_DIM`]), so the arithmetic here favors clarity and determinism over
//! asymptotic cleverness: plain loops, no blocking, no parallelism.

use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Largest matrix dimension the crate supports (two four-level systems).
pub const MAX_DIM: usize = 16;

/// A dense `dim x dim` complex matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    /// Build a matrix by evaluating `f(row, col)` at every entry.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build a matrix from rows of entries; every row must have the same
    /// length as the number of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
        }
        Ok(Self {
            dim,
            entries: rows.concat(),
        })
    }

    /// Build a diagonal matrix from its diagonal entries.
    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Matrix dimension (number of rows = number of columns).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry at `(row, col)`.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    /// Overwrite the entry at `(row, col)`.
    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        self.entries[row * self.dim + col] = value;
    }

    /// Flat row-major view of the entries.
    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise sum with another matrix of the same dimension.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    /// Entrywise difference with another matrix of the same dimension.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    /// Multiply every entry by a complex scalar.
    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for i in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.dim {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Quadratic form `v† * self * v`.
    pub fn expectation(&self, v: &[C64]) -> Result<C64> {
        let mv = self.mul_vec(v)?;
        Ok(v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let da = self.dim;
        let db = other.dim;
        Self::from_fn(da * db, |i, j| {
            self.get(i / db, j / db) * other.get(i % db, j % db)
        })
    }

    /// Conjugation `u * self * u†`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.mul(self)?.mul(&u.adjoint())
    }

    /// Largest entrywise absolute difference from another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Frobenius norm `sqrt(Σ |m_ij|²)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest deviation `|m_ij - conj(m_ji)|` from Hermitian symmetry.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let dev = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    /// Error unless the matrix is Hermitian within [`crate::tol::HERMITIAN`].
    pub fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > crate::tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// The exactly Hermitian matrix `(M + M†) / 2`.
    pub fn hermitized(&self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Largest deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("same dimension");
        gram.max_abs_diff(&Self::identity(self.dim))
            .expect("same dimension")
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

/// Kronecker product of two complex vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Squared Euclidean norm of a complex vector.
pub fn vec_norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_is_neutral_for_mul() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(-0.5, 0.25)],
            vec![c(0.0, -1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let id = ComplexMatrix::identity(2);
        assert_eq!(m.mul(&id).unwrap(), m);
        assert_eq!(id.mul(&m).unwrap(), m);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, 4.0)],
            vec![c(5.0, 6.0), c(7.0, 8.0)],
        ])
        .unwrap();
        let a = m.adjoint();
        assert_eq!(a.get(0, 1), c(5.0, -6.0));
        assert_eq!(a.get(1, 0), c(3.0, -4.0));
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn trace_of_kron_is_product_of_traces() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 1.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.5)],
        ])
        .unwrap();
        let b = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(1.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let lhs = a.kron(&b).trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn kron_matches_blockwise_definition() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(2.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let b = ComplexMatrix::identity(2).scale(c(3.0, 0.0));
        let k = a.kron(&b);
        assert_eq!(k.dim(), 4);
        assert_eq!(k.get(0, 0), c(3.0, 0.0));
        assert_eq!(k.get(0, 2), c(0.0, 3.0));
        assert_eq!(k.get(2, 0), c(6.0, 0.0));
        assert_eq!(k.get(3, 1), c(6.0, 0.0));
        assert_eq!(k.get(3, 3), c(0.0, 0.0));
    }

    #[test]
    fn expectation_is_quadratic_form() {
        // <v| Z |v> with v = (cos t, sin t) is cos^2 t - sin^2 t.
        let z = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let t: f64 = 0.3;
        let v = vec![c(t.cos(), 0.0), c(t.sin(), 0.0)];
        let e = z.expectation(&v).unwrap();
        assert!((e.re - (2.0 * t).cos()).abs() < 1e-12);
        assert!(e.im.abs() < 1e-15);
    }

    #[test]
    fn hermiticity_deviation_detects_asymmetry() {
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, c(0.0, 1.0));
        m.set(1, 0, c(0.0, 1.0)); // should be (0, -1) for Hermitian
        assert!((m.hermiticity_deviation() - 2.0).abs() < 1e-15);
        assert!(m.check_hermitian().is_err());
        assert_eq!(m.hermitized().get(1, 0), c(0.0, 0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(matches!(
            a.mul(&b),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn kron_vec_is_row_major() {
        let a = vec![c(1.0, 0.0), c(2.0, 0.0)];
        let b = vec![c(0.0, 1.0), c(3.0, 0.0)];
        let k = kron_vec(&a, &b);
        assert_eq!(k, vec![c(0.0, 1.0), c(3.0, 0.0), c(0.0, 2.0), c(6.0, 0.0)]);
    }
}
