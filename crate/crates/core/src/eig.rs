//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! The matrices in this crate are at most 16x16, where Jacobi iteration is
//! simple, deterministic, and accurate: each rotation exactly zeroes one
//! off-diagonal pair, and sweeps converge quadratically. No external linear
//! algebra backend is required.

use num_complex::Complex64 as C64;

use crate::matrix::{ComplexMatrix, MAX_DIM};
use crate::{Error, Result};

/// Relative off-diagonal Frobenius mass at which the sweep loop stops.
const CONVERGENCE: f64 = 1e-14;

/// Hard cap on Jacobi sweeps; convergence takes far fewer in practice.
const MAX_SWEEPS: usize = 100;

/// Eigenvalues below this magnitude are clamped to zero inside [`sqrt_psd`],
/// and more negative ones are rejected.
const SQRT_NEG_TOL: f64 = 1e-8;

/// Result of a Hermitian eigendecomposition.
///
/// Eigenvalues are sorted in descending order; column `k` of `vectors` is the
/// unit eigenvector for `values[k]`. Each eigenvector's phase is fixed by
/// making its largest-magnitude component real and positive (first such
/// component on ties), so the decomposition is a deterministic function of
/// the input.
#[derive(Clone, Debug)]
pub struct Eigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// Rebuild `V diag(values) V†`; useful for validating the decomposition.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..d {
                    acc += self.vectors.get(i, k)
                        * self.values[k]
                        * self.vectors.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must be Hermitian within [`crate::tol::HERMITIAN`]; it is
/// symmetrized exactly before iterating so that roundoff in the caller cannot
/// leak into the eigensystem.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    let d = m.dim();
    if d == 0 || d > MAX_DIM {
        return Err(Error::DimensionOutOfRange {
            dim: d,
            min: 1,
            max: MAX_DIM,
        });
    }
    m.check_hermitian()?;

    let mut a = m.hermitized();
    let mut v = ComplexMatrix::identity(d);
    let scale = a.frobenius_norm().max(1.0);

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= CONVERGENCE * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    // Pair, sort descending (stable, so exact ties keep sweep order), and fix
    // phases.
    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col: Vec<C64> = (0..d).map(|r| v.get(r, old_col)).collect();
        fix_phase(&mut col);
        for (r, &val) in col.iter().enumerate() {
            vectors.set(r, new_col, val);
        }
    }

    Ok(Eigen { values, vectors })
}

/// Positive-semidefinite square root `sqrt(M)` of a Hermitian matrix.
///
/// Slightly negative eigenvalues (down to `-1e-8`) are clamped to zero, which
/// absorbs roundoff from upstream products; anything more negative is
/// rejected as genuinely non-PSD.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eigen = eig_hermitian(m)?;
    let min = eigen.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -SQRT_NEG_TOL {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let d = m.dim();
    let mut out = ComplexMatrix::zeros(d);
    let roots: Vec<f64> = eigen.values.iter().map(|&v| v.max(0.0).sqrt()).collect();
    for i in 0..d {
        for j in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += eigen.vectors.get(i, k) * roots[k] * eigen.vectors.get(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Frobenius norm of the strictly off-diagonal part.
fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi rotation zeroing the `(p, q)` entry of the Hermitian matrix `a`
/// (and its mirror), accumulating the rotation into `v`.
///
/// With `g = a[p][q] = |g| e^{i phi}`, the plane rotation
/// `R = [[c, -s e^{i phi}], [s e^{-i phi}, c]]` applied as `R† a R` zeroes the
/// pivot when `t = s/c` solves `t^2 - 2 tau t - 1 = 0` for
/// `tau = (a[q][q] - a[p][p]) / (2 |g|)`; the root with `|t| <= 1` keeps the
/// rotation angle below 45 degrees, which is what makes the sweep stable.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a.get(p, q);
    let mag = g.norm();
    if mag == 0.0 {
        return;
    }
    let phase = g / mag; // e^{i phi}
    let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * mag);
    let t = if tau >= 0.0 {
        -1.0 / (tau + (tau * tau + 1.0).sqrt())
    } else {
        1.0 / (-tau + (tau * tau + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let d = a.dim();
    let sp = phase * s; // s e^{i phi}
    let spc = phase.conj() * s; // s e^{-i phi}

    // Column update: a <- a R.
    for r in 0..d {
        let arp = a.get(r, p);
        let arq = a.get(r, q);
        a.set(r, p, arp * c + arq * spc);
        a.set(r, q, arq * c - arp * sp);
    }
    // Row update: a <- R† a.
    for col in 0..d {
        let apc = a.get(p, col);
        let aqc = a.get(q, col);
        a.set(p, col, apc * c + aqc * sp);
        a.set(q, col, aqc * c - apc * spc);
    }
    // The pivot is zero analytically; enforce it (and real diagonals) exactly
    // so roundoff cannot accumulate over sweeps.
    a.set(p, q, C64::new(0.0, 0.0));
    a.set(q, p, C64::new(0.0, 0.0));
    a.set(p, p, C64::new(a.get(p, p).re, 0.0));
    a.set(q, q, C64::new(a.get(q, q).re, 0.0));

    // Accumulate eigenvectors: v <- v R.
    for r in 0..d {
        let vrp = v.get(r, p);
        let vrq = v.get(r, q);
        v.set(r, p, vrp * c + vrq * spc);
        v.set(r, q, vrq * c - vrp * sp);
    }
}

/// Rotate a column's global phase so its largest-magnitude component is real
/// and positive (first such component on exact ties).
fn fix_phase(col: &mut [C64]) {
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, &x) in col.iter().enumerate() {
        let mag = x.norm();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    if best_mag == 0.0 {
        return;
    }
    let phase = col[best] / col[best].norm();
    let correction = phase.conj();
    for x in col.iter_mut() {
        *x *= correction;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn bit_flip_operator_eigensystem() {
        let x = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = eig_hermitian(&x).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] + 1.0).abs() < 1e-12);
        let r = 0.5f64.sqrt();
        // Phase fixing makes the first component real positive.
        assert!((e.vectors.get(0, 0) - c(r, 0.0)).norm() < 1e-12);
        assert!((e.vectors.get(1, 0) - c(r, 0.0)).norm() < 1e-12);
        assert!((e.vectors.get(0, 1) - c(r, 0.0)).norm() < 1e-12);
        assert!((e.vectors.get(1, 1) - c(-r, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_hermitian_eigensystem() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1; the eigenvector for 3 is
        // (1, -i)/sqrt(2) once its first component is made real positive.
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-12);
        assert!((e.values[1] - 1.0).abs() < 1e-12);
        let r = 0.5f64.sqrt();
        assert!((e.vectors.get(0, 0) - c(r, 0.0)).norm() < 1e-12);
        assert!((e.vectors.get(1, 0) - c(0.0, -r)).norm() < 1e-12);
    }

    #[test]
    fn partially_mixed_state_eigenvalues() {
        // (I + 0.6 X)/2 has eigenvalues 0.8 and 0.2.
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.3, 0.0)],
            vec![c(0.3, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] - 0.8).abs() < 1e-12);
        assert!((e.values[1] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn diagonal_input_sorts_descending() {
        let m = ComplexMatrix::diagonal(&[c(0.25, 0.0), c(0.5, 0.0), c(0.25, 0.0)]);
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values.len(), 3);
        assert!((e.values[0] - 0.5).abs() < 1e-14);
        assert!((e.values[1] - 0.25).abs() < 1e-14);
        assert!((e.values[2] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_up_to_max_dim() {
        for d in [2usize, 3, 4, 7, 16] {
            // Deterministic, well-scattered Hermitian test matrix.
            let m = ComplexMatrix::from_fn(d, |i, j| {
                let (lo, hi, sign) = if i <= j { (i, j, 1.0) } else { (j, i, -1.0) };
                let (lo, hi) = (lo as f64, hi as f64);
                let re = (0.7 * lo + 1.3 * hi + 0.25).sin();
                let im = if i == j {
                    0.0
                } else {
                    sign * (1.1 * lo - 0.6 * hi + 0.5).cos() * 0.8
                };
                C64::new(re, im)
            });
            let e = eig_hermitian(&m).unwrap();
            let rebuilt = e.reconstruct();
            assert!(
                m.max_abs_diff(&rebuilt).unwrap() < 1e-9,
                "reconstruction failed at dim {d}"
            );
            assert!(e.vectors.unitarity_deviation() < 1e-10);
            for k in 1..d {
                assert!(e.values[k - 1] >= e.values[k]);
            }
        }
    }

    #[test]
    fn degenerate_identity() {
        let e = eig_hermitian(&ComplexMatrix::identity(4)).unwrap();
        for v in &e.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(e.vectors.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = ComplexMatrix::diagonal(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let s = sqrt_psd(&m).unwrap();
        assert!((s.get(0, 0) - c(2.0, 0.0)).norm() < 1e-12);
        assert!((s.get(1, 1) - c(3.0, 0.0)).norm() < 1e-12);
        assert!(s.get(0, 1).norm() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.6, 0.0), c(0.2, 0.1)],
            vec![c(0.2, -0.1), c(0.4, 0.0)],
        ])
        .unwrap();
        let s = sqrt_psd(&m).unwrap();
        let sq = s.mul(&s).unwrap();
        assert!(m.max_abs_diff(&sq).unwrap() < 1e-10);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            sqrt_psd(&m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }
}
