//! Seeded random states, bases, and channels for property tests and sweeps.
//!
//! Everything here takes an explicit RNG so results are reproducible; the
//! distributions are the standard unitarily-invariant ones (Haar vectors
//! from normalized Gaussian amplitudes, Ginibre density matrices, and
//! unitaries from Gram–Schmidt on a Ginibre matrix).

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::density::{DensityMatrix, PureState};
use crate::matrix::ComplexMatrix;
use crate::measures::LocalBasisPair;
use crate::Result;

/// One standard complex Gaussian sample (Box–Muller).
fn standard_complex<R: Rng>(rng: &mut R) -> C64 {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    // Scale so that E[|z|^2] = 1.
    C64::new(radius * angle.cos(), radius * angle.sin()) * 0.5f64.sqrt()
}

/// A matrix of independent standard complex Gaussians.
fn ginibre<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let samples: Vec<C64> = (0..dim * dim).map(|_| standard_complex(rng)).collect();
    ComplexMatrix::from_fn(dim, |i, j| samples[i * dim + j])
}

/// A Haar-random pure state of the given dimension.
pub fn random_pure_state<R: Rng>(rng: &mut R, dim: usize) -> Result<PureState> {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| standard_complex(rng)).collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue; // astronomically unlikely; resample rather than divide by ~0
        }
        let normalized = amps.iter().map(|a| a / norm).collect();
        return PureState::new(normalized);
    }
}

/// A full-rank random density matrix `G G† / tr(G G†)` from a Ginibre
/// sample `G`.
pub fn random_density_matrix<R: Rng>(
    rng: &mut R,
    dims: &[usize],
) -> Result<DensityMatrix> {
    let dim: usize = dims.iter().product();
    let g = ginibre(rng, dim);
    let gram = g.mul(&g.adjoint())?;
    let trace = gram.trace().re;
    DensityMatrix::new(gram.scale(C64::new(1.0 / trace, 0.0)), dims)
}

/// A Haar-random unitary via Gram–Schmidt on a Ginibre matrix (columns).
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    loop {
        let g = ginibre(rng, dim);
        let mut columns: Vec<Vec<C64>> = (0..dim)
            .map(|j| (0..dim).map(|i| g.get(i, j)).collect())
            .collect();
        let mut ok = true;
        for j in 0..dim {
            for k in 0..j {
                let overlap: C64 = columns[k]
                    .iter()
                    .zip(&columns[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for i in 0..dim {
                    let correction = overlap * columns[k][i];
                    columns[j][i] -= correction;
                }
            }
            let norm = columns[j]
                .iter()
                .map(|a| a.norm_sqr())
                .sum::<f64>()
                .sqrt();
            if norm < 1e-8 {
                ok = false; // near-singular draw; retry
                break;
            }
            for entry in &mut columns[j] {
                *entry /= norm;
            }
        }
        if ok {
            return ComplexMatrix::from_fn(dim, |i, j| columns[j][i]);
        }
    }
}

/// A random diagonal (incoherent) state: Dirichlet-like weights from
/// exponential samples.
pub fn random_diagonal_state<R: Rng>(rng: &mut R, dims: &[usize]) -> Result<DensityMatrix> {
    let dim: usize = dims.iter().product();
    let mut weights: Vec<f64> = (0..dim)
        .map(|_| -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    DensityMatrix::new(
        ComplexMatrix::diagonal(&weights.iter().map(|&w| C64::new(w, 0.0)).collect::<Vec<_>>()),
        dims,
    )
}

/// A random two-qubit maximally correlated state `Σ_mn ρ_mn |mm⟩⟨nn|`
/// built from a random single-qubit state.
pub fn random_maximally_correlated<R: Rng>(rng: &mut R) -> Result<DensityMatrix> {
    let seed_state = random_density_matrix(rng, &[2])?;
    let mut matrix = ComplexMatrix::zeros(4);
    for m in 0..2 {
        for n in 0..2 {
            matrix.set(m * 2 + m, n * 2 + n, seed_state.matrix().get(m, n));
        }
    }
    DensityMatrix::new(matrix, &[2, 2])
}

/// A random classically correlated two-qubit state: a random product basis
/// `{|a_i⟩ ⊗ |b_j⟩}` with a random joint probability table.
pub fn random_classically_correlated<R: Rng>(rng: &mut R) -> Result<DensityMatrix> {
    let bases = LocalBasisPair::new(
        rng.gen::<f64>() * std::f64::consts::PI,
        rng.gen::<f64>() * std::f64::consts::TAU,
        rng.gen::<f64>() * std::f64::consts::PI,
        rng.gen::<f64>() * std::f64::consts::TAU,
    );
    let a = bases.basis_a();
    let b = bases.basis_b();
    let mut weights: Vec<f64> = (0..4)
        .map(|_| -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut matrix = ComplexMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let p = weights[i * 2 + j];
            // |a_i⟩⟨a_i| ⊗ |b_j⟩⟨b_j| added with weight p.
            for r1 in 0..2 {
                for c1 in 0..2 {
                    for r2 in 0..2 {
                        for c2 in 0..2 {
                            let term = a.get(r1, i)
                                * a.get(c1, i).conj()
                                * b.get(r2, j)
                                * b.get(c2, j).conj()
                                * p;
                            let row = r1 * 2 + r2;
                            let col = c1 * 2 + c2;
                            matrix.set(row, col, matrix.get(row, col) + term);
                        }
                    }
                }
            }
        }
    }
    DensityMatrix::new(matrix, &[2, 2])
}
