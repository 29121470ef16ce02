//! Validated quantum states and the information-theoretic primitives built
//! on them: entropies, relative entropy, fidelity, partial trace, and
//! dephasing maps.
//!
//! All entropies are in bits. A [`DensityMatrix`] is checked at construction
//! (Hermitian, unit trace, positive semidefinite), so downstream code can
//! rely on those invariants instead of re-validating.

use num_complex::Complex64 as C64;

use crate::eig::{eig_hermitian, sqrt_psd};
use crate::matrix::{kron_vec, vec_norm_sqr, ComplexMatrix, MAX_DIM};
use crate::{tol, Error, Result};

/// A normalized pure state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Build a pure state, requiring unit norm within
    /// [`tol::PURE_NORM`](crate::tol::PURE_NORM).
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIM,
            });
        }
        let deviation = (vec_norm_sqr(&amplitudes).sqrt() - 1.0).abs();
        if deviation > tol::PURE_NORM {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    /// The amplitude vector.
    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Tensor product of two pure states.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        Self::new(kron_vec(&a.amplitudes, &b.amplitudes))
    }

    /// The projector `|ψ⟩⟨ψ|` as a density matrix over the given subsystem
    /// split.
    pub fn density(&self, dims: &[usize]) -> Result<DensityMatrix> {
        let matrix = ComplexMatrix::from_fn(self.dim(), |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        DensityMatrix::new(matrix, dims)
    }
}

/// A density matrix together with its subsystem dimensions.
///
/// Construction validates Hermiticity, unit trace, and positive
/// semidefiniteness; the stored matrix is symmetrized exactly so the diagonal
/// is real.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validate and wrap a matrix as the state of subsystems with the given
    /// dimensions (e.g. `&[2, 2]` for two qubits, `&[2]` for one).
    pub fn new(matrix: ComplexMatrix, dims: &[usize]) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIM,
            });
        }
        if dims.is_empty() || dims.iter().product::<usize>() != dim || dims.contains(&0) {
            return Err(Error::BadSubsystemDims {
                dims: dims.to_vec(),
                dim,
            });
        }
        matrix.check_hermitian()?;
        let trace = matrix.trace();
        let trace_dev = (trace - C64::new(1.0, 0.0)).norm();
        if trace_dev > tol::TRACE {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
            });
        }
        let matrix = matrix.hermitized();
        let eigen = eig_hermitian(&matrix)?;
        let min = eigen.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tol::PSD {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            matrix,
            dims: dims.to_vec(),
        })
    }

    /// The maximally mixed state `I/d` over the given subsystems.
    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIM,
            });
        }
        let matrix = ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        Self::new(matrix, dims)
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian(&self.matrix)
            .expect("validated state is Hermitian")
            .values
    }

    /// Diagonal entries as probabilities (real parts, clamped at zero).
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.matrix.get(i, i).re.max(0.0))
            .collect()
    }

    /// Largest off-diagonal magnitude in the computational basis.
    pub fn max_offdiagonal(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.matrix.get(i, j).norm());
                }
            }
        }
        worst
    }
}

/// Tensor product of two states; subsystem lists concatenate.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let matrix = a.matrix.kron(&b.matrix);
    let dims: Vec<usize> = a.dims.iter().chain(b.dims.iter()).copied().collect();
    DensityMatrix::new(matrix, &dims)
}

/// Trace out one side of a bipartite state, keeping subsystem `keep`
/// (0 or 1).
pub fn partial_trace(rho: &DensityMatrix, keep: usize) -> Result<DensityMatrix> {
    if rho.dims.len() != 2 {
        return Err(Error::NotBipartite {
            count: rho.dims.len(),
        });
    }
    if keep > 1 {
        return Err(Error::InvalidSubsystem {
            index: keep,
            count: 2,
        });
    }
    let (da, db) = (rho.dims[0], rho.dims[1]);
    let matrix = if keep == 0 {
        ComplexMatrix::from_fn(da, |i, j| {
            (0..db).map(|k| rho.matrix.get(i * db + k, j * db + k)).sum()
        })
    } else {
        ComplexMatrix::from_fn(db, |k, l| {
            (0..da).map(|i| rho.matrix.get(i * db + k, i * db + l)).sum()
        })
    };
    DensityMatrix::new(matrix, &[rho.dims[keep]])
}

/// Fully dephase the listed subsystems in the computational basis (pass all
/// subsystem indices to dephase the entire state).
pub fn dephase(rho: &DensityMatrix, subsystems: &[usize]) -> Result<DensityMatrix> {
    check_subsystems(rho, subsystems)?;
    let d = rho.dim();
    let mut matrix = rho.matrix.clone();
    for row in 0..d {
        for col in 0..d {
            if row != col && !same_components(&rho.dims, subsystems, row, col) {
                matrix.set(row, col, C64::new(0.0, 0.0));
            }
        }
    }
    DensityMatrix::new(matrix, &rho.dims)
}

/// Fully dephase the listed subsystems, each in its own orthonormal basis.
///
/// `bases[k]` is a unitary whose *columns* are the basis vectors for
/// subsystem `subsystems[k]`; unlisted subsystems are untouched.
pub fn dephase_in_bases(
    rho: &DensityMatrix,
    subsystems: &[usize],
    bases: &[ComplexMatrix],
) -> Result<DensityMatrix> {
    check_subsystems(rho, subsystems)?;
    if bases.len() != subsystems.len() {
        return Err(Error::DimensionMismatch {
            expected: subsystems.len(),
            got: bases.len(),
        });
    }
    // Assemble the full rotation W = ⊗_k U_k (identity on unlisted
    // subsystems); in the rotated frame the dephasing is computational.
    let mut rotation = ComplexMatrix::identity(1);
    for (s, &ds) in rho.dims.iter().enumerate() {
        let factor = match subsystems.iter().position(|&x| x == s) {
            Some(k) => {
                let basis = &bases[k];
                if basis.dim() != ds {
                    return Err(Error::DimensionMismatch {
                        expected: ds,
                        got: basis.dim(),
                    });
                }
                let deviation = basis.unitarity_deviation();
                if deviation > tol::UNITARY {
                    return Err(Error::NotOrthonormal { deviation });
                }
                basis.clone()
            }
            None => ComplexMatrix::identity(ds),
        };
        rotation = rotation.kron(&factor);
    }
    let rotated = rho.matrix.conjugate_by(&rotation.adjoint())?;
    let mut dephased = rotated;
    let d = rho.dim();
    for row in 0..d {
        for col in 0..d {
            if row != col && !same_components(&rho.dims, subsystems, row, col) {
                dephased.set(row, col, C64::new(0.0, 0.0));
            }
        }
    }
    let back = dephased.conjugate_by(&rotation)?;
    DensityMatrix::new(back, &rho.dims)
}

/// Von Neumann entropy `S(ρ) = -Σ λ log2 λ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.eigenvalues())
}

/// Shannon entropy in bits of a probability vector; entries at or below
/// [`tol::LOG_FLOOR`](crate::tol::LOG_FLOOR) contribute zero.
pub fn shannon_entropy(probabilities: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &p in probabilities {
        if p > tol::LOG_FLOOR {
            acc -= p * p.log2();
        }
    }
    acc.max(0.0)
}

/// Quantum relative entropy `S(ρ || σ)` in bits.
///
/// Returns `f64::INFINITY` when more than
/// [`tol::SUPPORT`](crate::tol::SUPPORT) of ρ's probability mass lies in the
/// kernel of σ.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let sig = eig_hermitian(sigma.matrix()).expect("validated state");
    let d = rho.dim();

    // Weight of ρ on each eigenvector of σ.
    let mut weights = Vec::with_capacity(d);
    for j in 0..d {
        let col: Vec<C64> = (0..d).map(|r| sig.vectors.get(r, j)).collect();
        let w = rho
            .matrix()
            .expectation(&col)
            .expect("dimension checked above")
            .re
            .max(0.0);
        weights.push(w);
    }

    let kernel_mass: f64 = (0..d)
        .filter(|&j| sig.values[j] <= tol::SUPPORT)
        .map(|j| weights[j])
        .sum();
    if kernel_mass > tol::SUPPORT {
        return Ok(f64::INFINITY);
    }

    let mut value = -von_neumann_entropy(rho);
    for j in 0..d {
        if sig.values[j] > tol::LOG_FLOOR && weights[j] > 0.0 {
            value -= weights[j] * sig.values[j].log2();
        }
    }
    Ok(value.max(0.0))
}

/// Eigenvalues of the Uhlmann inner matrix below this fraction of its largest
/// eigenvalue are treated as exact zeros. Without the floor, roundoff turns
/// analytically-zero eigenvalues into values of order 1e-16, and the square
/// root amplifies them into 1e-8-scale errors in the fidelity.
const FIDELITY_RELATIVE_FLOOR: f64 = 1e-13;

/// Uhlmann fidelity `F(ρ, σ) = (tr sqrt(sqrt(ρ) σ sqrt(ρ)))²`, in `[0, 1]`.
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let root = sqrt_psd(rho.matrix())?;
    let inner = root.mul(sigma.matrix())?.mul(&root)?.hermitized();
    let eigen = eig_hermitian(&inner)?;
    let largest = eigen.values.first().copied().unwrap_or(0.0).max(0.0);
    let floor = FIDELITY_RELATIVE_FLOOR * largest;
    let total: f64 = eigen
        .values
        .iter()
        .filter(|&&v| v > floor)
        .map(|&v| v.sqrt())
        .sum();
    Ok((total * total).clamp(0.0, 1.0))
}

fn check_subsystems(rho: &DensityMatrix, subsystems: &[usize]) -> Result<()> {
    let count = rho.dims.len();
    for (i, &s) in subsystems.iter().enumerate() {
        if s >= count {
            return Err(Error::InvalidSubsystem { index: s, count });
        }
        if subsystems[..i].contains(&s) {
            return Err(Error::InvalidSubsystem { index: s, count });
        }
    }
    Ok(())
}

/// Whether flat indices `row` and `col` agree on every subsystem in `subs`.
fn same_components(dims: &[usize], subs: &[usize], row: usize, col: usize) -> bool {
    // Row-major multi-index: component s has stride = product of later dims.
    let mut stride = vec![1usize; dims.len()];
    for s in (0..dims.len().saturating_sub(1)).rev() {
        stride[s] = stride[s + 1] * dims[s + 1];
    }
    subs.iter()
        .all(|&s| (row / stride[s]) % dims[s] == (col / stride[s]) % dims[s])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pure(amps: &[(f64, f64)]) -> PureState {
        PureState::new(amps.iter().map(|&(re, im)| c(re, im)).collect()).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let r = 0.5f64.sqrt();
        pure(&[(r, 0.0), (r, 0.0)]).density(&[2]).unwrap()
    }

    fn bell_state() -> DensityMatrix {
        let r = 0.5f64.sqrt();
        pure(&[(r, 0.0), (0.0, 0.0), (0.0, 0.0), (r, 0.0)])
            .density(&[2, 2])
            .unwrap()
    }

    #[test]
    fn norm_is_enforced() {
        assert!(matches!(
            PureState::new(vec![c(1.0, 0.0), c(0.1, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn trace_and_psd_are_enforced() {
        let double = ComplexMatrix::identity(2);
        assert!(matches!(
            DensityMatrix::new(double, &[2]),
            Err(Error::TraceNotOne { .. })
        ));

        let indefinite = ComplexMatrix::diagonal(&[c(1.5, 0.0), c(-0.5, 0.0)]);
        assert!(matches!(
            DensityMatrix::new(indefinite, &[2]),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn subsystem_dims_must_factor() {
        let m = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        assert!(DensityMatrix::new(m.clone(), &[2, 2]).is_ok());
        assert!(matches!(
            DensityMatrix::new(m, &[2, 3]),
            Err(Error::BadSubsystemDims { .. })
        ));
    }

    #[test]
    fn entropy_reference_points() {
        assert!(von_neumann_entropy(&plus_state()).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(&[2]).unwrap();
        assert!((von_neumann_entropy(&mixed) - 1.0).abs() < 1e-12);
        let mixed2 = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
        assert!((von_neumann_entropy(&mixed2) - 2.0).abs() < 1e-12);

        let skewed =
            DensityMatrix::new(ComplexMatrix::diagonal(&[c(0.8, 0.0), c(0.2, 0.0)]), &[2])
                .unwrap();
        assert!((von_neumann_entropy(&skewed) - 0.7219280948873623).abs() < 1e-12);
    }

    #[test]
    fn tensor_then_partial_trace_recovers_factors() {
        let a = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![c(0.7, 0.0), c(0.2, 0.1)],
                vec![c(0.2, -0.1), c(0.3, 0.0)],
            ])
            .unwrap(),
            &[2],
        )
        .unwrap();
        let b = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![c(0.4, 0.0), c(0.0, -0.2)],
                vec![c(0.0, 0.2), c(0.6, 0.0)],
            ])
            .unwrap(),
            &[2],
        )
        .unwrap();
        let joint = tensor(&a, &b).unwrap();
        assert_eq!(joint.dims(), &[2, 2]);
        let ra = partial_trace(&joint, 0).unwrap();
        let rb = partial_trace(&joint, 1).unwrap();
        assert!(ra.matrix().max_abs_diff(a.matrix()).unwrap() < 1e-12);
        assert!(rb.matrix().max_abs_diff(b.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let bell = bell_state();
        for keep in [0, 1] {
            let marginal = partial_trace(&bell, keep).unwrap();
            let mixed = DensityMatrix::maximally_mixed(&[2]).unwrap();
            assert!(marginal.matrix().max_abs_diff(mixed.matrix()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn dephasing_kills_coherence_and_is_idempotent() {
        let state = plus_state();
        let dephased = dephase(&state, &[0]).unwrap();
        assert!(dephased.max_offdiagonal() < 1e-15);
        assert!((von_neumann_entropy(&dephased) - 1.0).abs() < 1e-12);
        let twice = dephase(&dephased, &[0]).unwrap();
        assert!(twice.matrix().max_abs_diff(dephased.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn dephasing_single_subsystem_of_bell() {
        // Dephasing either half of a Bell state leaves the classically
        // correlated mixture of |00> and |11>.
        let bell = bell_state();
        let dephased = dephase(&bell, &[0]).unwrap();
        let expected = ComplexMatrix::diagonal(&[
            c(0.5, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.5, 0.0),
        ]);
        assert!(dephased.matrix().max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn rotated_dephasing_fixes_its_own_basis() {
        // |+><+| is diagonal in the X basis, so dephasing there is a no-op.
        let r = 0.5f64.sqrt();
        let x_basis = ComplexMatrix::from_rows(&[
            vec![c(r, 0.0), c(r, 0.0)],
            vec![c(r, 0.0), c(-r, 0.0)],
        ])
        .unwrap();
        let state = plus_state();
        let dephased = dephase_in_bases(&state, &[0], &[x_basis]).unwrap();
        assert!(dephased.matrix().max_abs_diff(state.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn rotated_dephasing_with_computational_columns_matches_plain() {
        let bell = bell_state();
        let id = ComplexMatrix::identity(2);
        let a = dephase(&bell, &[0, 1]).unwrap();
        let b = dephase_in_bases(&bell, &[0, 1], &[id.clone(), id]).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn relative_entropy_reference_points() {
        let ground = pure(&[(1.0, 0.0), (0.0, 0.0)]).density(&[2]).unwrap();
        let excited = pure(&[(0.0, 0.0), (1.0, 0.0)]).density(&[2]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(&[2]).unwrap();

        let vs_mixed = relative_entropy(&ground, &mixed).unwrap();
        assert!((vs_mixed - 1.0).abs() < 1e-12);

        let vs_self = relative_entropy(&ground, &ground).unwrap();
        assert!(vs_self.abs() < 1e-10);

        let vs_orthogonal = relative_entropy(&ground, &excited).unwrap();
        assert!(vs_orthogonal.is_infinite());
    }

    #[test]
    fn relative_entropy_is_nonnegative() {
        let a = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![c(0.6, 0.0), c(0.1, 0.2)],
                vec![c(0.1, -0.2), c(0.4, 0.0)],
            ])
            .unwrap(),
            &[2],
        )
        .unwrap();
        let b = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![c(0.5, 0.0), c(-0.2, 0.05)],
                vec![c(-0.2, -0.05), c(0.5, 0.0)],
            ])
            .unwrap(),
            &[2],
        )
        .unwrap();
        assert!(relative_entropy(&a, &b).unwrap() >= 0.0);
        assert!(relative_entropy(&b, &a).unwrap() >= 0.0);
    }

    #[test]
    fn fidelity_reference_points() {
        let ground = pure(&[(1.0, 0.0), (0.0, 0.0)]).density(&[2]).unwrap();
        let excited = pure(&[(0.0, 0.0), (1.0, 0.0)]).density(&[2]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(&[2]).unwrap();

        assert!((state_fidelity(&ground, &ground).unwrap() - 1.0).abs() < 1e-10);
        assert!(state_fidelity(&ground, &excited).unwrap() < 1e-10);
        assert!((state_fidelity(&ground, &mixed).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn fidelity_of_pure_pair_is_overlap() {
        let t: f64 = 0.7;
        let a = pure(&[(t.cos(), 0.0), (t.sin(), 0.0)]).density(&[2]).unwrap();
        let ground = pure(&[(1.0, 0.0), (0.0, 0.0)]).density(&[2]).unwrap();
        let f = state_fidelity(&a, &ground).unwrap();
        assert!((f - t.cos().powi(2)).abs() < 1e-10);
        // Symmetry of the two arguments.
        let g = state_fidelity(&ground, &a).unwrap();
        assert!((f - g).abs() < 1e-8);
    }

    #[test]
    fn invalid_subsystem_requests_are_rejected() {
        let bell = bell_state();
        assert!(matches!(
            partial_trace(&bell, 2),
            Err(Error::InvalidSubsystem { .. })
        ));
        assert!(matches!(
            dephase(&bell, &[0, 0]),
            Err(Error::InvalidSubsystem { .. })
        ));
        let single = plus_state();
        assert!(matches!(
            partial_trace(&single, 0),
            Err(Error::NotBipartite { .. })
        ));
    }
}
