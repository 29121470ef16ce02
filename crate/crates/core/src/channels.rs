//! Unitary gates, Kraus channels, and two-qubit process (chi) matrices.
//!
//! A channel on two qubits is represented in the Pauli product basis
//! `A_m = P_{m/4} ⊗ P_{m%4}` with `P = (I, X, Y, Z)`, ordered
//! `II, IX, IY, IZ, XI, ..., ZZ`: the action is
//! `ρ ↦ Σ_{mn} χ_{mn} A_m ρ A_n†`. Trace preservation fixes the
//! normalization `tr χ = 1`.
//!
//! The entangling gate of the conversion protocol is the generalized CNOT
//! `|m⟩|n⟩ ↦ |m⟩|(m+n) mod d⟩`; its noisy counterpart mixes the ideal
//! process matrix with the fully depolarizing one, calibrated to a target
//! process fidelity.

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::density::DensityMatrix;
use crate::eig::eig_hermitian;
use crate::matrix::{ComplexMatrix, MAX_DIM};
use crate::{tol, Error, Result};

/// A validated unitary operator.
#[derive(Clone, Debug)]
pub struct UnitaryGate {
    matrix: ComplexMatrix,
}

impl UnitaryGate {
    /// Validate and wrap a unitary matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOutOfRange {
                dim,
                min: 1,
                max: MAX_DIM,
            });
        }
        let deviation = matrix.unitarity_deviation();
        if deviation > tol::UNITARY {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Operator dimension.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Conjugate a state: `ρ ↦ U ρ U†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        let out = rho.matrix().conjugate_by(&self.matrix)?;
        DensityMatrix::new(out, rho.dims())
    }
}

/// The generalized CNOT on two `d`-level systems
/// (`|m⟩|n⟩ ↦ |m⟩|(m+n) mod d⟩`), supported for `d` in `2..=4`.
pub fn generalized_cnot(d: usize) -> Result<UnitaryGate> {
    if !(2..=4).contains(&d) {
        return Err(Error::DimensionOutOfRange {
            dim: d,
            min: 2,
            max: 4,
        });
    }
    let mut m = ComplexMatrix::zeros(d * d);
    for ctrl in 0..d {
        for tgt in 0..d {
            let from = ctrl * d + tgt;
            let to = ctrl * d + (ctrl + tgt) % d;
            m.set(to, from, C64::new(1.0, 0.0));
        }
    }
    UnitaryGate::new(m)
}

/// A channel given by explicit Kraus operators `ρ ↦ Σ_k K_k ρ K_k†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Validate a set of Kraus operators: same dimension, and completeness
    /// `Σ K† K = I` within
    /// [`tol::KRAUS_COMPLETENESS`](crate::tol::KRAUS_COMPLETENESS).
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = match operators.first() {
            Some(k) => k.dim(),
            None => {
                return Err(Error::NotTracePreserving { deviation: 1.0 });
            }
        };
        let mut total = ComplexMatrix::zeros(dim);
        for k in &operators {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.dim(),
                });
            }
            total = total.add(&k.adjoint().mul(k)?)?;
        }
        let deviation = total.max_abs_diff(&ComplexMatrix::identity(dim))?;
        if deviation > tol::KRAUS_COMPLETENESS {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self { operators })
    }

    /// The Kraus operators.
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Apply the channel. The output trace (one up to the completeness
    /// tolerance) is renormalized exactly.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let dim = self.operators[0].dim();
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(dim);
        for k in &self.operators {
            out = out.add(&rho.matrix().conjugate_by(k)?)?;
        }
        let trace = out.trace().re;
        let normalized = out.scale(C64::new(1.0 / trace, 0.0));
        DensityMatrix::new(normalized, rho.dims())
    }
}

/// Labels of the two-qubit Pauli products in channel-basis order.
pub const PAULI_LABELS_2Q: [&str; 16] = [
    "II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY",
    "ZZ",
];

/// Single-qubit Pauli operator by index (0 = I, 1 = X, 2 = Y, 3 = Z).
fn pauli_1q(k: usize) -> ComplexMatrix {
    let c = |re: f64, im: f64| C64::new(re, im);
    let rows = match k {
        0 => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        1 => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        2 => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        3 => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        _ => unreachable!("Pauli index is two bits"),
    };
    ComplexMatrix::from_fn(2, |i, j| rows[i][j])
}

/// The sixteen two-qubit Pauli products `A_m = P_{m/4} ⊗ P_{m%4}` in the
/// order of [`PAULI_LABELS_2Q`].
pub fn pauli_basis_2q() -> Vec<ComplexMatrix> {
    (0..16)
        .map(|m| pauli_1q(m / 4).kron(&pauli_1q(m % 4)))
        .collect()
}

/// A two-qubit process matrix in the Pauli product basis.
///
/// Validated at construction: Hermitian, positive semidefinite within
/// [`tol::CHI_PSD`](crate::tol::CHI_PSD), and trace-preserving within
/// [`tol::CHI_TRACE_PRESERVING`](crate::tol::CHI_TRACE_PRESERVING) (which
/// fixes `tr χ = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct ChiMatrix {
    matrix: ComplexMatrix,
}

impl ChiMatrix {
    /// Validate and wrap a 16x16 process matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != 16 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                got: matrix.dim(),
            });
        }
        matrix.check_hermitian()?;
        let eigen = eig_hermitian(&matrix)?;
        let min = eigen.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -tol::CHI_PSD {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        let paulis = pauli_basis_2q();
        let mut total = ComplexMatrix::zeros(4);
        for m in 0..16 {
            for n in 0..16 {
                let chi_mn = matrix.get(m, n);
                if chi_mn.norm() == 0.0 {
                    continue;
                }
                let term = paulis[n].adjoint().mul(&paulis[m])?.scale(chi_mn);
                total = total.add(&term)?;
            }
        }
        let deviation = total.max_abs_diff(&ComplexMatrix::identity(4))?;
        if deviation > tol::CHI_TRACE_PRESERVING {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self {
            matrix: matrix.hermitized(),
        })
    }

    /// The underlying 16x16 matrix.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// The fully depolarizing process `χ = I/16` (output is `I/4` for every
    /// input).
    pub fn depolarizing() -> Self {
        Self::new(ComplexMatrix::identity(16).scale(C64::new(1.0 / 16.0, 0.0)))
            .expect("depolarizing process matrix is valid")
    }

    /// Extract Kraus operators `K_k = sqrt(λ_k) Σ_m v_{km} A_m` from the
    /// eigendecomposition, dropping eigenvalues at or below `1e-12`.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let eigen = eig_hermitian(&self.matrix)?;
        let paulis = pauli_basis_2q();
        let mut operators = Vec::new();
        for (k, &lambda) in eigen.values.iter().enumerate() {
            if lambda <= tol::LOG_FLOOR {
                continue;
            }
            let mut op = ComplexMatrix::zeros(4);
            for (m, pauli) in paulis.iter().enumerate() {
                let coeff = eigen.vectors.get(m, k) * lambda.sqrt();
                op = op.add(&pauli.scale(coeff))?;
            }
            operators.push(op);
        }
        KrausChannel::new(operators)
    }

    /// Apply the process to a two-qubit state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.to_kraus()?.apply(rho)
    }

    /// How far the process strays from mapping incoherent states to
    /// incoherent states: the largest off-diagonal magnitude produced from
    /// any computational basis state.
    pub fn incoherence_deviation(&self) -> Result<f64> {
        let kraus = self.to_kraus()?;
        let mut worst = 0.0f64;
        for k in 0..4 {
            let mut basis_state = ComplexMatrix::zeros(4);
            basis_state.set(k, k, C64::new(1.0, 0.0));
            let input = DensityMatrix::new(basis_state, &[2, 2])?;
            let output = kraus.apply(&input)?;
            worst = worst.max(output.max_offdiagonal());
        }
        Ok(worst)
    }

    /// Serialize to a stable JSON layout: the basis label list followed by
    /// real and imaginary parts as 16x16 row-major arrays. The float
    /// formatting is the shortest decimal that round-trips, so
    /// serialize-parse-serialize is byte-identical.
    pub fn to_json(&self) -> String {
        let fmt_rows = |select: &dyn Fn(C64) -> f64| -> String {
            let rows: Vec<String> = (0..16)
                .map(|i| {
                    let cells: Vec<String> = (0..16)
                        .map(|j| format!("{:e}", select(self.matrix.get(i, j))))
                        .collect();
                    format!("[{}]", cells.join(","))
                })
                .collect();
            rows.join(",\n    ")
        };
        let labels: Vec<String> = PAULI_LABELS_2Q
            .iter()
            .map(|l| format!("\"{l}\""))
            .collect();
        format!(
            "{{\n  \"basis\": [{}],\n  \"re\": [\n    {}\n  ],\n  \"im\": [\n    {}\n  ]\n}}\n",
            labels.join(","),
            fmt_rows(&|z| z.re),
            fmt_rows(&|z| z.im),
        )
    }

    /// Parse the layout produced by [`ChiMatrix::to_json`], re-running full
    /// validation.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        let basis = value
            .get("basis")
            .and_then(|b| b.as_array())
            .ok_or_else(|| Error::Parse("missing \"basis\" array".into()))?;
        let labels: Vec<&str> = basis.iter().filter_map(|v| v.as_str()).collect();
        if labels != PAULI_LABELS_2Q {
            return Err(Error::Parse(format!(
                "unexpected basis order {labels:?}"
            )));
        }
        let grid = |key: &str| -> Result<Vec<Vec<f64>>> {
            let rows = value
                .get(key)
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Parse(format!("missing \"{key}\" array")))?;
            if rows.len() != 16 {
                return Err(Error::Parse(format!(
                    "\"{key}\" has {} rows, expected 16",
                    rows.len()
                )));
            }
            rows.iter()
                .map(|row| {
                    let cells = row
                        .as_array()
                        .ok_or_else(|| Error::Parse(format!("\"{key}\" row is not an array")))?;
                    if cells.len() != 16 {
                        return Err(Error::Parse(format!(
                            "\"{key}\" row has {} cells, expected 16",
                            cells.len()
                        )));
                    }
                    cells
                        .iter()
                        .map(|c| {
                            c.as_f64().ok_or_else(|| {
                                Error::Parse(format!("\"{key}\" cell is not a number"))
                            })
                        })
                        .collect()
                })
                .collect()
        };
        let re = grid("re")?;
        let im = grid("im")?;
        let matrix =
            ComplexMatrix::from_fn(16, |i, j| C64::new(re[i][j], im[i][j]));
        Self::new(matrix)
    }
}

/// Process matrix of a two-qubit Kraus channel: each operator expands as
/// `K_k = Σ_m c_{km} A_m` with `c_{km} = tr(A_m† K_k) / 4`, and
/// `χ = Σ_k c_k c_k†`.
pub fn chi_of_kraus(channel: &KrausChannel) -> Result<ChiMatrix> {
    let dim = channel.operators()[0].dim();
    if dim != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: dim });
    }
    let paulis = pauli_basis_2q();
    let mut matrix = ComplexMatrix::zeros(16);
    for k in channel.operators() {
        let c: Vec<C64> = paulis
            .iter()
            .map(|a| a.adjoint().mul(k).expect("4x4").trace() * 0.25)
            .collect();
        for m in 0..16 {
            for n in 0..16 {
                let v = matrix.get(m, n) + c[m] * c[n].conj();
                matrix.set(m, n, v);
            }
        }
    }
    ChiMatrix::new(matrix)
}

/// Process matrix of a two-qubit unitary: `χ = v v†` with
/// `v_m = tr(A_m† U) / 4`.
pub fn chi_of_unitary(u: &UnitaryGate) -> Result<ChiMatrix> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: u.dim(),
        });
    }
    let paulis = pauli_basis_2q();
    let v: Vec<C64> = paulis
        .iter()
        .map(|a| a.adjoint().mul(u.matrix()).expect("4x4").trace() * 0.25)
        .collect();
    let matrix = ComplexMatrix::from_fn(16, |m, n| v[m] * v[n].conj());
    ChiMatrix::new(matrix)
}

/// The generalized CNOT on two qubits, depolarized to weight `lambda`:
/// `χ(λ) = λ χ_gate + (1-λ) I/16`, i.e.
/// `ρ ↦ λ U ρ U† + (1-λ) I/4`.
pub fn depolarized_cnot(lambda: f64) -> Result<ChiMatrix> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::ParameterOutOfRange {
            name: "lambda",
            value: lambda,
            min: 0.0,
            max: 1.0,
        });
    }
    let ideal = chi_of_unitary(&generalized_cnot(2)?)?;
    let mixed = ideal
        .matrix()
        .scale(C64::new(lambda, 0.0))
        .add(&ComplexMatrix::identity(16).scale(C64::new((1.0 - lambda) / 16.0, 0.0)))?;
    ChiMatrix::new(mixed)
}

/// The depolarization weight at which [`depolarized_cnot`] reaches a target
/// process fidelity against the ideal gate: inverts
/// `F = λ + (1-λ)/16`, valid for targets in `[1/16, 1]`.
pub fn lambda_for_process_fidelity(target: f64) -> Result<f64> {
    let min = 1.0 / 16.0;
    if !(min..=1.0).contains(&target) {
        return Err(Error::ParameterOutOfRange {
            name: "target",
            value: target,
            min,
            max: 1.0,
        });
    }
    Ok((16.0 * target - 1.0) / 15.0)
}

/// Eigenvalue threshold above which a process matrix counts as rank one
/// (i.e. a unitary process) for the fidelity fast path.
const RANK_ONE_THRESHOLD: f64 = 1.0 - 1e-9;

/// Process fidelity between two process matrices, in `[0, 1]`.
///
/// When either argument is rank one (a unitary process) this reduces to the
/// overlap `tr(χ_a χ_b)`; otherwise the general state-fidelity formula is
/// applied to the unit-trace matrices themselves.
pub fn process_fidelity(a: &ChiMatrix, b: &ChiMatrix) -> Result<f64> {
    let top_a = eig_hermitian(a.matrix())?.values[0];
    let top_b = eig_hermitian(b.matrix())?.values[0];
    if top_a >= RANK_ONE_THRESHOLD || top_b >= RANK_ONE_THRESHOLD {
        let overlap = a.matrix().mul(b.matrix())?.trace().re;
        return Ok(overlap.clamp(0.0, 1.0));
    }
    let rho = DensityMatrix::new(a.matrix().clone(), &[16])?;
    let sigma = DensityMatrix::new(b.matrix().clone(), &[16])?;
    crate::density::state_fidelity(&rho, &sigma)
}

/// A gate for the conversion step: either an ideal unitary or a noisy
/// process matrix.
#[derive(Clone, Debug)]
pub enum GateModel {
    /// Ideal unitary evolution.
    Unitary(UnitaryGate),
    /// Noisy evolution through a process matrix.
    Chi(ChiMatrix),
}

impl GateModel {
    /// Dimension of states the gate acts on.
    pub fn dim(&self) -> usize {
        match self {
            GateModel::Unitary(u) => u.dim(),
            GateModel::Chi(_) => 4,
        }
    }

    /// Apply the gate to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            GateModel::Unitary(u) => u.apply(rho),
            GateModel::Chi(chi) => chi.apply(rho),
        }
    }
}

/// A random incoherent unitary: a permutation of the computational basis
/// with uniform random phases, `U = Σ_k e^{iφ_k} |π(k)⟩⟨k|`.
pub fn random_incoherent_unitary(dim: usize, rng: &mut impl Rng) -> Result<UnitaryGate> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::DimensionOutOfRange {
            dim,
            min: 1,
            max: MAX_DIM,
        });
    }
    let mut perm: Vec<usize> = (0..dim).collect();
    // Fisher-Yates driven by the caller's seeded generator.
    for i in (1..dim).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    let mut m = ComplexMatrix::zeros(dim);
    for (k, &target) in perm.iter().enumerate() {
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        m.set(target, k, C64::from_polar(1.0, phase));
    }
    UnitaryGate::new(m)
}

/// A random incoherent channel: a probabilistic mixture of random
/// incoherent unitaries, `K_k = sqrt(p_k) U_k`.
pub fn random_incoherent_channel(
    dim: usize,
    mixture: usize,
    rng: &mut impl Rng,
) -> Result<KrausChannel> {
    if mixture == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "mixture",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    let mut weights: Vec<f64> = (0..mixture).map(|_| -rng.gen::<f64>().ln()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let operators = weights
        .iter()
        .map(|&p| {
            random_incoherent_unitary(dim, rng)
                .map(|u| u.matrix().scale(C64::new(p.sqrt(), 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(operators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{partial_trace, tensor, von_neumann_entropy, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plus_zero() -> DensityMatrix {
        let r = 0.5f64.sqrt();
        PureState::new(vec![c(r, 0.0), c(0.0, 0.0), c(r, 0.0), c(0.0, 0.0)])
            .unwrap()
            .density(&[2, 2])
            .unwrap()
    }

    #[test]
    fn cnot_is_the_expected_permutation() {
        let u = generalized_cnot(2).unwrap();
        let m = u.matrix();
        // Columns: 00->00, 01->01, 10->11, 11->10.
        assert_eq!(m.get(0, 0), c(1.0, 0.0));
        assert_eq!(m.get(1, 1), c(1.0, 0.0));
        assert_eq!(m.get(3, 2), c(1.0, 0.0));
        assert_eq!(m.get(2, 3), c(1.0, 0.0));
        assert_eq!(m.get(2, 2), c(0.0, 0.0));
    }

    #[test]
    fn cnot_entangles_plus_zero_into_bell() {
        let u = generalized_cnot(2).unwrap();
        let out = u.apply(&plus_zero()).unwrap();
        let r = 0.5f64.sqrt();
        let bell = PureState::new(vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)])
            .unwrap()
            .density(&[2, 2])
            .unwrap();
        assert!(out.matrix().max_abs_diff(bell.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn qutrit_gate_builds_maximally_correlated_state() {
        let d = 3;
        let amps = vec![
            c(0.6, 0.0),
            c(0.0, 0.48),
            c(0.64, 0.0),
        ];
        let system = PureState::new(amps.clone()).unwrap();
        let mut ancilla_amps = vec![c(0.0, 0.0); d];
        ancilla_amps[0] = c(1.0, 0.0);
        let ancilla = PureState::new(ancilla_amps).unwrap();
        let joint = PureState::tensor(&system, &ancilla)
            .unwrap()
            .density(&[d, d])
            .unwrap();
        let out = generalized_cnot(d).unwrap().apply(&joint).unwrap();
        // Output should be Σ c_m conj(c_n) |mm><nn|.
        for m in 0..d {
            for n in 0..d {
                let expected = amps[m] * amps[n].conj();
                let got = out.matrix().get(m * d + m, n * d + n);
                assert!((got - expected).norm() < 1e-12);
            }
        }
        let marginal = partial_trace(&out, 0).unwrap();
        for m in 0..d {
            let got = marginal.matrix().get(m, m).re;
            assert!((got - amps[m].norm_sqr()).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_process_matrix_of_cnot() {
        let chi = chi_of_unitary(&generalized_cnot(2).unwrap()).unwrap();
        // Support is {II, IX, ZI, ZX} = indices {0, 1, 12, 13} with
        // coefficients (1/2, 1/2, 1/2, -1/2).
        let expected_support = [(0, 0.5), (1, 0.5), (12, 0.5), (13, -0.5)];
        for &(m, vm) in &expected_support {
            for &(n, vn) in &expected_support {
                let got = chi.matrix().get(m, n);
                assert!((got - c(vm * vn, 0.0)).norm() < 1e-12);
            }
        }
        assert!((chi.matrix().trace().re - 1.0).abs() < 1e-12);
        // All other entries vanish.
        let support: Vec<usize> = expected_support.iter().map(|&(m, _)| m).collect();
        for m in 0..16 {
            for n in 0..16 {
                if !support.contains(&m) || !support.contains(&n) {
                    assert!(chi.matrix().get(m, n).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unitary_process_matrix_reproduces_unitary_action() {
        let u = generalized_cnot(2).unwrap();
        let chi = chi_of_unitary(&u).unwrap();
        let input = plus_zero();
        let direct = u.apply(&input).unwrap();
        let via_chi = chi.apply(&input).unwrap();
        assert!(direct.matrix().max_abs_diff(via_chi.matrix()).unwrap() < 1e-10);
    }

    #[test]
    fn depolarized_gate_mixes_with_white_noise() {
        let lambda = 0.7;
        let chi = depolarized_cnot(lambda).unwrap();
        let input = plus_zero();
        let out = chi.apply(&input).unwrap();
        let ideal = generalized_cnot(2).unwrap().apply(&input).unwrap();
        let expected = ideal
            .matrix()
            .scale(c(lambda, 0.0))
            .add(&ComplexMatrix::identity(4).scale(c((1.0 - lambda) / 4.0, 0.0)))
            .unwrap();
        assert!(out.matrix().max_abs_diff(&expected).unwrap() < 1e-10);
        assert!(depolarized_cnot(1.2).is_err());
    }

    #[test]
    fn process_fidelity_of_depolarized_gate_is_affine_in_lambda() {
        let ideal = chi_of_unitary(&generalized_cnot(2).unwrap()).unwrap();
        assert!((process_fidelity(&ideal, &ideal).unwrap() - 1.0).abs() < 1e-12);
        for lambda in [0.0, 0.5, 0.8] {
            let noisy = depolarized_cnot(lambda).unwrap();
            let expected = lambda + (1.0 - lambda) / 16.0;
            let got = process_fidelity(&ideal, &noisy).unwrap();
            assert!((got - expected).abs() < 1e-12, "lambda={lambda}: {got}");
            let sym = process_fidelity(&noisy, &ideal).unwrap();
            assert!((got - sym).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_calibration_hits_target_fidelity() {
        let target = 0.885;
        let lambda = lambda_for_process_fidelity(target).unwrap();
        let ideal = chi_of_unitary(&generalized_cnot(2).unwrap()).unwrap();
        let noisy = depolarized_cnot(lambda).unwrap();
        let achieved = process_fidelity(&ideal, &noisy).unwrap();
        assert!(
            (achieved - target).abs() < 1e-6,
            "achieved {achieved} for lambda {lambda}"
        );
        assert!(lambda_for_process_fidelity(0.01).is_err());
    }

    #[test]
    fn general_fidelity_branch_handles_two_mixed_processes() {
        let a = depolarized_cnot(0.5).unwrap();
        let b = depolarized_cnot(0.6).unwrap();
        let f_ab = process_fidelity(&a, &b).unwrap();
        let f_ba = process_fidelity(&b, &a).unwrap();
        assert!(f_ab > 0.9 && f_ab <= 1.0);
        assert!((f_ab - f_ba).abs() < 1e-8);
        assert!((process_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn kraus_extraction_preserves_channel_action() {
        let chi = depolarized_cnot(0.85).unwrap();
        let kraus = chi.to_kraus().unwrap();
        let input = plus_zero();
        let via_struct = chi.apply(&input).unwrap();
        let via_kraus = kraus.apply(&input).unwrap();
        assert!(via_struct.matrix().max_abs_diff(via_kraus.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn kraus_and_process_matrix_representations_round_trip() {
        let chi = depolarized_cnot(0.6).unwrap();
        let rebuilt = chi_of_kraus(&chi.to_kraus().unwrap()).unwrap();
        assert!(rebuilt.matrix().max_abs_diff(chi.matrix()).unwrap() < 1e-10);
    }

    #[test]
    fn trace_preservation_is_enforced() {
        let ideal = chi_of_unitary(&generalized_cnot(2).unwrap()).unwrap();
        let halved = ideal.matrix().scale(c(0.5, 0.0));
        assert!(matches!(
            ChiMatrix::new(halved),
            Err(Error::NotTracePreserving { .. })
        ));
        let bad_kraus = vec![ComplexMatrix::identity(2).scale(c(0.5, 0.0))];
        assert!(matches!(
            KrausChannel::new(bad_kraus),
            Err(Error::NotTracePreserving { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let chi = depolarized_cnot(0.87733).unwrap();
        let text = chi.to_json();
        let parsed = ChiMatrix::from_json(&text).unwrap();
        assert_eq!(parsed.matrix(), chi.matrix());
        assert_eq!(parsed.to_json(), text);
        assert!(ChiMatrix::from_json("{}").is_err());
        assert!(ChiMatrix::from_json("not json").is_err());
    }

    #[test]
    fn gate_models_preserve_incoherence_of_basis_states() {
        let chi = depolarized_cnot(0.9).unwrap();
        assert!(chi.incoherence_deviation().unwrap() < 1e-10);
        // A Hadamard on the first qubit creates coherence from |00>.
        let r = 0.5f64.sqrt();
        let hadamard = ComplexMatrix::from_rows(&[
            vec![c(r, 0.0), c(r, 0.0)],
            vec![c(r, 0.0), c(-r, 0.0)],
        ])
        .unwrap();
        let h_gate =
            UnitaryGate::new(hadamard.kron(&ComplexMatrix::identity(2))).unwrap();
        let coherent_chi = chi_of_unitary(&h_gate).unwrap();
        assert!(coherent_chi.incoherence_deviation().unwrap() > 0.4);
    }

    #[test]
    fn random_incoherent_generators_are_valid_and_incoherent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let u = random_incoherent_unitary(4, &mut rng).unwrap();
            assert!(u.matrix().unitarity_deviation() < 1e-12);
            // Permutation-with-phases structure: one entry per column.
            for col in 0..4 {
                let nonzero = (0..4)
                    .filter(|&row| u.matrix().get(row, col).norm() > 1e-12)
                    .count();
                assert_eq!(nonzero, 1);
            }
        }
        let channel = random_incoherent_channel(4, 3, &mut rng).unwrap();
        let diag = ComplexMatrix::diagonal(&[
            c(0.4, 0.0),
            c(0.3, 0.0),
            c(0.2, 0.0),
            c(0.1, 0.0),
        ]);
        let input = DensityMatrix::new(diag, &[2, 2]).unwrap();
        let output = channel.apply(&input).unwrap();
        assert!(output.max_offdiagonal() < 1e-12);
    }

    #[test]
    fn gate_model_dispatch() {
        let input = plus_zero();
        let unitary = GateModel::Unitary(generalized_cnot(2).unwrap());
        let noisy = GateModel::Chi(depolarized_cnot(1.0).unwrap());
        let a = unitary.apply(&input).unwrap();
        let b = noisy.apply(&input).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() < 1e-9);
        assert_eq!(unitary.dim(), 4);
        assert_eq!(noisy.dim(), 4);
    }

    #[test]
    fn depolarizing_process_outputs_maximally_mixed() {
        let chi = ChiMatrix::depolarizing();
        let out = chi.apply(&plus_zero()).unwrap();
        assert!((von_neumann_entropy(&out) - 2.0).abs() < 1e-10);
        let product = tensor(
            &DensityMatrix::maximally_mixed(&[2]).unwrap(),
            &DensityMatrix::maximally_mixed(&[2]).unwrap(),
        )
        .unwrap();
        assert!(out.matrix().max_abs_diff(product.matrix()).unwrap() < 1e-12);
    }
}
