//! Simulated projective tomography of states and processes.
//!
//! States are measured qubit-by-qubit along Pauli axes; the full setting set
//! `{X, Y, Z}^n` is informationally complete. Counts are sampled from Born
//! probabilities with a deterministic per-setting seed, reconstructed first
//! by linear inversion and then refined with an iterative
//! maximum-likelihood fixed point that never decreases the likelihood.
//!
//! Process tomography drives a two-qubit gate with the sixteen products of
//! `{|0⟩, |1⟩, |+⟩, |+i⟩}` probes, reconstructs each output state, and
//! assembles the process matrix in the Pauli product basis, projecting the
//! result back onto the physical (positive, trace-preserving) set.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{chi_of_kraus, pauli_basis_2q, ChiMatrix, GateModel, KrausChannel};
use crate::density::{state_fidelity, DensityMatrix};
use crate::eig::eig_hermitian;
use crate::matrix::{kron_vec, ComplexMatrix};
use crate::{Error, Result};

/// A single-qubit measurement axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliAxis {
    /// Measure along X; outcome 0 is the +1 eigenvector `(|0⟩+|1⟩)/√2`.
    X,
    /// Measure along Y; outcome 0 is the +1 eigenvector `(|0⟩+i|1⟩)/√2`.
    Y,
    /// Measure along Z; outcome 0 is `|0⟩`.
    Z,
}

impl PauliAxis {
    /// One-letter label.
    pub fn label(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    /// Parse a one-letter label.
    pub fn parse(c: char) -> Result<Self> {
        match c {
            'X' => Ok(PauliAxis::X),
            'Y' => Ok(PauliAxis::Y),
            'Z' => Ok(PauliAxis::Z),
            other => Err(Error::Parse(format!("unknown measurement axis '{other}'"))),
        }
    }

    /// Eigenvectors by outcome bit; bit 0 is the +1 eigenvector.
    fn eigenvectors(self) -> [[C64; 2]; 2] {
        let r = 0.5f64.sqrt();
        let c = C64::new;
        match self {
            PauliAxis::X => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
            PauliAxis::Y => [[c(r, 0.0), c(0.0, r)], [c(r, 0.0), c(0.0, -r)]],
            PauliAxis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        }
    }
}

/// One measurement setting: an axis per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementSetting {
    axes: Vec<PauliAxis>,
}

impl MeasurementSetting {
    /// Build a setting from per-qubit axes (one to four qubits).
    pub fn new(axes: Vec<PauliAxis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 4 {
            return Err(Error::DimensionOutOfRange {
                dim: axes.len(),
                min: 1,
                max: 4,
            });
        }
        Ok(Self { axes })
    }

    /// Parse from a label like `"XY"`.
    pub fn parse(label: &str) -> Result<Self> {
        let axes = label
            .chars()
            .map(PauliAxis::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    /// Label like `"XY"`.
    pub fn label(&self) -> String {
        self.axes.iter().map(|a| a.label()).collect()
    }

    /// Number of qubits measured.
    pub fn qubits(&self) -> usize {
        self.axes.len()
    }

    /// Per-qubit axes.
    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    /// The product eigenvector for an outcome index. Bit `(n-1-i)` of the
    /// index is qubit `i`'s outcome, matching row-major tensor layout.
    fn outcome_vector(&self, outcome: usize) -> Vec<C64> {
        let n = self.axes.len();
        let mut v = vec![C64::new(1.0, 0.0)];
        for (i, axis) in self.axes.iter().enumerate() {
            let bit = (outcome >> (n - 1 - i)) & 1;
            v = kron_vec(&v, &axis.eigenvectors()[bit]);
        }
        v
    }
}

/// All `3^n` settings over `n` qubits, lexicographic in `X < Y < Z`.
pub fn all_settings(qubits: usize) -> Vec<MeasurementSetting> {
    let axes = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
    let total = 3usize.pow(qubits as u32);
    (0..total)
        .map(|mut code| {
            let mut setting = vec![PauliAxis::X; qubits];
            for slot in (0..qubits).rev() {
                setting[slot] = axes[code % 3];
                code /= 3;
            }
            MeasurementSetting { axes: setting }
        })
        .collect()
}

/// Measured (or simulated) counts for one setting.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    /// The measurement setting.
    pub setting: MeasurementSetting,
    /// One count per outcome index (`2^n` entries).
    pub counts: Vec<u64>,
}

impl CountRecord {
    /// Validate outcome-count length against the setting.
    pub fn new(setting: MeasurementSetting, counts: Vec<u64>) -> Result<Self> {
        let expected = 1usize << setting.qubits();
        if counts.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: counts.len(),
            });
        }
        Ok(Self { setting, counts })
    }

    /// Total shots for this setting.
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Knobs for simulated tomography and reconstruction.
#[derive(Clone, Debug)]
pub struct TomographyConfig {
    /// Shots per measurement setting.
    pub shots_per_setting: u64,
    /// Base seed; each setting derives an independent stream from it.
    pub seed: u64,
    /// Iteration cap for the likelihood fixed point.
    pub mle_max_iter: usize,
    /// Relative log-likelihood change at which iteration stops.
    pub mle_tol: f64,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            shots_per_setting: 10_000,
            seed: 0,
            mle_max_iter: 500,
            mle_tol: 1e-10,
        }
    }
}

/// Mix a base seed with a stream index into an independent 64-bit seed
/// (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Born probabilities of every outcome of `setting` on `rho` (all-qubit
/// states only).
pub fn born_probabilities(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<Vec<f64>> {
    if rho.dims().iter().any(|&d| d != 2) || rho.dims().len() != setting.qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << setting.qubits(),
            got: rho.dim(),
        });
    }
    let outcomes = 1usize << setting.qubits();
    let mut probabilities = Vec::with_capacity(outcomes);
    for outcome in 0..outcomes {
        let v = setting.outcome_vector(outcome);
        let p = rho.matrix().expectation(&v)?.re.max(0.0);
        probabilities.push(p);
    }
    Ok(probabilities)
}

/// Simulate counts for each setting by sampling Born probabilities.
///
/// Setting `i` uses the seed `derive_seed(config.seed, i)`, so results are
/// reproducible and independent of evaluation order.
pub fn simulate_counts(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    config: &TomographyConfig,
) -> Result<Vec<CountRecord>> {
    simulate_counts_indexed(rho, settings, config, 0)
}

/// As [`simulate_counts`], with the seed-stream index offset by
/// `base_index`; used when several states share one base seed.
fn simulate_counts_indexed(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    config: &TomographyConfig,
    base_index: u64,
) -> Result<Vec<CountRecord>> {
    settings
        .par_iter()
        .enumerate()
        .map(|(i, setting)| {
            let probabilities = born_probabilities(rho, setting)?;
            let mut cumulative = Vec::with_capacity(probabilities.len());
            let mut acc = 0.0;
            for &p in &probabilities {
                acc += p;
                cumulative.push(acc);
            }
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(config.seed, base_index + i as u64));
            let mut counts = vec![0u64; probabilities.len()];
            for _ in 0..config.shots_per_setting {
                let u: f64 = rng.gen();
                let slot = cumulative
                    .iter()
                    .position(|&edge| u < edge)
                    .unwrap_or(probabilities.len() - 1);
                counts[slot] += 1;
            }
            CountRecord::new(setting.clone(), counts)
        })
        .collect()
}

/// Noise-free counts: Born probabilities scaled to `shots` and rounded,
/// with the rounding remainder absorbed into the largest count.
pub fn analytic_counts(
    rho: &DensityMatrix,
    settings: &[MeasurementSetting],
    shots: u64,
) -> Result<Vec<CountRecord>> {
    settings
        .iter()
        .map(|setting| {
            let probabilities = born_probabilities(rho, setting)?;
            let mut counts: Vec<i64> = probabilities
                .iter()
                .map(|p| (p * shots as f64).round() as i64)
                .collect();
            let total: i64 = counts.iter().sum();
            let largest = (0..counts.len())
                .max_by_key(|&i| counts[i])
                .expect("at least one outcome");
            counts[largest] += shots as i64 - total;
            if counts.iter().any(|&c| c < 0) {
                return Err(Error::Parse(
                    "analytic counts rounded below zero".into(),
                ));
            }
            CountRecord::new(setting.clone(), counts.iter().map(|&c| c as u64).collect())
        })
        .collect()
}

/// Check that `records` cover the complete `{X,Y,Z}^n` set for a single
/// qubit count, and return that count.
fn complete_qubit_count(records: &[CountRecord]) -> Result<usize> {
    let n = match records.first() {
        Some(r) => r.setting.qubits(),
        None => {
            return Err(Error::IncompleteRecords {
                details: "no records".into(),
            })
        }
    };
    for r in records {
        if r.setting.qubits() != n {
            return Err(Error::IncompleteRecords {
                details: format!(
                    "mixed qubit counts: {} and {}",
                    n,
                    r.setting.qubits()
                ),
            });
        }
        if r.shots() == 0 {
            return Err(Error::IncompleteRecords {
                details: format!("setting {} has zero shots", r.setting.label()),
            });
        }
    }
    for required in all_settings(n) {
        if !records.iter().any(|r| r.setting == required) {
            return Err(Error::IncompleteRecords {
                details: format!("missing setting {}", required.label()),
            });
        }
    }
    Ok(n)
}

/// Estimate `⟨P⟩` for every Pauli product (identity factors allowed) by
/// averaging outcome signs over all compatible settings, then invert:
/// `ρ = 2^{-n} Σ_P ⟨P⟩ P`. The result is Hermitian with unit trace but may
/// have small negative eigenvalues.
pub fn linear_inversion(records: &[CountRecord]) -> Result<ComplexMatrix> {
    let n = complete_qubit_count(records)?;
    let dim = 1usize << n;
    // Pauli products indexed base-4 per qubit: 0 = I, else the axis.
    let axis_of = |digit: usize| match digit {
        1 => PauliAxis::X,
        2 => PauliAxis::Y,
        _ => PauliAxis::Z,
    };
    let single = |axis: Option<PauliAxis>| -> ComplexMatrix {
        let c = C64::new;
        let rows = match axis {
            None => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            Some(PauliAxis::X) => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Some(PauliAxis::Y) => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
            Some(PauliAxis::Z) => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        };
        ComplexMatrix::from_fn(2, |i, j| rows[i][j])
    };

    let mut rho = ComplexMatrix::zeros(dim);
    for code in 0..4usize.pow(n as u32) {
        // Decode the product: per-qubit digit, qubit 0 most significant.
        let digits: Vec<usize> = (0..n)
            .rev()
            .scan(code, |rest, _| {
                let d = *rest % 4;
                *rest /= 4;
                Some(d)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();

        // Average the sign observable over every compatible record.
        let mut total_sign = 0.0;
        let mut total_shots = 0u64;
        for record in records {
            let compatible = digits
                .iter()
                .zip(record.setting.axes())
                .all(|(&d, &axis)| d == 0 || axis_of(d) == axis);
            if !compatible {
                continue;
            }
            let shots = record.shots();
            for (outcome, &count) in record.counts.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let mut sign = 1.0;
                for (i, &d) in digits.iter().enumerate() {
                    if d != 0 && (outcome >> (n - 1 - i)) & 1 == 1 {
                        sign = -sign;
                    }
                }
                total_sign += sign * count as f64;
            }
            total_shots += shots;
        }
        let expectation = total_sign / total_shots as f64;

        let mut pauli = ComplexMatrix::identity(1);
        for &d in &digits {
            let factor = if d == 0 { None } else { Some(axis_of(d)) };
            pauli = pauli.kron(&single(factor));
        }
        rho = rho.add(&pauli.scale(C64::new(expectation / dim as f64, 0.0)))?;
    }
    Ok(rho)
}

/// Result of the maximum-likelihood reconstruction.
#[derive(Clone, Debug)]
pub struct MleResult {
    /// The reconstructed physical state.
    pub state: DensityMatrix,
    /// Log-likelihood after the initial state and each accepted iterate;
    /// non-decreasing by construction.
    pub log_likelihood: Vec<f64>,
    /// Accepted iterations.
    pub iterations: usize,
    /// Whether the stop criterion was met before the iteration cap.
    pub converged: bool,
}

/// Maximum-likelihood state reconstruction via the `R ρ R` fixed point,
/// started from positivity-clipped linear inversion.
///
/// Full steps that would decrease the likelihood fall back to diluted steps
/// `(I + εR) ρ (I + εR)` with `ε` halved until the likelihood improves, so
/// the reported log-likelihood trace is monotone.
pub fn mle_state(records: &[CountRecord], config: &TomographyConfig) -> Result<MleResult> {
    let n = complete_qubit_count(records)?;
    let dim = 1usize << n;

    // Projectors and counts, flattened once.
    struct Term {
        count: f64,
        projector: ComplexMatrix,
    }
    let mut terms: Vec<Term> = Vec::new();
    for record in records {
        for (outcome, &count) in record.counts.iter().enumerate() {
            let v = record.setting.outcome_vector(outcome);
            let projector = ComplexMatrix::from_fn(dim, |i, j| v[i] * v[j].conj());
            terms.push(Term {
                count: count as f64,
                projector,
            });
        }
    }

    const PROBABILITY_FLOOR: f64 = 1e-12;
    let log_likelihood = |rho: &ComplexMatrix| -> f64 {
        terms
            .iter()
            .filter(|t| t.count > 0.0)
            .map(|t| {
                let p = t
                    .projector
                    .mul(rho)
                    .expect("same dimension")
                    .trace()
                    .re
                    .max(1e-300);
                t.count * p.ln()
            })
            .sum()
    };
    let r_operator = |rho: &ComplexMatrix| -> ComplexMatrix {
        let mut r = ComplexMatrix::zeros(dim);
        for t in &terms {
            if t.count == 0.0 {
                continue;
            }
            let p = t
                .projector
                .mul(rho)
                .expect("same dimension")
                .trace()
                .re
                .max(PROBABILITY_FLOOR);
            r = r
                .add(&t.projector.scale(C64::new(t.count / p, 0.0)))
                .expect("same dimension");
        }
        r
    };
    let normalize = |m: ComplexMatrix| -> ComplexMatrix {
        let trace = m.trace().re;
        m.scale(C64::new(1.0 / trace, 0.0)).hermitized()
    };

    // Initial state: linear inversion, clipped to the physical set, with a
    // whisper of the maximally mixed state so every outcome has positive
    // probability.
    let inverted = linear_inversion(records)?;
    let eigen = eig_hermitian(&inverted.hermitized())?;
    let mut clipped = ComplexMatrix::zeros(dim);
    for (k, &value) in eigen.values.iter().enumerate() {
        if value <= 0.0 {
            continue;
        }
        for i in 0..dim {
            for j in 0..dim {
                let add = eigen.vectors.get(i, k)
                    * value
                    * eigen.vectors.get(j, k).conj();
                clipped.set(i, j, clipped.get(i, j) + add);
            }
        }
    }
    if clipped.trace().re <= 0.0 {
        clipped = ComplexMatrix::identity(dim);
    }
    let mixer = ComplexMatrix::identity(dim).scale(C64::new(1e-10 / dim as f64, 0.0));
    let mut rho = normalize(clipped.scale(C64::new(1.0 - 1e-10, 0.0)).add(&mixer)?);

    let mut ll = log_likelihood(&rho);
    let mut trace = vec![ll];
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..config.mle_max_iter {
        let r = r_operator(&rho);
        let full = normalize(r.mul(&rho).and_then(|m| m.mul(&r))?);
        let full_ll = log_likelihood(&full);

        let (next, next_ll) = if full_ll >= ll {
            (full, full_ll)
        } else {
            // Diluted fallback; ε halves until the likelihood stops
            // decreasing. The scale-invariant form uses R normalized by its
            // largest diagonal entry.
            let r_scale = (0..dim).map(|i| r.get(i, i).re).fold(1.0, f64::max);
            let mut epsilon = 1.0 / r_scale;
            let mut accepted = None;
            for _ in 0..60 {
                let step = ComplexMatrix::identity(dim)
                    .add(&r.scale(C64::new(epsilon, 0.0)))?;
                let candidate = normalize(rho.conjugate_by(&step)?);
                let candidate_ll = log_likelihood(&candidate);
                if candidate_ll >= ll {
                    accepted = Some((candidate, candidate_ll));
                    break;
                }
                epsilon *= 0.5;
            }
            match accepted {
                Some(pair) => pair,
                // No step improves: we are at a fixed point.
                None => {
                    converged = true;
                    break;
                }
            }
        };

        let improvement = next_ll - ll;
        rho = next;
        ll = next_ll;
        trace.push(ll);
        iterations += 1;
        if improvement.abs() <= config.mle_tol * ll.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    Ok(MleResult {
        state: DensityMatrix::new(rho, &vec![2; n])?,
        log_likelihood: trace,
        iterations,
        converged,
    })
}

/// The four single-qubit probe states `|0⟩, |1⟩, |+⟩, |+i⟩` used by process
/// tomography, as amplitude pairs.
fn probe_kets() -> [[C64; 2]; 4] {
    let r = 0.5f64.sqrt();
    let c = C64::new;
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(r, 0.0), c(r, 0.0)],
        [c(r, 0.0), c(0.0, r)],
    ]
}

/// Coefficients expressing the single-qubit matrix unit `E_ij = |i⟩⟨j|`
/// over the probe projectors, in probe order.
fn unit_decomposition(i: usize, j: usize) -> [C64; 4] {
    let c = C64::new;
    match (i, j) {
        (0, 0) => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        (1, 1) => [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        (0, 1) => [
            c(-0.5, -0.5),
            c(-0.5, -0.5),
            c(1.0, 0.0),
            c(0.0, 1.0),
        ],
        (1, 0) => [
            c(-0.5, 0.5),
            c(-0.5, 0.5),
            c(1.0, 0.0),
            c(0.0, -1.0),
        ],
        _ => unreachable!("qubit indices"),
    }
}

/// Reconstruct a two-qubit process matrix by state tomography of the gate's
/// response to all sixteen probe products, sampling counts with
/// `config.shots_per_setting` shots per setting.
pub fn qpt(gate: &GateModel, config: &TomographyConfig) -> Result<ChiMatrix> {
    qpt_impl(gate, config, false)
}

/// As [`qpt`] but with noise-free rounded counts; useful as a sampling-free
/// reference.
pub fn qpt_analytic(gate: &GateModel, shots: u64) -> Result<ChiMatrix> {
    let config = TomographyConfig {
        shots_per_setting: shots,
        ..TomographyConfig::default()
    };
    qpt_impl(gate, &config, true)
}

fn qpt_impl(gate: &GateModel, config: &TomographyConfig, analytic: bool) -> Result<ChiMatrix> {
    if gate.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: gate.dim(),
        });
    }
    let kets = probe_kets();
    let settings = all_settings(2);

    // Tomograph the gate output for each probe product.
    let mut outputs: Vec<DensityMatrix> = Vec::with_capacity(16);
    for p1 in 0..4 {
        for p2 in 0..4 {
            let amps = kron_vec(&kets[p1], &kets[p2]);
            let probe = crate::density::PureState::new(amps)?.density(&[2, 2])?;
            let response = gate.apply(&probe)?;
            let probe_index = (p1 * 4 + p2) as u64;
            let records = if analytic {
                analytic_counts(&response, &settings, config.shots_per_setting)?
            } else {
                simulate_counts_indexed(
                    &response,
                    &settings,
                    config,
                    probe_index * settings.len() as u64,
                )?
            };
            outputs.push(mle_state(&records, config)?.state);
        }
    }

    // Response to each matrix unit E_{i1 j1} ⊗ E_{i2 j2} by linearity.
    let unit_response = |i: usize, j: usize| -> ComplexMatrix {
        let (i1, i2) = (i / 2, i % 2);
        let (j1, j2) = (j / 2, j % 2);
        let gamma1 = unit_decomposition(i1, j1);
        let gamma2 = unit_decomposition(i2, j2);
        let mut out = ComplexMatrix::zeros(4);
        for q1 in 0..4 {
            for q2 in 0..4 {
                let weight = gamma1[q1] * gamma2[q2];
                if weight.norm() == 0.0 {
                    continue;
                }
                out = out
                    .add(&outputs[q1 * 4 + q2].matrix().scale(weight))
                    .expect("4x4");
            }
        }
        out
    };

    // Block matrix J = Σ_ij |i⟩⟨j| ⊗ ε(E_ij), then χ_mn = w_m† J w_n / 16
    // with w_m = Σ_i |i⟩ ⊗ A_m |i⟩.
    let mut j_matrix = ComplexMatrix::zeros(16);
    for i in 0..4 {
        for j in 0..4 {
            let block = unit_response(i, j);
            for r in 0..4 {
                for col in 0..4 {
                    j_matrix.set(i * 4 + r, j * 4 + col, block.get(r, col));
                }
            }
        }
    }
    let paulis = pauli_basis_2q();
    let w: Vec<Vec<C64>> = paulis
        .iter()
        .map(|a| {
            let mut v = vec![C64::new(0.0, 0.0); 16];
            for i in 0..4 {
                for k in 0..4 {
                    v[i * 4 + k] = a.get(k, i);
                }
            }
            v
        })
        .collect();
    let raw_chi = ComplexMatrix::from_fn(16, |m, n| {
        let jw = j_matrix.mul_vec(&w[n]).expect("16-vector");
        let acc: C64 = w[m].iter().zip(&jw).map(|(a, b)| a.conj() * b).sum();
        acc / 16.0
    })
    .hermitized();

    // Project onto the physical set: clip negative eigenvalues, then restore
    // exact trace preservation by normalizing the Kraus completeness sum
    // (K_k ← K_k S^{-1/2} with S = Σ K†K).
    let eigen = eig_hermitian(&raw_chi)?;
    let mut kraus_ops: Vec<ComplexMatrix> = Vec::new();
    for (k, &value) in eigen.values.iter().enumerate() {
        if value <= 1e-12 {
            continue;
        }
        let mut op = ComplexMatrix::zeros(4);
        for (m, pauli) in paulis.iter().enumerate() {
            op = op
                .add(&pauli.scale(eigen.vectors.get(m, k) * value.sqrt()))
                .expect("4x4");
        }
        kraus_ops.push(op);
    }
    let mut completeness = ComplexMatrix::zeros(4);
    for op in &kraus_ops {
        completeness = completeness.add(&op.adjoint().mul(op)?)?;
    }
    let s_eigen = eig_hermitian(&completeness.hermitized())?;
    let inv_root = ComplexMatrix::from_fn(4, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..4 {
            let value = s_eigen.values[k].max(1e-12);
            acc += s_eigen.vectors.get(i, k)
                * (1.0 / value.sqrt())
                * s_eigen.vectors.get(j, k).conj();
        }
        acc
    });
    let corrected: Vec<ComplexMatrix> = kraus_ops
        .iter()
        .map(|op| op.mul(&inv_root).expect("4x4"))
        .collect();
    chi_of_kraus(&KrausChannel::new(corrected)?)
}

/// Serialize count records to CSV (`setting,outcome,count,shots`, LF
/// endings); `shots` repeats the setting's total on every row.
pub fn counts_to_csv(records: &[CountRecord]) -> String {
    let mut out = String::from("setting,outcome,count,shots\n");
    for record in records {
        let label = record.setting.label();
        let shots = record.shots();
        for (outcome, &count) in record.counts.iter().enumerate() {
            out.push_str(&format!("{label},{outcome},{count},{shots}\n"));
        }
    }
    out
}

/// Parse the CSV layout produced by [`counts_to_csv`], verifying that the
/// per-row `shots` totals are consistent with the counts.
pub fn counts_from_csv(text: &str) -> Result<Vec<CountRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("setting,outcome,count,shots") => {}
        other => {
            return Err(Error::Parse(format!(
                "expected counts header, got {other:?}"
            )))
        }
    }
    let mut order: Vec<MeasurementSetting> = Vec::new();
    let mut counts: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut declared_shots: Vec<u64> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!(
                "line {}: expected 4 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let setting = MeasurementSetting::parse(fields[0])?;
        let outcome: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad outcome", lineno + 2)))?;
        let count: u64 = fields[2]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad count", lineno + 2)))?;
        let shots: u64 = fields[3]
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad shot total", lineno + 2)))?;
        let slot = match order.iter().position(|s| *s == setting) {
            Some(i) => i,
            None => {
                order.push(setting);
                counts.push(Vec::new());
                declared_shots.push(shots);
                order.len() - 1
            }
        };
        if declared_shots[slot] != shots {
            return Err(Error::Parse(format!(
                "setting {}: inconsistent shot totals {} and {}",
                fields[0], declared_shots[slot], shots
            )));
        }
        counts[slot].push((outcome, count));
    }
    order
        .into_iter()
        .zip(counts)
        .zip(declared_shots)
        .map(|((setting, mut pairs), shots)| {
            pairs.sort_by_key(|&(outcome, _)| outcome);
            let expected = 1usize << setting.qubits();
            let indices: Vec<usize> = pairs.iter().map(|&(o, _)| o).collect();
            if indices != (0..expected).collect::<Vec<_>>() {
                return Err(Error::Parse(format!(
                    "setting {}: outcomes {:?} incomplete or duplicated",
                    setting.label(),
                    indices
                )));
            }
            let total: u64 = pairs.iter().map(|&(_, c)| c).sum();
            if total != shots {
                return Err(Error::Parse(format!(
                    "setting {}: counts sum to {total} but shots column says {shots}",
                    setting.label()
                )));
            }
            CountRecord::new(setting, pairs.into_iter().map(|(_, c)| c).collect())
        })
        .collect()
}

/// Convenience wrapper: simulate, reconstruct, and compare to the true
/// state; returns the reconstruction fidelity.
pub fn reconstruction_fidelity(
    rho: &DensityMatrix,
    config: &TomographyConfig,
) -> Result<f64> {
    let settings = all_settings(rho.dims().len());
    let records = simulate_counts(rho, &settings, config)?;
    let result = mle_state(&records, config)?;
    state_fidelity(&result.state, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{chi_of_unitary, depolarized_cnot, generalized_cnot, process_fidelity};
    use crate::density::PureState;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fixed_single_qubit_state() -> DensityMatrix {
        DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![c(0.65, 0.0), c(0.2, -0.15)],
                vec![c(0.2, 0.15), c(0.35, 0.0)],
            ])
            .unwrap(),
            &[2],
        )
        .unwrap()
    }

    #[test]
    fn settings_enumerate_lexicographically() {
        let labels: Vec<String> = all_settings(2).iter().map(|s| s.label()).collect();
        assert_eq!(labels.len(), 9);
        assert_eq!(labels[0], "XX");
        assert_eq!(labels[1], "XY");
        assert_eq!(labels[4], "YY");
        assert_eq!(labels[8], "ZZ");
        assert_eq!(MeasurementSetting::parse("ZX").unwrap().label(), "ZX");
        assert!(MeasurementSetting::parse("QA").is_err());
    }

    #[test]
    fn born_probabilities_reference_points() {
        let ground = PureState::new(vec![c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap()
            .density(&[2])
            .unwrap();
        let z = MeasurementSetting::parse("Z").unwrap();
        let x = MeasurementSetting::parse("X").unwrap();
        assert_eq!(born_probabilities(&ground, &z).unwrap(), vec![1.0, 0.0]);
        let px = born_probabilities(&ground, &x).unwrap();
        assert!((px[0] - 0.5).abs() < 1e-12 && (px[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sampled_counts_are_deterministic_per_seed() {
        let rho = fixed_single_qubit_state();
        let settings = all_settings(1);
        let config = TomographyConfig {
            shots_per_setting: 2000,
            seed: 11,
            ..TomographyConfig::default()
        };
        let a = simulate_counts(&rho, &settings, &config).unwrap();
        let b = simulate_counts(&rho, &settings, &config).unwrap();
        assert_eq!(a, b);
        for record in &a {
            assert_eq!(record.shots(), 2000);
        }
        let other = simulate_counts(
            &rho,
            &settings,
            &TomographyConfig {
                seed: 12,
                ..config
            },
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn analytic_counts_match_probabilities() {
        let r = 0.5f64.sqrt();
        let plus = PureState::new(vec![c(r, 0.0), c(r, 0.0)])
            .unwrap()
            .density(&[2])
            .unwrap();
        let records = analytic_counts(&plus, &all_settings(1), 1000).unwrap();
        // X: all shots land on outcome 0; Z: an even split.
        assert_eq!(records[0].counts, vec![1000, 0]);
        assert_eq!(records[2].counts, vec![500, 500]);
    }

    #[test]
    fn linear_inversion_recovers_state_from_exact_counts() {
        let rho = fixed_single_qubit_state();
        let records = analytic_counts(&rho, &all_settings(1), 1_000_000_000_000).unwrap();
        let recovered = linear_inversion(&records).unwrap();
        assert!(recovered.max_abs_diff(rho.matrix()).unwrap() < 1e-9);
    }

    #[test]
    fn mle_recovers_state_from_exact_counts() {
        let rho = fixed_single_qubit_state();
        let records = analytic_counts(&rho, &all_settings(1), 1_000_000_000_000).unwrap();
        let result = mle_state(&records, &TomographyConfig::default()).unwrap();
        assert!(result.converged);
        let fidelity = state_fidelity(&result.state, &rho).unwrap();
        assert!(fidelity > 1.0 - 1e-8, "fidelity {fidelity}");
        // Monotone log-likelihood trace.
        for pair in result.log_likelihood.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-9);
        }
    }

    #[test]
    fn mle_handles_rank_deficient_truth() {
        let r = 0.5f64.sqrt();
        let plus = PureState::new(vec![c(r, 0.0), c(r, 0.0)])
            .unwrap()
            .density(&[2])
            .unwrap();
        let records = analytic_counts(&plus, &all_settings(1), 1_000_000).unwrap();
        let result = mle_state(&records, &TomographyConfig::default()).unwrap();
        let fidelity = state_fidelity(&result.state, &plus).unwrap();
        assert!(fidelity > 1.0 - 1e-6, "fidelity {fidelity}");
    }

    #[test]
    fn mle_from_sampled_counts_is_accurate() {
        let rho = fixed_single_qubit_state();
        let config = TomographyConfig {
            seed: 5,
            ..TomographyConfig::default()
        };
        let fidelity = reconstruction_fidelity(&rho, &config).unwrap();
        assert!(fidelity > 0.98, "fidelity {fidelity}");
    }

    #[test]
    fn incomplete_records_are_rejected() {
        let rho = fixed_single_qubit_state();
        let mut records = analytic_counts(&rho, &all_settings(1), 1000).unwrap();
        records.pop();
        assert!(matches!(
            mle_state(&records, &TomographyConfig::default()),
            Err(Error::IncompleteRecords { .. })
        ));
        assert!(matches!(
            linear_inversion(&[]),
            Err(Error::IncompleteRecords { .. })
        ));
    }

    #[test]
    fn counts_csv_round_trip() {
        let rho = fixed_single_qubit_state();
        let records = simulate_counts(
            &rho,
            &all_settings(1),
            &TomographyConfig {
                shots_per_setting: 500,
                seed: 3,
                ..TomographyConfig::default()
            },
        )
        .unwrap();
        let text = counts_to_csv(&records);
        assert!(text.starts_with("setting,outcome,count,shots\n"));
        let parsed = counts_from_csv(&text).unwrap();
        assert_eq!(parsed, records);
        assert!(counts_from_csv("bogus\n").is_err());
        // Missing outcome rows.
        assert!(counts_from_csv("setting,outcome,count,shots\nZ,0,10,10\n").is_err());
        // Shot total disagrees with the counts.
        assert!(counts_from_csv(
            "setting,outcome,count,shots\nZ,0,10,30\nZ,1,10,30\n"
        )
        .is_err());
    }

    #[test]
    fn process_tomography_of_ideal_gate_is_nearly_exact() {
        let gate = GateModel::Unitary(generalized_cnot(2).unwrap());
        let reference = chi_of_unitary(&generalized_cnot(2).unwrap()).unwrap();
        let reconstructed = qpt_analytic(&gate, 1_000_000_000_000).unwrap();
        let fidelity = process_fidelity(&reference, &reconstructed).unwrap();
        assert!(fidelity > 1.0 - 1e-6, "fidelity {fidelity}");
    }

    #[test]
    fn process_tomography_of_noisy_gate_recovers_fidelity() {
        let lambda = 0.87733;
        let gate = GateModel::Chi(depolarized_cnot(lambda).unwrap());
        let reference = chi_of_unitary(&generalized_cnot(2).unwrap()).unwrap();
        let config = TomographyConfig {
            seed: 7,
            ..TomographyConfig::default()
        };
        let reconstructed = qpt(&gate, &config).unwrap();
        let fidelity = process_fidelity(&reference, &reconstructed).unwrap();
        let expected = lambda + (1.0 - lambda) / 16.0;
        assert!(
            (fidelity - expected).abs() < 0.02,
            "fidelity {fidelity}, expected about {expected}"
        );
    }
}
