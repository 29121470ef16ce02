//! The full conversion cycle: prepare, entangle, measure, correct.
//!
//! A system qubit carrying coherence is joined with an incoherent ancilla
//! and entangled by a (possibly noisy) generalized CNOT, turning local
//! coherence into bipartite correlations. Measuring the ancilla in a basis
//! mutually unbiased with the computational one and applying an
//! outcome-conditioned diagonal phase correction then restores the
//! coherence to the system qubit. [`run_cycle`] executes the whole loop and
//! reports every measure along the way.

use num_complex::Complex64 as C64;

use crate::channels::{GateModel, UnitaryGate};
use crate::density::{
    partial_trace, state_fidelity, tensor, DensityMatrix, PureState,
};
use crate::fmt::format_significant;
use crate::matrix::ComplexMatrix;
use crate::measures::{
    coherence_rel_ent, discord_rel_ent, qi_rel_ent, DiscordConfig,
};
use crate::{tol, Error, Result};

use std::f64::consts::{PI, TAU};

/// Significant digits used by [`CycleReport::to_json`].
const REPORT_DIGITS: usize = 12;

/// The system-qubit input of a cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CycleInput {
    /// Pure state `cos(2θ)|0⟩ + sin(2θ)|1⟩` with `θ` in degrees.
    Pure {
        /// Preparation angle in degrees, in `[0, 45]`.
        theta_deg: f64,
    },
    /// Mixed state `(I + a|0⟩⟨1| + a*|1⟩⟨0|) / 2`.
    Mixed {
        /// Off-diagonal amplitude with `|a| <= 1`.
        a: C64,
    },
}

impl CycleInput {
    /// Pure input at the given preparation angle (degrees in `[0, 45]`).
    pub fn pure(theta_deg: f64) -> Result<Self> {
        if !(0.0..=45.0).contains(&theta_deg) {
            return Err(Error::ParameterOutOfRange {
                name: "theta_deg",
                value: theta_deg,
                min: 0.0,
                max: 45.0,
            });
        }
        Ok(Self::Pure { theta_deg })
    }

    /// Mixed input with off-diagonal amplitude `a` (`|a| <= 1`).
    pub fn mixed(a: C64) -> Result<Self> {
        // Written to reject NaN amplitudes as well as oversized ones.
        if a.norm().is_nan() || a.norm() > 1.0 + 1e-12 {
            return Err(Error::ParameterOutOfRange {
                name: "|a|",
                value: a.norm(),
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self::Mixed { a })
    }

    /// The system state alone.
    pub fn system_state(&self) -> Result<DensityMatrix> {
        match *self {
            CycleInput::Pure { theta_deg } => {
                let angle = 2.0 * theta_deg * PI / 180.0;
                PureState::new(vec![
                    C64::new(angle.cos(), 0.0),
                    C64::new(angle.sin(), 0.0),
                ])?
                .density(&[2])
            }
            CycleInput::Mixed { a } => {
                let half = C64::new(0.5, 0.0);
                let m = ComplexMatrix::from_rows(&[
                    vec![half, a * 0.5],
                    vec![a.conj() * 0.5, half],
                ])?;
                DensityMatrix::new(m, &[2])
            }
        }
    }

    /// The joint system-ancilla input `ρ_A ⊗ |0⟩⟨0|`.
    pub fn prepare(&self) -> Result<DensityMatrix> {
        let system = self.system_state()?;
        let ground = PureState::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)])?
            .density(&[2])?;
        tensor(&system, &ground)
    }
}

/// Joint input for a pure cycle input; see [`CycleInput::pure`].
pub fn prepare_pure(theta_deg: f64) -> Result<DensityMatrix> {
    CycleInput::pure(theta_deg)?.prepare()
}

/// Joint input for a mixed cycle input; see [`CycleInput::mixed`].
pub fn prepare_mixed(a: C64) -> Result<DensityMatrix> {
    CycleInput::mixed(a)?.prepare()
}

/// An ancilla measurement basis, required to be orthonormal and mutually
/// unbiased with the computational basis (every vector has components of
/// squared magnitude `1/d`).
#[derive(Clone, Debug)]
pub struct MeasurementBasis {
    vectors: Vec<Vec<C64>>,
    label: String,
}

impl MeasurementBasis {
    /// Validate a custom basis given as a list of vectors.
    pub fn custom(vectors: Vec<Vec<C64>>, label: impl Into<String>) -> Result<Self> {
        let d = vectors.len();
        if !(2..=4).contains(&d) {
            return Err(Error::DimensionOutOfRange {
                dim: d,
                min: 2,
                max: 4,
            });
        }
        for v in &vectors {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        // Orthonormality: Gram matrix against the identity.
        let mut gram_dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let inner: C64 = vectors[i]
                    .iter()
                    .zip(&vectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let target = if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                gram_dev = gram_dev.max((inner - target).norm());
            }
        }
        if gram_dev > tol::UNITARY {
            return Err(Error::NotOrthonormal { deviation: gram_dev });
        }
        // Mutual unbiasedness with the computational basis.
        let flat = 1.0 / d as f64;
        let mut mub_dev = 0.0f64;
        for v in &vectors {
            for component in v {
                mub_dev = mub_dev.max((component.norm_sqr() - flat).abs());
            }
        }
        if mub_dev > tol::MUB {
            return Err(Error::NotMutuallyUnbiased { deviation: mub_dev });
        }
        Ok(Self {
            vectors,
            label: label.into(),
        })
    }

    /// Eigenbasis of the Pauli Y operator: outcome 0 is `(|0⟩ + i|1⟩)/√2`
    /// (eigenvalue +1), outcome 1 is `(|0⟩ - i|1⟩)/√2`.
    pub fn pauli_y() -> Self {
        let r = 0.5f64.sqrt();
        Self::custom(
            vec![
                vec![C64::new(r, 0.0), C64::new(0.0, r)],
                vec![C64::new(r, 0.0), C64::new(0.0, -r)],
            ],
            "pauli-y",
        )
        .expect("Y eigenbasis is orthonormal and unbiased")
    }

    /// Fourier basis `|Ψ_j⟩ = d^{-1/2} Σ_k e^{-2πi jk/d} |k⟩` for `d` in
    /// `2..=4`.
    pub fn fourier(d: usize) -> Result<Self> {
        if !(2..=4).contains(&d) {
            return Err(Error::DimensionOutOfRange {
                dim: d,
                min: 2,
                max: 4,
            });
        }
        let norm = 1.0 / (d as f64).sqrt();
        let vectors = (0..d)
            .map(|j| {
                (0..d)
                    .map(|k| {
                        C64::from_polar(norm, -TAU * (j * k) as f64 / d as f64)
                    })
                    .collect()
            })
            .collect();
        Self::custom(vectors, format!("fourier-{d}"))
    }

    /// Number of outcomes (= ancilla dimension).
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Basis vector for one outcome.
    pub fn vector(&self, outcome: usize) -> Result<&[C64]> {
        self.vectors
            .get(outcome)
            .map(Vec::as_slice)
            .ok_or(Error::OutcomeOutOfRange {
                outcome,
                count: self.vectors.len(),
            })
    }

    /// Human-readable basis name.
    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Run the conversion step: check the ancilla is incoherent, then apply the
/// gate to the joint state.
pub fn convert(joint: &DensityMatrix, gate: &GateModel) -> Result<DensityMatrix> {
    if joint.dims().len() != 2 {
        return Err(Error::NotBipartite {
            count: joint.dims().len(),
        });
    }
    if joint.dims()[0] != joint.dims()[1] {
        return Err(Error::BadSubsystemDims {
            dims: joint.dims().to_vec(),
            dim: joint.dim(),
        });
    }
    if gate.dim() != joint.dim() {
        return Err(Error::DimensionMismatch {
            expected: gate.dim(),
            got: joint.dim(),
        });
    }
    let ancilla = partial_trace(joint, 1)?;
    let deviation = ancilla.max_offdiagonal();
    if deviation > tol::ANCILLA_INCOHERENCE {
        return Err(Error::AncillaNotIncoherent { deviation });
    }
    gate.apply(joint)
}

/// One retained measurement branch.
#[derive(Clone, Debug)]
pub struct MeasuredBranch {
    /// Outcome index in the measurement basis.
    pub outcome: usize,
    /// Born probability of this outcome.
    pub probability: f64,
    /// Normalized post-measurement system state (before correction).
    pub state: DensityMatrix,
}

/// Result of measuring the ancilla of a bipartite state.
#[derive(Clone, Debug)]
pub struct AncillaMeasurement {
    /// Branches with non-negligible probability, in outcome order.
    pub branches: Vec<MeasuredBranch>,
    /// Outcomes whose probability fell below
    /// [`tol::NEGLIGIBLE_PROBABILITY`](crate::tol::NEGLIGIBLE_PROBABILITY)
    /// (their post-states are undefined).
    pub omitted: Vec<usize>,
}

/// Projectively measure the second subsystem in `basis`, returning each
/// outcome's probability and conditional system state.
pub fn measure_ancilla(
    rho: &DensityMatrix,
    basis: &MeasurementBasis,
) -> Result<AncillaMeasurement> {
    if rho.dims().len() != 2 {
        return Err(Error::NotBipartite {
            count: rho.dims().len(),
        });
    }
    let (da, db) = (rho.dims()[0], rho.dims()[1]);
    if basis.dim() != db {
        return Err(Error::DimensionMismatch {
            expected: db,
            got: basis.dim(),
        });
    }

    let mut branches = Vec::new();
    let mut omitted = Vec::new();
    for outcome in 0..db {
        let psi = basis.vector(outcome)?;
        // Conditional (unnormalized) system operator
        // B_ij = Σ_kl conj(ψ_k) ρ[(i,k),(j,l)] ψ_l.
        let block = ComplexMatrix::from_fn(da, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for (k, pk) in psi.iter().enumerate() {
                for (l, pl) in psi.iter().enumerate() {
                    acc += pk.conj() * rho.matrix().get(i * db + k, j * db + l) * pl;
                }
            }
            acc
        });
        let probability = block.trace().re;
        if probability <= tol::NEGLIGIBLE_PROBABILITY {
            omitted.push(outcome);
            continue;
        }
        let state = DensityMatrix::new(
            block.scale(C64::new(1.0 / probability, 0.0)),
            &[da],
        )?;
        branches.push(MeasuredBranch {
            outcome,
            probability,
            state,
        });
    }
    Ok(AncillaMeasurement { branches, omitted })
}

/// The diagonal phase correction for one measurement outcome.
///
/// For outcome vector `ψ` with components `|ψ_k| = d^{-1/2} e^{i α_k}`, the
/// correction is `diag(e^{i(α_k - α_0)})`: it cancels the outcome-dependent
/// phases imprinted on the system, normalized so the first entry is one.
pub fn corrective_phase(
    basis: &MeasurementBasis,
    outcome: usize,
) -> Result<UnitaryGate> {
    let psi = basis.vector(outcome)?;
    let reference = psi[0].arg();
    let diag: Vec<C64> = psi
        .iter()
        .map(|component| C64::from_polar(1.0, component.arg() - reference))
        .collect();
    UnitaryGate::new(ComplexMatrix::diagonal(&diag))
}

/// Per-outcome results of a full cycle.
#[derive(Clone, Debug)]
pub struct OutcomeReport {
    /// Outcome index.
    pub outcome: usize,
    /// Born probability.
    pub probability: f64,
    /// System state after the phase correction.
    pub state: DensityMatrix,
    /// Coherence of the corrected state.
    pub coherence: f64,
    /// Fidelity of the corrected state with the original system input.
    pub restored_fidelity: f64,
}

/// Everything measured along one conversion cycle.
#[derive(Clone, Debug)]
pub struct CycleReport {
    /// The cycle input.
    pub input: CycleInput,
    /// Coherence of the input system state.
    pub c_initial: f64,
    /// Discord of the entangled state (minimized over product bases).
    pub discord: f64,
    /// One-sided coherence of the entangled state (dephasing the system
    /// side); an upper bound for the discord.
    pub qi_rel_ent: f64,
    /// Whether the discord minimization converged on every start.
    pub discord_converged: bool,
    /// Retained measurement outcomes with corrected states.
    pub outcomes: Vec<OutcomeReport>,
    /// Outcomes omitted for negligible probability.
    pub omitted_outcomes: Vec<usize>,
    /// Probability-weighted average coherence recovered on the system.
    pub c_final: f64,
}

impl CycleReport {
    /// Serialize to JSON with a fixed field order and 12 significant digits,
    /// so identical runs yield byte-identical reports.
    pub fn to_json(&self) -> String {
        self.to_json_with_context(&[])
    }

    /// As [`CycleReport::to_json`], with extra string fields (for example a
    /// gate or basis description) inserted right after the input block.
    pub fn to_json_with_context(&self, context: &[(&str, &str)]) -> String {
        let n = |x: f64| format_significant(x, REPORT_DIGITS);
        let escape = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let context: String = context
            .iter()
            .map(|(key, value)| {
                format!(",\n  \"{}\": \"{}\"", escape(key), escape(value))
            })
            .collect();
        let input = match self.input {
            CycleInput::Pure { theta_deg } => format!(
                "{{\"kind\": \"pure\", \"theta_deg\": {}}}",
                n(theta_deg)
            ),
            CycleInput::Mixed { a } => format!(
                "{{\"kind\": \"mixed\", \"a_re\": {}, \"a_im\": {}}}",
                n(a.re),
                n(a.im)
            ),
        };
        let outcomes: Vec<String> = self
            .outcomes
            .iter()
            .map(|o| {
                format!(
                    "    {{\"outcome\": {}, \"probability\": {}, \"coherence\": {}, \
                     \"restored_fidelity\": {}}}",
                    o.outcome,
                    n(o.probability),
                    n(o.coherence),
                    n(o.restored_fidelity)
                )
            })
            .collect();
        let omitted: Vec<String> = self
            .omitted_outcomes
            .iter()
            .map(usize::to_string)
            .collect();
        format!(
            "{{\n  \"input\": {}{},\n  \"c_initial\": {},\n  \"discord\": {},\n  \
             \"qi_rel_ent\": {},\n  \"discord_converged\": {},\n  \"outcomes\": [\n{}\n  ],\n  \
             \"omitted_outcomes\": [{}],\n  \"c_final\": {}\n}}\n",
            input,
            context,
            n(self.c_initial),
            n(self.discord),
            n(self.qi_rel_ent),
            self.discord_converged,
            outcomes.join(",\n"),
            omitted.join(","),
            n(self.c_final),
        )
    }
}

/// Run one full cycle: prepare the joint input, convert coherence to
/// correlations through `gate`, measure the ancilla in `basis`, correct each
/// branch, and aggregate the recovered coherence.
pub fn run_cycle(
    input: &CycleInput,
    gate: &GateModel,
    basis: &MeasurementBasis,
) -> Result<CycleReport> {
    let joint = input.prepare()?;
    let system_before = partial_trace(&joint, 0)?;
    let c_initial = coherence_rel_ent(&system_before);

    let converted = convert(&joint, gate)?;
    let discord = discord_rel_ent(&converted, &DiscordConfig::default())?;
    let qi = qi_rel_ent(&converted)?;

    let measurement = measure_ancilla(&converted, basis)?;
    let mut outcomes = Vec::with_capacity(measurement.branches.len());
    let mut c_final = 0.0;
    for branch in &measurement.branches {
        let correction = corrective_phase(basis, branch.outcome)?;
        let corrected = correction.apply(&branch.state)?;
        let coherence = coherence_rel_ent(&corrected);
        let restored_fidelity = state_fidelity(&corrected, &system_before)?;
        c_final += branch.probability * coherence;
        outcomes.push(OutcomeReport {
            outcome: branch.outcome,
            probability: branch.probability,
            state: corrected,
            coherence,
            restored_fidelity,
        });
    }

    Ok(CycleReport {
        input: *input,
        c_initial,
        discord: discord.value,
        qi_rel_ent: qi,
        discord_converged: discord.converged,
        outcomes,
        omitted_outcomes: measurement.omitted,
        c_final,
    })
}
