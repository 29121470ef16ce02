//! Numerical simulation of a two-qubit protocol that converts single-qubit
//! coherence into bipartite quantum discord and back.
//!
//! The forward step entangles a system qubit with an incoherent ancilla
//! through a generalized CNOT (ideal unitary or noisy process matrix); the
//! backward step measures the ancilla in a mutually unbiased basis and applies
//! an outcome-conditioned phase correction to the system. The crate provides:
//!
//! - dense complex matrices with a self-contained Hermitian eigensolver
//!   ([`matrix`], [`eig`]);
//! - validated density matrices, entropies, fidelity, and dephasing maps
//!   ([`density`]);
//! - relative-entropy measures of coherence and discord, the latter through a
//!   grid-seeded Nelder-Mead search over product bases ([`measures`]);
//! - unitary gates, Kraus channels, and process (chi) matrices in the
//!   two-qubit Pauli basis, including depolarized gates calibrated to a
//!   target process fidelity ([`channels`]);
//! - the full conversion cycle with measurement statistics and restoration
//!   fidelities ([`protocol`]);
//! - simulated projective tomography with maximum-likelihood reconstruction
//!   and chi-matrix process tomography ([`tomography`]);
//! - seeded random states and gates for property tests ([`random`]).
//!
//! All entropies are in bits (base-2 logarithms). Numerical tolerances are
//! centralized in [`tol`].

// Indexed loops over several same-length buffers at once are the clearest
// form for the dense linear-algebra kernels here.
#![allow(clippy::needless_range_loop)]

pub mod channels;
pub mod density;
pub mod eig;
mod error;
pub mod fmt;
pub mod matrix;
pub mod measures;
pub mod protocol;
pub mod random;
pub mod tomography;

pub use error::Error;

/// Convenient crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Numerical tolerances used by validation checks and iterative solvers.
///
/// These are deliberate, pinned choices: loosening one weakens a guarantee,
/// tightening one may reject states produced by legitimate finite-precision
/// arithmetic.
pub mod tol {
    /// Maximum entrywise deviation `|M - M†|` tolerated by Hermiticity checks.
    pub const HERMITIAN: f64 = 1e-10;

    /// Most negative eigenvalue tolerated by positive-semidefiniteness checks
    /// on density matrices.
    pub const PSD: f64 = 1e-10;

    /// Maximum deviation of a density-matrix trace from one.
    pub const TRACE: f64 = 1e-10;

    /// Maximum deviation of a pure-state norm from one.
    pub const PURE_NORM: f64 = 1e-12;

    /// Maximum entrywise deviation of `U†U` from the identity for unitarity
    /// checks, and of Gram matrices from the identity for orthonormal-basis
    /// checks.
    pub const UNITARY: f64 = 1e-10;

    /// Eigenvalues below this floor are treated as zero before logarithms.
    pub const LOG_FLOOR: f64 = 1e-12;

    /// Support threshold for relative entropy: if more than this much
    /// probability mass of the first state lies in the kernel of the second,
    /// the relative entropy is reported as infinite.
    pub const SUPPORT: f64 = 1e-12;

    /// Maximum entrywise deviation tolerated when checking that a set of
    /// Kraus operators resolves the identity.
    pub const KRAUS_COMPLETENESS: f64 = 1e-8;

    /// Most negative eigenvalue tolerated for a process (chi) matrix.
    pub const CHI_PSD: f64 = 1e-8;

    /// Maximum entrywise deviation from the identity tolerated when checking
    /// that a process matrix is trace-preserving.
    pub const CHI_TRACE_PRESERVING: f64 = 1e-6;

    /// Maximum deviation of `|<k|psi>|^2` from `1/d` tolerated when checking
    /// that a measurement basis is mutually unbiased with the incoherent
    /// (computational) basis.
    pub const MUB: f64 = 1e-9;

    /// Maximum deviation from incoherence tolerated in the ancilla marginal
    /// before the conversion step.
    pub const ANCILLA_INCOHERENCE: f64 = 1e-9;

    /// Measurement outcomes with probability below this threshold are omitted
    /// from per-outcome post-processing (their states are undefined).
    pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;
}
