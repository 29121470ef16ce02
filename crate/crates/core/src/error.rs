//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by constructors, validators, and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// Two operands (or an operator and a state) have incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A dimension is outside the range supported by an operation.
    #[error("dimension {dim} outside supported range {min}..={max}")]
    DimensionOutOfRange { dim: usize, min: usize, max: usize },

    /// A matrix expected to be Hermitian is not.
    #[error("matrix is not Hermitian: max |M - M†| entry = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    /// A matrix expected to be positive semidefinite has a significantly
    /// negative eigenvalue.
    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// A density matrix trace differs from one.
    #[error("trace differs from one by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },

    /// A pure-state vector is not normalized.
    #[error("state vector norm differs from one by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    /// Subsystem dimensions do not factor the total dimension.
    #[error("subsystem dimensions {dims:?} do not multiply to total dimension {dim}")]
    BadSubsystemDims { dims: Vec<usize>, dim: usize },

    /// A subsystem index is out of range.
    #[error("subsystem index {index} out of range for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },

    /// An operation requiring a bipartite state received something else.
    #[error("operation requires a bipartite state, got {count} subsystems")]
    NotBipartite { count: usize },

    /// A matrix expected to be unitary is not.
    #[error("matrix is not unitary: max |U†U - I| entry = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    /// A set of vectors expected to form an orthonormal basis does not.
    #[error("vectors are not an orthonormal basis: max Gram deviation = {deviation:.3e}")]
    NotOrthonormal { deviation: f64 },

    /// Kraus operators do not resolve the identity.
    #[error("Kraus operators are not trace-preserving: max |ΣK†K - I| entry = {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },

    /// A measurement basis is not mutually unbiased with the computational
    /// basis.
    #[error("basis is not mutually unbiased with the computational basis: \
             max ||⟨k|ψ⟩|² - 1/d| = {deviation:.3e}")]
    NotMutuallyUnbiased { deviation: f64 },

    /// The ancilla marginal carries coherence where none is allowed.
    #[error("ancilla marginal is not incoherent: off-diagonal weight = {deviation:.3e}")]
    AncillaNotIncoherent { deviation: f64 },

    /// A measurement outcome index is out of range.
    #[error("measurement outcome {outcome} out of range for {count} outcomes")]
    OutcomeOutOfRange { outcome: usize, count: usize },

    /// A scalar parameter lies outside its documented domain.
    #[error("parameter {name} = {value} outside domain [{min}, {max}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Tomography records do not cover the full set of measurement settings.
    #[error("incomplete tomography records: {details}")]
    IncompleteRecords { details: String },

    /// A serialized matrix or counts table could not be parsed.
    #[error("malformed serialized data: {0}")]
    Parse(String),
}
