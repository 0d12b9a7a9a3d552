//! Dense statevector engine and the operator-level experiments built on it.
//!
//! Circuits act on `l` witness qubits plus `m` ancillas, `l + m <= 12`, so
//! every acceptance probability, operator spectrum, and Haar-measure
//! statistic in this module is computed exactly (up to floating point)
//! rather than sampled from hardware-style shots.
//!
//! Qubit 0 is the leftmost ket position and the most significant bit of a
//! state index; ancillas occupy the trailing (least significant) positions.
//! The acceptance measurement projects qubit 0 onto |1>.

mod circuit;
mod experiments;
mod haar;
mod qop;

pub use circuit::{stock, Circuit, Gate};
pub use experiments::{
    mc_second_moment, projection_gap_experiment, random_basis_tvd, second_moment_formula,
    ProjectionExperimentResult, SecondMomentEstimate, TvdResult,
};
pub use haar::{haar_isometry_pair, haar_unitary, random_state};
pub use qop::{
    add_third_eigenvalue, basis_witness_table, build_q_operator, classify_q,
    pgqma_threshold_sweep, top_two_eigenvectors, uqma_to_pgqma, PgqmaThresholds, PromiseLabels,
    QOperator, SweepEntry, ThresholdSweep, UqmaVerdict,
};

use thiserror::Error;

use crate::verifier::VerifierError;

/// Cap on total qubits; 2^12 amplitudes keeps everything dense and fast.
pub const MAX_QUBITS: u32 = 12;

/// Numerical contracts used across the module.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const UNITARITY_TOL: f64 = 1e-10;
pub const NORMALIZATION_TOL: f64 = 1e-8;
pub const SPECTRUM_RANGE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum QsimError {
    #[error("{qubits} qubits exceed the cap of {MAX_QUBITS}")]
    CapExceeded { qubits: u32 },
    #[error("gate references qubit {qubit} outside 0..{qubits}")]
    BadQubit { qubit: u32, qubits: u32 },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    DuplicateQubit(u32),
    #[error("gate matrix is not unitary (deviation {0:.3e})")]
    NonUnitaryGate(f64),
    #[error("state vector has wrong dimension: expected {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("state vector is not normalized (|norm-1| = {0:.3e})")]
    NotNormalized(f64),
    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("operator dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("spectrum outside [0,1] beyond tolerance (found {0})")]
    SpectrumOutOfRange(f64),
    #[error("projector rank {d} outside 1..={n}")]
    BadRank { d: usize, n: usize },
    #[error("matrix is not traceless (|trace| = {0:.3e})")]
    NotTraceless(f64),
    #[error("gap parameter {0} unusable (need 0 < delta <= 2/3)")]
    BadGap(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed circuit encoding: {0}")]
    Parse(String),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
}

pub(crate) type Result<T> = std::result::Result<T, QsimError>;
