//! vvlab: a simulation laboratory for witness-isolation randomized reductions
//! and small-scale quantum promise-problem experiments.
//!
//! The crate enumerates everything it talks about. Verifiers are explicit
//! tables of acceptance probabilities over all `2^l` witnesses, quantum
//! circuits are dense statevectors on at most 12 qubits, and Hamiltonians
//! are dense Hermitian matrices. Within those caps every "oracle" is exact,
//! so the randomized reductions and their completeness/soundness constants
//! can be measured rather than assumed.
//!
//! Module map:
//!
//! - [`hashfam`]: GF(2)-affine pairwise-independent hash family, the
//!   pseudo-random filters used by all reductions.
//! - [`verifier`]: witness tables, promise instances, restriction,
//!   amplification, and interval bucketing.
//! - [`reduction`]: the isolation reductions for deterministic,
//!   probabilistic, and quantum-circuit verifiers, plus Monte-Carlo
//!   estimators of their success bounds.
//! - [`qsim`]: dense statevector simulator, acceptance operators and their
//!   spectra, eigenvalue surgery, and the Haar-measure experiments.
//! - [`hamiltonian`]: 1-D 2-local chain Hamiltonians, exact low spectra,
//!   and spectral-gap classification.
//! - [`cli`]: the batch experiment driver behind the `vvlab` binary.
//!
//! All randomness flows through seeded [`rand_chacha`] streams (see
//! [`seedstream`]); a fixed master seed reproduces every experiment
//! byte-for-byte.

pub mod cli;
pub mod hamiltonian;
pub mod hashfam;
pub mod linalg;
pub mod qsim;
pub mod reduction;
pub mod seedstream;
pub mod stats;
pub mod verifier;

pub use hashfam::AffineHash;
pub use verifier::{PromiseInstance, WitnessTable};
