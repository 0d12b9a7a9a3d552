//! Acceptance operators and operator-level reductions.
//!
//! For a circuit `U` with `m` ancillas, the acceptance operator is
//! `Q = (I ⊗ <0^m|) U^dagger Pi_1 U (I ⊗ |0^m>)`: a Hermitian matrix on
//! the witness space whose quadratic form gives the acceptance probability
//! of any witness state. Everything downstream (unique / gapped promise
//! classification, eigenvalue surgery, threshold sweeps) only consumes the
//! spectrum of `Q`.

use ndarray::s;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::circuit::{accept_probability, Circuit};
use super::{QsimError, Result, HERMITICITY_TOL, SPECTRUM_RANGE_TOL};
use crate::linalg::{
    eigen_hermitian_jacobi, eigenvalues_hermitian, hermiticity_error, quadratic_form, CMat, CVec,
    ONE, ZERO,
};
use crate::verifier::{PromiseInstance, WitnessTable};

/// Hermitian acceptance operator on a `2^l`-dimensional witness space.
#[derive(Debug, Clone, PartialEq)]
pub struct QOperator {
    matrix: CMat,
}

impl QOperator {
    pub fn new(matrix: CMat) -> Result<Self> {
        let dim = matrix.nrows();
        if dim == 0 || matrix.ncols() != dim || !dim.is_power_of_two() {
            return Err(QsimError::NotPowerOfTwo(dim));
        }
        if dim > 1usize << super::MAX_QUBITS {
            return Err(QsimError::CapExceeded {
                qubits: dim.trailing_zeros(),
            });
        }
        let dev = hermiticity_error(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(QsimError::NotHermitian(dev));
        }
        Ok(Self { matrix })
    }

    /// Diagonal operator with the given acceptance probabilities.
    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        let mut m = CMat::zeros((values.len(), values.len()));
        for (i, &v) in values.iter().enumerate() {
            m[[i, i]] = Complex64::new(v, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn witness_bits(&self) -> u32 {
        self.matrix.nrows().trailing_zeros()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Acceptance probability of the witness state `psi`.
    pub fn acceptance(&self, psi: &CVec) -> Result<f64> {
        if psi.len() != self.dim() {
            return Err(QsimError::WrongDimension {
                expected: self.dim(),
                got: psi.len(),
            });
        }
        Ok(quadratic_form(psi, &self.matrix, psi).re)
    }

    /// Eigenvalues sorted descending, checked against the operator
    /// interval `[0, 1]` (within tolerance).
    pub fn spectrum_desc(&self) -> Result<Vec<f64>> {
        let mut vals = eigenvalues_hermitian(&self.matrix);
        if let (Some(&lo), Some(&hi)) = (vals.first(), vals.last()) {
            if lo < -SPECTRUM_RANGE_TOL || hi > 1.0 + SPECTRUM_RANGE_TOL {
                let bad = if lo < -SPECTRUM_RANGE_TOL { lo } else { hi };
                return Err(QsimError::SpectrumOutOfRange(bad));
            }
        }
        vals.reverse();
        Ok(vals)
    }
}

/// Build the acceptance operator by simulating every basis witness and
/// taking projected inner products of the output states.
pub fn build_q_operator(circuit: &Circuit) -> Result<QOperator> {
    let dim = circuit.witness_dim();
    let n = circuit.qubits();
    let msb = 1usize << (n - 1);
    // Projected output states Pi_1 U |y, 0^m>.
    let mut projected: Vec<CVec> = Vec::with_capacity(dim);
    for y in 0..dim {
        let mut input = CVec::zeros(dim);
        input[y] = ONE;
        let mut out = circuit.output_state(&input)?;
        for (s, amp) in out.iter_mut().enumerate() {
            if s & msb == 0 {
                *amp = ZERO;
            }
        }
        projected.push(out);
    }
    let mut q = CMat::zeros((dim, dim));
    for x in 0..dim {
        for y in x..dim {
            let mut acc = ZERO;
            for (a, b) in projected[x].iter().zip(projected[y].iter()) {
                acc += a.conj() * b;
            }
            q[[x, y]] = acc;
            q[[y, x]] = acc.conj();
        }
    }
    QOperator::new(q)
}

/// Table of basis-witness acceptance probabilities as a promise instance.
pub fn basis_witness_table(circuit: &Circuit, p1: f64, p2: f64) -> Result<PromiseInstance> {
    let dim = circuit.witness_dim();
    let mut probs = Vec::with_capacity(dim);
    for y in 0..dim {
        let mut input = CVec::zeros(dim);
        input[y] = ONE;
        let out = circuit.output_state(&input)?;
        // Clamp float dust at the interval ends.
        probs.push(accept_probability(&out, circuit.qubits()).clamp(0.0, 1.0));
    }
    let table = WitnessTable::new(circuit.witness_bits(), probs).map_err(QsimError::Verifier)?;
    PromiseInstance::new(table, p1, p2).map_err(QsimError::Verifier)
}

/// Every promise label consistent with a spectrum, at no-threshold `a`,
/// yes-threshold `b`, and gap parameter `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PromiseLabels {
    pub qma_yes: bool,
    pub qma_no: bool,
    pub uqma_yes: bool,
    pub uqma_no: bool,
    pub pgqma_yes: bool,
    pub pgqma_no: bool,
}

impl PromiseLabels {
    pub fn none_of_promise(&self) -> bool {
        !(self.qma_yes
            || self.qma_no
            || self.uqma_yes
            || self.uqma_no
            || self.pgqma_yes
            || self.pgqma_no)
    }
}

/// Classify a spectrum against the yes/no/unique/gapped promises.
pub fn classify_q(q: &QOperator, a: f64, b: f64, delta: f64) -> Result<PromiseLabels> {
    let ordered = a < b; // NaN also fails here
    if !ordered {
        return Err(QsimError::Precondition(format!(
            "thresholds must satisfy a < b, got a={a}, b={b}"
        )));
    }
    let spec = q.spectrum_desc()?;
    let l1 = spec[0];
    let l2 = spec.get(1).copied();
    let gap_ok = match l2 {
        Some(l2) => l1 - l2 >= delta,
        None => true, // one-dimensional: nothing to gap against
    };
    let second_low = l2.is_none_or(|l2| l2 <= a);
    Ok(PromiseLabels {
        qma_yes: l1 >= b,
        qma_no: l1 <= a,
        uqma_yes: l1 >= b && second_low,
        uqma_no: l1 <= a,
        pgqma_yes: l1 >= b && gap_ok,
        pgqma_no: l1 <= a && gap_ok,
    })
}

/// Append one qubit's worth of dimensions carrying a single `1/3`
/// eigenvalue and `2^l - 1` zeros: the output is the direct sum
/// `Q ⊕ diag(1/3, 0, ..., 0)`.
pub fn add_third_eigenvalue(q: &QOperator) -> Result<QOperator> {
    let dim = q.dim();
    let new_dim = 2 * dim;
    if new_dim > 1usize << super::MAX_QUBITS {
        return Err(QsimError::CapExceeded {
            qubits: new_dim.trailing_zeros(),
        });
    }
    let mut out = CMat::zeros((new_dim, new_dim));
    out.slice_mut(s![..dim, ..dim]).assign(&q.matrix);
    out[[dim, dim]] = Complex64::new(1.0 / 3.0, 0.0);
    QOperator::new(out)
}

/// Thresholds produced by the unique-to-gapped reduction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PgqmaThresholds {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

/// Unique-promise to gapped-promise reduction. Expects an amplified
/// operator: either `lambda_1 <= 1/3 - delta` (no case) or
/// `lambda_1 >= 2/3` with `lambda_2 <= 1/3 - delta` (unique yes case).
/// Padding in the `1/3` eigenvalue then guarantees a gap of at least
/// `delta` on both sides of the promise.
pub fn uqma_to_pgqma(q: &QOperator, delta: f64) -> Result<(QOperator, PgqmaThresholds)> {
    if !(delta > 0.0 && delta < 1.0 / 3.0) {
        return Err(QsimError::BadGap(delta));
    }
    let spec = q.spectrum_desc()?;
    let l1 = spec[0];
    let l2 = spec.get(1).copied().unwrap_or(0.0);
    let no_case = l1 <= 1.0 / 3.0 - delta;
    let yes_case = l1 >= 2.0 / 3.0 && l2 <= 1.0 / 3.0 - delta;
    if !(no_case || yes_case) {
        return Err(QsimError::Precondition(format!(
            "spectrum (l1={l1}, l2={l2}) fits neither the no case (l1 <= 1/3-delta) \
             nor the unique yes case (l1 >= 2/3, l2 <= 1/3-delta) at delta={delta}"
        )));
    }
    let padded = add_third_eigenvalue(q)?;
    Ok((
        padded,
        PgqmaThresholds {
            a: 1.0 / 3.0,
            b: 2.0 / 3.0,
            delta,
        },
    ))
}

/// Unique-promise verdict at one interval of the threshold sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UqmaVerdict {
    Yes,
    No,
    OffPromise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepEntry {
    pub j: u32,
    /// Interval `(2/3 + j delta/2, 2/3 + (j+1) delta/2)`.
    pub a: f64,
    pub b: f64,
    pub verdict: UqmaVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSweep {
    pub chosen: SweepEntry,
    pub entries: Vec<SweepEntry>,
}

fn verdict_at(l1: f64, l2: Option<f64>, a: f64, b: f64) -> UqmaVerdict {
    let second_low = l2.is_none_or(|l2| l2 <= a);
    if l1 >= b && second_low {
        UqmaVerdict::Yes
    } else if l1 <= a {
        UqmaVerdict::No
    } else {
        UqmaVerdict::OffPromise
    }
}

/// Gapped-promise to unique-promise reduction: slide a width-`delta/2`
/// window across `(2/3, 1)` and classify against each candidate interval.
/// A uniformly random index is drawn as the reduction's output; the full
/// sweep is reported for diagnostics. For a yes operator with
/// `lambda_1 >= 2/3 + delta/2` at least one index yields a unique yes.
pub fn pgqma_threshold_sweep<R: Rng + ?Sized>(
    q: &QOperator,
    delta: f64,
    rng: &mut R,
) -> Result<ThresholdSweep> {
    if !(delta > 0.0 && delta <= 2.0 / 3.0) {
        return Err(QsimError::BadGap(delta));
    }
    let spec = q.spectrum_desc()?;
    let l1 = spec[0];
    let l2 = spec.get(1).copied();
    // Largest j with 2/3 + (j+1) delta/2 <= 1.
    let j_max = ((1.0 / 3.0) / (delta / 2.0)).floor() as i64 - 1;
    if j_max < 0 {
        return Err(QsimError::BadGap(delta));
    }
    let entries: Vec<SweepEntry> = (0..=j_max as u32)
        .map(|j| {
            let a = 2.0 / 3.0 + j as f64 * delta / 2.0;
            let b = 2.0 / 3.0 + (j + 1) as f64 * delta / 2.0;
            SweepEntry {
                j,
                a,
                b,
                verdict: verdict_at(l1, l2, a, b),
            }
        })
        .collect();
    let chosen = entries[rng.random_range(0..entries.len())];
    Ok(ThresholdSweep { chosen, entries })
}

/// Top two eigenvectors of the operator, used as the distinguished
/// 2-dimensional subspace in projection experiments.
pub fn top_two_eigenvectors(q: &QOperator) -> Result<(CVec, CVec)> {
    let dim = q.dim();
    if dim < 2 {
        return Err(QsimError::WrongDimension {
            expected: 2,
            got: dim,
        });
    }
    let (_, vectors) = eigen_hermitian_jacobi(&q.matrix);
    // Jacobi sorts ascending; the top two live in the last columns.
    let v1 = vectors.column(dim - 1).to_owned();
    let v2 = vectors.column(dim - 2).to_owned();
    Ok((v1, v2))
}
