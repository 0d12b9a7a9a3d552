//! Haar-measure experiments: projection gaps, trace second moments, and
//! random-basis distinguishability.

use num_complex::Complex64;
use serde::Serialize;

use super::haar::{haar_isometry_pair, haar_unitary};
use super::{QsimError, Result, UNITARITY_TOL};
use crate::linalg::{trace, CMat, CVec};
use crate::seedstream::trial_rng;
use crate::stats::MeanAccumulator;

/// Closed-form second moment: for traceless Hermitian `X` and a rank-`k`
/// projector conjugated by a Haar unitary on C^N,
/// `E |tr(U P_k U^dagger X)|^2 =
///  tr(X^dagger X)/2 (k(k+1)/(N(N+1)) - k(k-1)/(N(N-1)))`.
///
/// The 1/2 is the normalization of the symmetric/antisymmetric projectors
/// in the Schur-Weyl average; the elementary N=2, k=1 case pins it down:
/// the statistic is (2c-1)^2 with c uniform on [0,1], whose mean is 1/3.
pub fn second_moment_formula(n: usize, k: usize, x: &CMat) -> Result<f64> {
    if x.nrows() != n || x.ncols() != n {
        return Err(QsimError::WrongDimension {
            expected: n,
            got: x.nrows(),
        });
    }
    if k > n {
        return Err(QsimError::BadRank { d: k, n });
    }
    let tr = trace(x).norm();
    if tr > 1e-10 {
        return Err(QsimError::NotTraceless(tr));
    }
    if n == 1 {
        // Traceless on C^1 means X = 0.
        return Ok(0.0);
    }
    let fro2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    let nf = n as f64;
    let kf = k as f64;
    Ok(0.5 * fro2 * (kf * (kf + 1.0) / (nf * (nf + 1.0)) - kf * (kf - 1.0) / (nf * (nf - 1.0))))
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondMomentEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub formula: f64,
}

impl SecondMomentEstimate {
    /// Monte-Carlo mean within 3 standard errors of the closed form.
    pub fn matches_formula(&self) -> bool {
        (self.mean - self.formula).abs() <= 3.0 * self.stderr
    }
}

/// Monte-Carlo estimate of `E |tr(U P_k U^dagger X)|^2` over Haar samples,
/// one substream per trial.
pub fn mc_second_moment(
    n: usize,
    k: usize,
    x: &CMat,
    trials: u64,
    master_seed: u64,
) -> Result<SecondMomentEstimate> {
    let formula = second_moment_formula(n, k, x)?;
    let mut acc = MeanAccumulator::new();
    for trial in 0..trials {
        let mut rng = trial_rng(master_seed, trial);
        let u = haar_unitary(n, &mut rng);
        // tr(U P_k U^dagger X) = sum over the first k columns of <u_c|X|u_c>.
        let mut t = Complex64::new(0.0, 0.0);
        for c in 0..k {
            for i in 0..n {
                let mut row = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    row += x[[i, j]] * u[[j, c]];
                }
                t += u[[i, c]].conj() * row;
            }
        }
        acc.push(t.norm_sqr());
    }
    Ok(SecondMomentEstimate {
        mean: acc.mean(),
        stderr: acc.stderr(),
        trials,
        formula,
    })
}

/// Per-trial gap statistics of a Haar-random rank-`d` projector restricted
/// to a fixed 2-dimensional subspace.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionExperimentResult {
    pub l: u32,
    pub n: usize,
    pub d: usize,
    pub gaps: Vec<f64>,
    pub mean_gap: f64,
    /// Trials where the gap exceeded the Gersgorin majorant (must be 0).
    pub gersgorin_violations: u64,
}

impl ProjectionExperimentResult {
    /// The proven bound on the mean gap: `2^{-l/2 + 2}`.
    pub fn mean_bound(&self) -> f64 {
        2.0f64.powf(-(self.l as f64) / 2.0 + 2.0)
    }

    pub fn tail_fraction_above(&self, lambda: f64) -> f64 {
        if self.gaps.is_empty() {
            return 0.0;
        }
        self.gaps.iter().filter(|&&g| g >= lambda).count() as f64 / self.gaps.len() as f64
    }
}

/// Restrict a Haar-random rank-`d` projector to the span of the orthonormal
/// pair `v` and record the eigenvalue gap of the resulting 2x2 matrix.
///
/// Only the two overlap columns `(U^dagger v_1, U^dagger v_2)` enter the
/// statistic, and for Haar `U` that pair is itself a uniformly random
/// orthonormal 2-frame, so it is sampled directly; this turns an O(N^3)
/// trial into O(N d). The full-rank case is the identity on the subspace
/// and short-circuits to gap 0.
pub fn projection_gap_experiment(
    l: u32,
    d: usize,
    trials: u64,
    v: &(CVec, CVec),
    master_seed: u64,
) -> Result<ProjectionExperimentResult> {
    let n = 1usize
        .checked_shl(l)
        .filter(|&n| n >= 2)
        .ok_or(QsimError::CapExceeded { qubits: l })?;
    if d < 1 || d > n {
        return Err(QsimError::BadRank { d, n });
    }
    let (v1, v2) = v;
    if v1.len() != n || v2.len() != n {
        return Err(QsimError::WrongDimension {
            expected: n,
            got: v1.len(),
        });
    }
    let n1: f64 = v1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let n2: f64 = v2.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ip: Complex64 = v1.iter().zip(v2.iter()).map(|(a, b)| a.conj() * b).sum();
    if (n1 - 1.0).abs() > UNITARITY_TOL || (n2 - 1.0).abs() > UNITARITY_TOL
        || ip.norm() > UNITARITY_TOL
    {
        return Err(QsimError::Precondition(
            "subspace basis is not orthonormal".into(),
        ));
    }
    let mut gaps = Vec::with_capacity(trials as usize);
    let mut violations = 0u64;
    for trial in 0..trials {
        if d == n {
            gaps.push(0.0);
            continue;
        }
        let mut rng = trial_rng(master_seed, trial);
        let (w1, w2) = haar_isometry_pair(n, &mut rng);
        let mut v11 = 0.0f64;
        let mut v22 = 0.0f64;
        let mut v12 = Complex64::new(0.0, 0.0);
        for c in 0..d {
            v11 += w1[c].norm_sqr();
            v22 += w2[c].norm_sqr();
            v12 += w1[c].conj() * w2[c];
        }
        let diag = v11 - v22;
        let gap = (diag * diag + 4.0 * v12.norm_sqr()).sqrt();
        if gap > diag.abs() + 2.0 * v12.norm() + 1e-10 {
            violations += 1;
        }
        gaps.push(gap);
    }
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
    Ok(ProjectionExperimentResult {
        l,
        n,
        d,
        gaps,
        mean_gap,
        gersgorin_violations: violations,
    })
}

/// Distribution summary of the total variation distance between the
/// outcome distributions of two states measured in a Haar-random basis.
#[derive(Debug, Clone, Serialize)]
pub struct TvdResult {
    pub n: usize,
    pub tvds: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
    pub min: f64,
}

impl TvdResult {
    pub fn fraction_below(&self, threshold: f64) -> f64 {
        if self.tvds.is_empty() {
            return 0.0;
        }
        self.tvds.iter().filter(|&&t| t < threshold).count() as f64 / self.tvds.len() as f64
    }
}

/// Measure both states in a fresh Haar-random orthonormal basis per trial
/// and record the TVD (half the 1-norm) between the outcome distributions.
pub fn random_basis_tvd(
    psi1: &CVec,
    psi2: &CVec,
    trials: u64,
    master_seed: u64,
) -> Result<TvdResult> {
    let n = psi1.len();
    if psi2.len() != n {
        return Err(QsimError::WrongDimension {
            expected: n,
            got: psi2.len(),
        });
    }
    for psi in [psi1, psi2] {
        let dev = (psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs();
        if dev > super::NORMALIZATION_TOL {
            return Err(QsimError::NotNormalized(dev));
        }
    }
    let mut acc = MeanAccumulator::new();
    let mut tvds = Vec::with_capacity(trials as usize);
    let mut min = f64::INFINITY;
    for trial in 0..trials {
        let mut rng = trial_rng(master_seed, trial);
        let u = haar_unitary(n, &mut rng);
        let mut sum = 0.0f64;
        for c in 0..n {
            let mut a1 = Complex64::new(0.0, 0.0);
            let mut a2 = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let uc = u[[i, c]].conj();
                a1 += uc * psi1[i];
                a2 += uc * psi2[i];
            }
            sum += (a1.norm_sqr() - a2.norm_sqr()).abs();
        }
        let tvd = 0.5 * sum;
        min = min.min(tvd);
        acc.push(tvd);
        tvds.push(tvd);
    }
    Ok(TvdResult {
        n,
        mean: acc.mean(),
        stderr: acc.stderr(),
        min: if tvds.is_empty() { 0.0 } else { min },
        tvds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;
    use crate::qsim::haar::random_state;
    use crate::seedstream::setup_rng;

    fn diag(values: &[f64]) -> CMat {
        let mut m = CMat::zeros((values.len(), values.len()));
        for (i, &v) in values.iter().enumerate() {
            m[[i, i]] = Complex64::new(v, 0.0);
        }
        m
    }

    #[test]
    fn formula_hand_values() {
        // N=2, k=1, X=diag(1,-1): the statistic is (2c-1)^2 with c uniform,
        // so the mean is exactly 1/3.
        let x = diag(&[1.0, -1.0]);
        let v = second_moment_formula(2, 1, &x).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(second_moment_formula(2, 0, &x).unwrap(), 0.0);
        assert!(second_moment_formula(2, 2, &x).unwrap().abs() < 1e-15);
        // k=1 at general N: Var(c1 - c2) under Dirichlet(1,...,1) is
        // 2/(N(N+1)).
        let x8 = diag(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let v8 = second_moment_formula(8, 1, &x8).unwrap();
        assert!((v8 - 2.0 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn formula_rejects_traceful_matrices() {
        let x = diag(&[1.0, 0.0]);
        assert!(matches!(
            second_moment_formula(2, 1, &x),
            Err(QsimError::NotTraceless(_))
        ));
    }

    #[test]
    fn mc_matches_formula_small() {
        let x = diag(&[1.0, -1.0]);
        let est = mc_second_moment(2, 1, &x, 20_000, 41).unwrap();
        assert!(
            est.matches_formula(),
            "mean {} formula {} stderr {}",
            est.mean,
            est.formula,
            est.stderr
        );
    }

    #[test]
    fn mc_full_rank_is_exactly_zero() {
        let x = diag(&[1.0, -1.0, 0.0, 0.0]);
        let est = mc_second_moment(4, 4, &x, 200, 42).unwrap();
        // tr(X) = 0 exactly in every sample, up to float dust.
        assert!(est.mean < 1e-25, "mean {}", est.mean);
    }

    fn basis_pair(n: usize) -> (CVec, CVec) {
        let mut v1 = CVec::zeros(n);
        let mut v2 = CVec::zeros(n);
        v1[0] = ONE;
        v2[1] = ONE;
        (v1, v2)
    }

    #[test]
    fn projection_full_rank_gap_is_zero() {
        let v = basis_pair(16);
        let res = projection_gap_experiment(4, 16, 50, &v, 1).unwrap();
        assert!(res.gaps.iter().all(|&g| g == 0.0));
        assert_eq!(res.gersgorin_violations, 0);
    }

    #[test]
    fn projection_rank_one_small_mean() {
        let v = basis_pair(64);
        let res = projection_gap_experiment(6, 1, 2000, &v, 2).unwrap();
        assert!(res.mean_gap <= res.mean_bound(), "mean {}", res.mean_gap);
        assert_eq!(res.gersgorin_violations, 0);
        // Rank-1 gaps concentrate near 2/N = 1/32.
        assert!(res.mean_gap < 0.1);
    }

    #[test]
    fn projection_gap_invariant_under_subspace_change() {
        // Same statistics for the computational pair and a random pair.
        let fixed = basis_pair(64);
        let mut rng = setup_rng(77);
        let random_pair = haar_isometry_pair(64, &mut rng);
        let a = projection_gap_experiment(6, 8, 4000, &fixed, 5).unwrap();
        let b = projection_gap_experiment(6, 8, 4000, &random_pair, 6).unwrap();
        let pooled = (a.mean_gap - b.mean_gap).abs();
        let sa = a.gaps.iter().map(|g| (g - a.mean_gap).powi(2)).sum::<f64>()
            / (a.gaps.len() - 1) as f64;
        let sb = b.gaps.iter().map(|g| (g - b.mean_gap).powi(2)).sum::<f64>()
            / (b.gaps.len() - 1) as f64;
        let se = (sa / a.gaps.len() as f64 + sb / b.gaps.len() as f64).sqrt();
        assert!(pooled <= 3.0 * se, "diff {pooled} vs 3se {}", 3.0 * se);
    }

    #[test]
    fn projection_validates_inputs() {
        let v = basis_pair(16);
        assert!(matches!(
            projection_gap_experiment(4, 0, 10, &v, 1),
            Err(QsimError::BadRank { .. })
        ));
        assert!(matches!(
            projection_gap_experiment(4, 17, 10, &v, 1),
            Err(QsimError::BadRank { .. })
        ));
        let bad = (v.0.clone(), v.0.clone());
        assert!(matches!(
            projection_gap_experiment(4, 2, 10, &bad, 1),
            Err(QsimError::Precondition(_))
        ));
    }

    #[test]
    fn tvd_identical_states_is_exactly_zero() {
        let psi = random_state(8, &mut setup_rng(9));
        let res = random_basis_tvd(&psi, &psi.clone(), 100, 3).unwrap();
        assert!(res.tvds.iter().all(|&t| t == 0.0));
        assert_eq!(res.mean, 0.0);
    }

    #[test]
    fn tvd_orthogonal_states_bounded_away_from_zero() {
        let (v1, v2) = basis_pair(2);
        let res = random_basis_tvd(&v1, &v2, 5000, 4).unwrap();
        // At N=2 the TVD is |2c-1| with c uniform: mean 1/2.
        assert!((res.mean - 0.5).abs() < 0.03, "mean {}", res.mean);
        assert!(res.mean >= 0.2);
    }

    #[test]
    fn tvd_rejects_dimension_mismatch() {
        let (v1, _) = basis_pair(4);
        let (_, w2) = basis_pair(8);
        assert!(matches!(
            random_basis_tvd(&v1, &w2, 10, 0),
            Err(QsimError::WrongDimension { .. })
        ));
    }
}
