//! Statistical helpers shared by the Monte-Carlo suites.
//!
//! Pass/fail decisions on estimated probabilities use Wilson score intervals
//! at z = 3 ("3 sigma"): an estimate meets a lower bound when its Wilson
//! upper end reaches the bound, so a true value sitting exactly on the bound
//! fails with probability well under 1e-3 per check.

use serde::Serialize;

/// z-score used by every acceptance check in this crate.
pub const Z_3_SIGMA: f64 = 3.0;

/// Empirical frequency of a binary event over a fixed number of trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialEstimate {
    pub successes: u64,
    pub trials: u64,
}

impl BinomialEstimate {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(trials >= 1, "estimate needs at least one trial");
        assert!(successes <= trials);
        Self { successes, trials }
    }

    pub fn p_hat(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }

    /// Plain binomial standard error sqrt(p(1-p)/n).
    pub fn stderr(&self) -> f64 {
        let p = self.p_hat();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Wilson score interval at the given z.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        let n = self.trials as f64;
        let p = self.p_hat();
        let z2 = z * z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        ((center - half).max(0.0), (center + half).min(1.0))
    }

    /// True frequency `>= bound` is not refuted at 3 sigma.
    pub fn meets_lower_bound(&self, bound: f64) -> bool {
        self.wilson(Z_3_SIGMA).1 >= bound
    }

    /// `target` lies inside the 3-sigma Wilson interval.
    pub fn consistent_with(&self, target: f64) -> bool {
        let (lo, hi) = self.wilson(Z_3_SIGMA);
        lo <= target && target <= hi
    }
}

/// Running mean/variance accumulator (Welford) for real-valued samples.
#[derive(Debug, Clone, Default)]
pub struct MeanAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (unbiased); 0 with fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }

    /// `target` lies within 3 standard errors of the sample mean.
    pub fn consistent_with(&self, target: f64) -> bool {
        (self.mean - target).abs() <= Z_3_SIGMA * self.stderr()
    }
}

/// ln(k!) table, exact at 0! and 1!, built by direct summation.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = vec![0.0; n + 1];
    let mut acc = 0.0;
    for (k, slot) in table.iter_mut().enumerate().skip(1) {
        acc += (k as f64).ln();
        *slot = acc;
    }
    table
}

/// Upper tail Pr(Binomial(n, p) >= t), summed term by term in log space.
///
/// Accurate to ~1e-13 relative for n up to ~1e5; callers needing exactness
/// at tiny n should sum integer-weighted terms themselves.
pub fn binomial_upper_tail(n: u64, p: f64, t: u64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p must be a probability");
    if t == 0 {
        return 1.0;
    }
    if t > n {
        return 0.0;
    }
    if p == 0.0 {
        return 0.0; // t >= 1 here
    }
    if p == 1.0 {
        return 1.0; // t <= n here
    }
    let lnf = ln_factorials(n as usize);
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln();
    let n_f = n as f64;
    // Sum the smaller side and complement if that is cheaper/stabler.
    let direct = |from: u64, to: u64| -> f64 {
        let mut acc = 0.0;
        for k in from..=to {
            let ln_term = lnf[n as usize] - lnf[k as usize] - lnf[(n - k) as usize]
                + k as f64 * ln_p
                + (n_f - k as f64) * ln_q;
            acc += ln_term.exp();
        }
        acc
    };
    if (n - t) <= t {
        direct(t, n)
    } else {
        (1.0 - direct(0, t - 1)).clamp(0.0, 1.0)
    }
}
