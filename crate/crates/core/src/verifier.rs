//! Explicit verifier model.
//!
//! A verifier is nothing but its semantic content on basis witnesses: a
//! table of `2^l` acceptance probabilities. Deterministic verifiers use
//! {0,1} entries; probabilistic and quantum-circuit verifiers use the full
//! interval. Promise instances pair a table with thresholds `p1 < p2`;
//! the yes-interval is `[p2, 1]`, the no-interval `[0, p1]`, and the open
//! gap `(p1, p2)` in between, so the three sets partition the witnesses
//! and classification is total.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::hashfam::AffineHash;
use crate::stats::binomial_upper_tail;

/// Default enumeration cap on witness bits (`2^20` table entries).
pub const DEFAULT_MAX_WITNESS_BITS: u32 = 20;

/// Hard ceiling on amplification repetitions before tails underflow.
pub const MAX_AMPLIFY_REPS: u64 = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum VerifierError {
    #[error("witness bit-count {l} exceeds the enumeration cap {cap}")]
    CapExceeded { l: u32, cap: u32 },
    #[error("table length {got} does not match 2^{l}")]
    WrongLength { l: u32, got: usize },
    #[error("probability {0} outside [0,1]")]
    BadProbability(f64),
    #[error("thresholds must satisfy 0 <= p1 < p2 <= 1, got p1={p1}, p2={p2}")]
    BadThresholds { p1: f64, p2: f64 },
    #[error("hash input width {hash_bits} does not match witness bits {table_bits}")]
    DimensionMismatch { hash_bits: u32, table_bits: u32 },
    #[error("amplification needs reps >= 1 and p1 < threshold_fraction < p2: {0}")]
    BadAmplification(String),
    #[error("numeric range: {0}")]
    NumericRange(String),
    #[error("malformed table encoding: {0}")]
    Parse(String),
}

type Result<T> = std::result::Result<T, VerifierError>;

/// Acceptance probabilities of every `l`-bit witness, indexed by the
/// witness read as an integer (bit 0 least significant).
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessTable {
    l: u32,
    probs: Vec<f64>,
}

impl WitnessTable {
    pub fn new(l: u32, probs: Vec<f64>) -> Result<Self> {
        Self::with_cap(l, probs, DEFAULT_MAX_WITNESS_BITS)
    }

    pub fn with_cap(l: u32, probs: Vec<f64>, cap: u32) -> Result<Self> {
        if l > cap {
            return Err(VerifierError::CapExceeded { l, cap });
        }
        if probs.len() != 1usize << l {
            return Err(VerifierError::WrongLength {
                l,
                got: probs.len(),
            });
        }
        if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(VerifierError::BadProbability(bad));
        }
        Ok(Self { l, probs })
    }

    /// Constant table, handy for degenerate instances.
    pub fn constant(l: u32, value: f64) -> Result<Self> {
        Self::new(l, vec![value; 1usize << l])
    }

    pub fn witness_bits(&self) -> u32 {
        self.l
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, y: u64) -> f64 {
        self.probs[y as usize]
    }

    /// True when every entry is 0 or 1 (a deterministic verifier).
    pub fn is_deterministic(&self) -> bool {
        self.probs.iter().all(|&p| p == 0.0 || p == 1.0)
    }
}

/// Three-way classification of a promise instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TmappClass {
    TmappYes,
    TmappNo,
    PromiseViolated,
}

/// Classification against the unique-witness promise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UniqueClass {
    UmappYes,
    UmappNo,
    Neither,
}

impl fmt::Display for UniqueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UniqueClass::UmappYes => "UmappYes",
            UniqueClass::UmappNo => "UmappNo",
            UniqueClass::Neither => "Neither",
        };
        f.write_str(s)
    }
}

/// A witness table together with promise thresholds `0 <= p1 < p2 <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PromiseInstance {
    pub table: WitnessTable,
    p1: f64,
    p2: f64,
}

impl PromiseInstance {
    pub fn new(table: WitnessTable, p1: f64, p2: f64) -> Result<Self> {
        if !(0.0 <= p1 && p1 < p2 && p2 <= 1.0) {
            return Err(VerifierError::BadThresholds { p1, p2 });
        }
        Ok(Self { table, p1, p2 })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn witness_bits(&self) -> u32 {
        self.table.witness_bits()
    }

    /// Same table, different thresholds. Shrinking the interval preserves
    /// yes/no classification.
    pub fn with_thresholds(&self, p1: f64, p2: f64) -> Result<Self> {
        Self::new(self.table.clone(), p1, p2)
    }

    /// Yes iff some entry reaches the yes-interval; no iff every entry sits
    /// in the no-interval; otherwise the promise is violated.
    pub fn classify(&self) -> TmappClass {
        let mut any_yes = false;
        let mut any_gap = false;
        for &p in self.table.probs() {
            if p >= self.p2 {
                any_yes = true;
            } else if p > self.p1 {
                any_gap = true;
            }
        }
        if any_yes {
            TmappClass::TmappYes
        } else if any_gap {
            TmappClass::PromiseViolated
        } else {
            TmappClass::TmappNo
        }
    }

    /// Unique-promise classification: exactly one entry in the yes-interval
    /// and everything else in the no-interval.
    pub fn classify_unique(&self) -> UniqueClass {
        let mut yes_count = 0u64;
        let mut any_gap = false;
        for &p in self.table.probs() {
            if p >= self.p2 {
                yes_count += 1;
            } else if p > self.p1 {
                any_gap = true;
            }
        }
        match (yes_count, any_gap) {
            (1, false) => UniqueClass::UmappYes,
            (0, false) => UniqueClass::UmappNo,
            _ => UniqueClass::Neither,
        }
    }

    /// Filter through `h`: witnesses outside `h^{-1}(0)` are rejected
    /// outright, everything else is untouched. Thresholds carry over.
    pub fn restrict(&self, h: &AffineHash) -> Result<Self> {
        self.check_hash(h)?;
        let probs = self
            .table
            .probs()
            .iter()
            .enumerate()
            .map(|(y, &p)| {
                if h.maps_to_zero_unchecked(y as u64) {
                    p
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self {
            table: WitnessTable {
                l: self.table.l,
                probs,
            },
            p1: self.p1,
            p2: self.p2,
        })
    }

    /// `restrict(h).classify_unique()` without materializing the table.
    pub fn classify_unique_restricted(&self, h: &AffineHash) -> Result<UniqueClass> {
        self.check_hash(h)?;
        let mut yes_count = 0u64;
        let mut any_gap = false;
        for (y, &p) in self.table.probs().iter().enumerate() {
            let f = if h.maps_to_zero_unchecked(y as u64) {
                p
            } else {
                0.0
            };
            if f >= self.p2 {
                yes_count += 1;
                if yes_count >= 2 {
                    return Ok(UniqueClass::Neither);
                }
            } else if f > self.p1 {
                any_gap = true;
            }
        }
        Ok(match (yes_count, any_gap) {
            (1, false) => UniqueClass::UmappYes,
            (0, false) => UniqueClass::UmappNo,
            _ => UniqueClass::Neither,
        })
    }

    fn check_hash(&self, h: &AffineHash) -> Result<()> {
        if h.input_bits() != self.table.l {
            return Err(VerifierError::DimensionMismatch {
                hash_bits: h.input_bits(),
                table_bits: self.table.l,
            });
        }
        Ok(())
    }

    /// Majority-vote error reduction: each entry `f` becomes
    /// `Pr(Binomial(reps, f) >= ceil(threshold_fraction * reps))`, and the
    /// thresholds are mapped through the same tail. Monotone in `f`, so
    /// classification at the amplified thresholds is preserved.
    pub fn amplify(&self, reps: u64, threshold_fraction: f64) -> Result<Self> {
        if reps < 1 {
            return Err(VerifierError::BadAmplification("reps must be >= 1".into()));
        }
        if reps > MAX_AMPLIFY_REPS {
            return Err(VerifierError::NumericRange(format!(
                "reps {reps} exceeds {MAX_AMPLIFY_REPS}"
            )));
        }
        if !(self.p1 < threshold_fraction && threshold_fraction < self.p2) {
            return Err(VerifierError::BadAmplification(format!(
                "threshold_fraction {threshold_fraction} not inside ({}, {})",
                self.p1, self.p2
            )));
        }
        let t = (threshold_fraction * reps as f64).ceil() as u64;
        let amp = |f: f64| binomial_upper_tail(reps, f, t);
        let new_p1 = amp(self.p1);
        let new_p2 = amp(self.p2);
        if new_p1 == 0.0 && self.p1 > 0.0 {
            return Err(VerifierError::NumericRange(
                "amplified no-threshold underflowed to 0".into(),
            ));
        }
        if new_p2 == 1.0 && self.p2 < 1.0 {
            return Err(VerifierError::NumericRange(
                "amplified yes-threshold saturated at 1".into(),
            ));
        }
        let still_ordered = new_p1 < new_p2;
        if !still_ordered {
            return Err(VerifierError::NumericRange(
                "amplified thresholds collapsed".into(),
            ));
        }
        let probs = self.table.probs().iter().map(|&f| amp(f)).collect();
        Ok(Self {
            table: WitnessTable {
                l: self.table.l,
                probs,
            },
            p1: new_p1,
            p2: new_p2,
        })
    }

    /// Histogram of witnesses over the ranges `[j/l, (j+1)/l)`,
    /// `j = 1..l_ranges-1`, with the last range closed at 1. Witnesses
    /// below `1/l` land in the separate `below` bucket.
    pub fn partition_buckets(&self, l_ranges: u32) -> BucketCounts {
        assert!(l_ranges >= 2, "need at least two ranges");
        let l = l_ranges as f64;
        let mut counts = vec![0u64; (l_ranges - 1) as usize];
        let mut below = 0u64;
        for &p in self.table.probs() {
            let j = (p * l).floor() as i64;
            let j = j.min(l_ranges as i64 - 1);
            if j <= 0 {
                below += 1;
            } else {
                counts[(j - 1) as usize] += 1;
            }
        }
        BucketCounts { below, counts }
    }
}

/// Output of [`PromiseInstance::partition_buckets`]: `counts[j-1]` holds
/// `|Y_j|` for the 1-based range index `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BucketCounts {
    /// Witnesses with probability below the first range.
    pub below: u64,
    pub counts: Vec<u64>,
}

impl BucketCounts {
    pub fn lightweight_index(&self) -> Option<usize> {
        find_lightweight_index(&self.counts)
    }
}

/// Smallest 1-based `j` with `|Y_j| < 3 |Y_{j+1}|`, where `counts[0]`
/// holds `|Y_1|`. Such a `j` always exists for a yes-instance with an
/// occupied top bucket once `2^l < 3^{l-1}`; otherwise `None` is possible.
pub fn find_lightweight_index(counts: &[u64]) -> Option<usize> {
    counts
        .windows(2)
        .position(|w| w[0] < 3 * w[1])
        .map(|i| i + 1)
}

impl fmt::Display for WitnessTable {
    /// `l=<l>` header, then one probability per line in decimal. Decimal
    /// output uses the shortest round-trip form, so parse(print(x)) == x.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "l={}", self.l)?;
        for p in &self.probs {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PromiseInstance {
    /// Table format with `p1=`/`p2=` lines following the header.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "l={}", self.table.l)?;
        writeln!(f, "p1={}", self.p1)?;
        writeln!(f, "p2={}", self.p2)?;
        for p in &self.table.probs {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

fn parse_header_l(line: Option<&str>) -> Result<u32> {
    line.and_then(|s| s.trim().strip_prefix("l="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| VerifierError::Parse("expected `l=<int>` header".into()))
}

impl FromStr for WitnessTable {
    type Err = VerifierError;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let l = parse_header_l(lines.next())?;
        let probs = lines
            .filter(|line| !line.trim().is_empty())
            .map(|line| {
                line.trim()
                    .parse::<f64>()
                    .map_err(|e| VerifierError::Parse(format!("bad probability `{line}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        WitnessTable::new(l, probs)
    }
}

impl FromStr for PromiseInstance {
    type Err = VerifierError;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let l = parse_header_l(lines.next())?;
        let mut take_threshold = |key: &str| -> Result<f64> {
            lines
                .next()
                .and_then(|line| line.trim().strip_prefix(key))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| VerifierError::Parse(format!("expected `{key}<float>` line")))
        };
        let p1 = take_threshold("p1=")?;
        let p2 = take_threshold("p2=")?;
        let probs = lines
            .filter(|line| !line.trim().is_empty())
            .map(|line| {
                line.trim()
                    .parse::<f64>()
                    .map_err(|e| VerifierError::Parse(format!("bad probability `{line}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        PromiseInstance::new(WitnessTable::new(l, probs)?, p1, p2)
    }
}

/// Smallest `reps` whose amplification pushes `p2` up to `target_yes` and
/// `p1` down to `target_no`, using the midpoint of the gap as the vote
/// threshold. Scans upward with exact tails; the Chernoff bound only caps
/// the scan.
pub fn find_amplification_reps(
    p1: f64,
    p2: f64,
    target_no: f64,
    target_yes: f64,
) -> Result<u64> {
    if !(0.0 <= p1 && p1 < p2 && p2 <= 1.0) {
        return Err(VerifierError::BadThresholds { p1, p2 });
    }
    let thr = 0.5 * (p1 + p2);
    // Chernoff: reps ~ ln(1/eps) / (2 (p2-thr)^2) suffices; double it and
    // cap the scan there.
    let eps = (1.0 - target_yes).min(target_no).max(1e-12);
    let slack = (p2 - thr).min(thr - p1);
    let cap = ((eps.recip().ln() / (2.0 * slack * slack)).ceil() * 2.0 + 16.0) as u64;
    let cap = cap.min(MAX_AMPLIFY_REPS);
    for reps in 1..=cap {
        let t = (thr * reps as f64).ceil() as u64;
        if binomial_upper_tail(reps, p2, t) >= target_yes
            && binomial_upper_tail(reps, p1, t) <= target_no
        {
            return Ok(reps);
        }
    }
    Err(VerifierError::NumericRange(format!(
        "no reps <= {cap} reaches targets ({target_no}, {target_yes})"
    )))
}
