//! Isolation reductions against exact enumeration oracles.
//!
//! Three reductions share one skeleton: sweep a family of threshold
//! intervals (trivial for the deterministic case), and for each interval
//! sample hash filters of geometrically growing screening strength, restrict
//! the verifier to `h^{-1}(0)`, and ask a unique-promise oracle about the
//! result. The oracle here is not an assumption: witness tables are small
//! enough to classify by full enumeration, so promise queries are answered
//! exactly. A real oracle that errs with probability 1/3 on promise inputs
//! would scale every acceptance lower bound by 2/3 and change nothing else.
//!
//! Queries whose restricted instance violates the unique promise are
//! answered by an explicit [`OraclePolicy`]; `AnswerNo` is the adversarial
//! default for completeness measurements. Soundness never depends on the
//! policy: restricting a no-instance yields a no-instance, so no-instances
//! are rejected on every random string.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::hashfam::{AffineHash, HashFamError};
use crate::seedstream::trial_rng;
use crate::stats::BinomialEstimate;
use crate::verifier::{
    PromiseInstance, TmappClass, UniqueClass, VerifierError, WitnessTable,
};

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("table is not deterministic (entries outside {{0,1}})")]
    NotDeterministic,
    #[error("input instance violates its own promise")]
    PromiseViolatedInput,
    #[error("witness bit-count {0} too small for the interval sweep (need l >= 3)")]
    WitnessCountTooSmall(u32),
    #[error("amplification with reps={reps} reaches ({got_p1}, {got_p2}), short of (1/{l}, 1-1/{l})")]
    InsufficientAmplification {
        reps: u64,
        got_p1: f64,
        got_p2: f64,
        l: u32,
    },
    #[error("thresholds ({p1}, {p2}) are not the required (1/{l}, 1-1/{l})")]
    WrongThresholds { p1: f64, p2: f64, l: u32 },
    #[error("witness sets must be disjoint and duplicate-free")]
    OverlappingSets,
    #[error("witness {value:#x} does not fit in {bits} bits")]
    WitnessOutOfRange { value: u64, bits: u32 },
    #[error(transparent)]
    Verifier(#[from] VerifierError),
    #[error(transparent)]
    Hash(#[from] HashFamError),
}

type Result<T> = std::result::Result<T, ReductionError>;

/// What the unique-promise oracle answers when a query violates the promise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OraclePolicy {
    AnswerNo,
    AnswerYes,
    AnswerRandom,
}

impl OraclePolicy {
    pub const ALL: [OraclePolicy; 3] = [
        OraclePolicy::AnswerNo,
        OraclePolicy::AnswerYes,
        OraclePolicy::AnswerRandom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OraclePolicy::AnswerNo => "answer-no",
            OraclePolicy::AnswerYes => "answer-yes",
            OraclePolicy::AnswerRandom => "answer-random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "answer-no" => Some(OraclePolicy::AnswerNo),
            "answer-yes" => Some(OraclePolicy::AnswerYes),
            "answer-random" => Some(OraclePolicy::AnswerRandom),
            _ => None,
        }
    }

    fn answer<R: Rng + ?Sized>(&self, class: UniqueClass, rng: &mut R) -> bool {
        match class {
            UniqueClass::UmappYes => true,
            UniqueClass::UmappNo => false,
            UniqueClass::Neither => match self {
                OraclePolicy::AnswerNo => false,
                OraclePolicy::AnswerYes => true,
                OraclePolicy::AnswerRandom => rng.random(),
            },
        }
    }
}

/// One oracle query: interval index `k` (0 when the reduction has a single
/// fixed interval), hash index `b` (the filter was drawn with `b+2` output
/// bits), the exact classification of the restricted instance, and the
/// policy-mediated oracle answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QueryRecord {
    pub k: u32,
    pub b: u32,
    pub classification: UniqueClass,
    pub answer: bool,
}

/// Full trace of one reduction run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub accepted: bool,
    pub queries: Vec<QueryRecord>,
    /// Queries whose restricted instance was genuinely unique-yes.
    pub unique_yes_hits: u64,
}

impl ReductionReport {
    fn from_queries(queries: Vec<QueryRecord>) -> Self {
        let accepted = queries.iter().any(|q| q.answer);
        let unique_yes_hits = queries
            .iter()
            .filter(|q| q.classification == UniqueClass::UmappYes)
            .count() as u64;
        Self {
            accepted,
            queries,
            unique_yes_hits,
        }
    }
}

/// Success probability of isolating among `w` witnesses with the ideal
/// per-element filter of rate `1/w`: exactly `(1 - 1/w)^{w-1}`, which is
/// at least `1/e` for every `w >= 1`.
pub fn component1_success_prob(w: u64) -> f64 {
    assert!(w >= 1, "need at least one witness");
    if w == 1 {
        return 1.0;
    }
    let base = 1.0 - 1.0 / w as f64;
    if w - 1 <= i32::MAX as u64 {
        base.powi((w - 1) as i32)
    } else {
        (((w - 1) as f64) * (-1.0 / w as f64).ln_1p()).exp()
    }
}

/// `k` with `2^k <= w <= 2^{k+1}` (the floor log; ties at powers of two
/// resolve downward-compatible). Filters for size `w` use `k+2` output bits.
pub fn hash_index_for_size(w: u64) -> u32 {
    assert!(w >= 1);
    63 - w.leading_zeros()
}

/// Isolation lower bound `|S1| / (8 (|S1| + |S2|))`; with `S2` empty this
/// is the plain `1/8`.
pub fn isolation_bound(s1: usize, s2: usize) -> f64 {
    if s1 == 0 {
        return 0.0;
    }
    s1 as f64 / (8.0 * (s1 + s2) as f64)
}

/// Reduction for deterministic tables: for each `k in [l]` draw a filter
/// with `k+2` output bits, restrict, and query. Internal thresholds are
/// (1/3, 2/3); entries are 0/1 so any interior pair is equivalent.
pub fn vv_np_run<R: Rng + ?Sized>(
    table: &WitnessTable,
    policy: OraclePolicy,
    rng: &mut R,
) -> Result<ReductionReport> {
    if !table.is_deterministic() {
        return Err(ReductionError::NotDeterministic);
    }
    let l = table.witness_bits();
    let inst = PromiseInstance::new(table.clone(), 1.0 / 3.0, 2.0 / 3.0)?;
    let mut queries = Vec::with_capacity(l as usize);
    for b in 1..=l {
        let h = AffineHash::sample(l, b + 2, rng)?;
        let classification = inst.classify_unique_restricted(&h)?;
        let answer = policy.answer(classification, rng);
        queries.push(QueryRecord {
            k: 0,
            b,
            classification,
            answer,
        });
    }
    Ok(ReductionReport::from_queries(queries))
}

/// Shared interval sweep: thresholds `(k/l, (k+1)/l)` for `k in [l-2]`,
/// filters with `b+2` output bits for `b in [l]`.
fn run_interval_sweep<R: Rng + ?Sized>(
    working: &PromiseInstance,
    policy: OraclePolicy,
    rng: &mut R,
) -> Result<ReductionReport> {
    let l = working.witness_bits();
    let lf = l as f64;
    let mut queries = Vec::with_capacity(((l - 2) * l) as usize);
    for k in 1..=l - 2 {
        let interval = working.with_thresholds(k as f64 / lf, (k + 1) as f64 / lf)?;
        for b in 1..=l {
            let h = AffineHash::sample(l, b + 2, rng)?;
            let classification = interval.classify_unique_restricted(&h)?;
            let answer = policy.answer(classification, rng);
            queries.push(QueryRecord {
                k,
                b,
                classification,
                answer,
            });
        }
    }
    Ok(ReductionReport::from_queries(queries))
}

/// Reduction for probabilistic tables. Amplifies the instance so the
/// thresholds clear `(1/l, 1-1/l)`, re-labels to exactly that pair
/// (shrinking the interval preserves yes/no), then sweeps intervals and
/// filters. Rejects promise-violating inputs at the door.
pub fn vv_ma_run<R: Rng + ?Sized>(
    inst: &PromiseInstance,
    reps: u64,
    policy: OraclePolicy,
    rng: &mut R,
) -> Result<ReductionReport> {
    if inst.classify() == TmappClass::PromiseViolated {
        return Err(ReductionError::PromiseViolatedInput);
    }
    let l = inst.witness_bits();
    if l < 3 {
        return Err(ReductionError::WitnessCountTooSmall(l));
    }
    let lf = l as f64;
    let amplified = inst.amplify(reps, 0.5 * (inst.p1() + inst.p2()))?;
    if amplified.p1() > 1.0 / lf || amplified.p2() < 1.0 - 1.0 / lf {
        return Err(ReductionError::InsufficientAmplification {
            reps,
            got_p1: amplified.p1(),
            got_p2: amplified.p2(),
            l,
        });
    }
    let working = amplified.with_thresholds(1.0 / lf, 1.0 - 1.0 / lf)?;
    run_interval_sweep(&working, policy, rng)
}

/// Reduction for circuit-derived tables. The table must already sit at the
/// amplified thresholds `(1/l, 1-1/l)` (see `qsim::basis_witness_table`);
/// the filter acts as a classical pre-check on basis witnesses, which on a
/// table is exactly the same restriction as in the probabilistic case.
pub fn vv_qcma_run<R: Rng + ?Sized>(
    inst: &PromiseInstance,
    policy: OraclePolicy,
    rng: &mut R,
) -> Result<ReductionReport> {
    let l = inst.witness_bits();
    if l < 3 {
        return Err(ReductionError::WitnessCountTooSmall(l));
    }
    let lf = l as f64;
    if (inst.p1() - 1.0 / lf).abs() > 1e-12 || (inst.p2() - (1.0 - 1.0 / lf)).abs() > 1e-12 {
        return Err(ReductionError::WrongThresholds {
            p1: inst.p1(),
            p2: inst.p2(),
            l,
        });
    }
    if inst.classify() == TmappClass::PromiseViolated {
        return Err(ReductionError::PromiseViolatedInput);
    }
    run_interval_sweep(inst, policy, rng)
}

fn check_witness_set(l: u32, set: &[u64]) -> Result<()> {
    for &y in set {
        if l < 64 && y >> l != 0 {
            return Err(ReductionError::WitnessOutOfRange { value: y, bits: l });
        }
    }
    Ok(())
}

/// Empirical frequency over sampled filters of the event
/// `|h^{-1}(0) ∩ S1| = 1` and `|h^{-1}(0) ∩ S2| = 0`, with `m` output
/// bits. Trials draw from independent substreams of `master_seed`.
pub fn estimate_isolation_probability(
    l: u32,
    s1: &[u64],
    s2: &[u64],
    m: u32,
    trials: u64,
    master_seed: u64,
) -> Result<BinomialEstimate> {
    check_witness_set(l, s1)?;
    check_witness_set(l, s2)?;
    let mut all: Vec<u64> = s1.iter().chain(s2).copied().collect();
    all.sort_unstable();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(ReductionError::OverlappingSets);
    }
    let mut successes = 0u64;
    for trial in 0..trials {
        let mut rng = trial_rng(master_seed, trial);
        let h = AffineHash::sample(l, m, &mut rng)?;
        let in_s1 = s1
            .iter()
            .filter(|&&y| h.maps_to_zero_unchecked(y))
            .take(2)
            .count();
        if in_s1 == 1 && !s2.iter().any(|&y| h.maps_to_zero_unchecked(y)) {
            successes += 1;
        }
    }
    Ok(BinomialEstimate::new(successes, trials))
}

/// Acceptance statistics of a reduction over independent trials.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AcceptanceEstimate {
    /// Fraction of runs that accepted.
    pub accepted: BinomialEstimate,
    /// Fraction of runs in which some query was genuinely unique-yes.
    pub runs_with_unique_yes: BinomialEstimate,
}

fn estimate_acceptance<F>(trials: u64, master_seed: u64, mut run: F) -> Result<AcceptanceEstimate>
where
    F: FnMut(&mut rand_chacha::ChaCha12Rng) -> Result<ReductionReport>,
{
    let mut accepted = 0u64;
    let mut with_unique = 0u64;
    for trial in 0..trials {
        let mut rng = trial_rng(master_seed, trial);
        let report = run(&mut rng)?;
        if report.accepted {
            accepted += 1;
        }
        if report.unique_yes_hits > 0 {
            with_unique += 1;
        }
    }
    Ok(AcceptanceEstimate {
        accepted: BinomialEstimate::new(accepted, trials),
        runs_with_unique_yes: BinomialEstimate::new(with_unique, trials),
    })
}

pub fn estimate_np_acceptance(
    table: &WitnessTable,
    policy: OraclePolicy,
    trials: u64,
    master_seed: u64,
) -> Result<AcceptanceEstimate> {
    estimate_acceptance(trials, master_seed, |rng| vv_np_run(table, policy, rng))
}

pub fn estimate_ma_acceptance(
    inst: &PromiseInstance,
    reps: u64,
    policy: OraclePolicy,
    trials: u64,
    master_seed: u64,
) -> Result<AcceptanceEstimate> {
    estimate_acceptance(trials, master_seed, |rng| vv_ma_run(inst, reps, policy, rng))
}

pub fn estimate_qcma_acceptance(
    inst: &PromiseInstance,
    policy: OraclePolicy,
    trials: u64,
    master_seed: u64,
) -> Result<AcceptanceEstimate> {
    estimate_acceptance(trials, master_seed, |rng| vv_qcma_run(inst, policy, rng))
}

/// Instance generators used by experiments and tests.
pub mod presets {
    use super::*;

    const THIRD: f64 = 1.0 / 3.0;
    const TWO_THIRDS: f64 = 2.0 / 3.0;

    /// Deterministic table accepting exactly the given witnesses.
    pub fn table_with_witnesses(l: u32, witnesses: &[u64]) -> WitnessTable {
        let mut probs = vec![0.0; 1usize << l];
        for &y in witnesses {
            probs[y as usize] = 1.0;
        }
        WitnessTable::new(l, probs).expect("valid table")
    }

    /// All-rejecting deterministic table.
    pub fn zero_table(l: u32) -> WitnessTable {
        table_with_witnesses(l, &[])
    }

    /// One witness at probability 1, the rest at 0, thresholds (1/3, 2/3).
    pub fn single_witness_instance(l: u32) -> PromiseInstance {
        PromiseInstance::new(table_with_witnesses(l, &[0]), THIRD, TWO_THIRDS)
            .expect("valid instance")
    }

    /// The adversarial yes-instance: two witnesses accepted with certainty
    /// and everything else stuck in the middle of the gap.
    pub fn problematic_instance(l: u32) -> PromiseInstance {
        let n = 1usize << l;
        let mut probs = vec![0.5; n];
        probs[0] = 1.0;
        probs[n - 1] = 1.0;
        PromiseInstance::new(
            WitnessTable::new(l, probs).expect("valid table"),
            THIRD,
            TWO_THIRDS,
        )
        .expect("valid instance")
    }

    /// A no-instance with every witness at the same sub-threshold level.
    pub fn constant_no_instance(l: u32, level: f64) -> PromiseInstance {
        assert!(level <= THIRD);
        PromiseInstance::new(
            WitnessTable::constant(l, level).expect("valid table"),
            THIRD,
            TWO_THIRDS,
        )
        .expect("valid instance")
    }

    /// Deterministic table with `w` accepting witnesses at seeded-random
    /// distinct positions.
    pub fn random_witness_table(l: u32, w: u64, rng: &mut impl Rng) -> WitnessTable {
        let n = 1u64 << l;
        assert!(w <= n);
        // Partial Fisher-Yates over the index space.
        let mut positions: Vec<u64> = (0..n).collect();
        for i in 0..w as usize {
            let j = rng.random_range(i..n as usize);
            positions.swap(i, j);
        }
        table_with_witnesses(l, &positions[..w as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seedstream::setup_rng;
    use crate::verifier::find_amplification_reps;
    use proptest::prelude::*;

    #[test]
    fn component1_closed_form() {
        assert_eq!(component1_success_prob(1), 1.0);
        assert!((component1_success_prob(2) - 0.5).abs() < 1e-15);
        let e_inv = (-1.0f64).exp();
        let big = component1_success_prob(1_000_000);
        assert!(big >= e_inv);
        assert!((big - e_inv).abs() < 1e-5);
        // Independent route: exp((w-1) ln(1 - 1/w)).
        for w in [2u64, 3, 10, 1000, 12345] {
            let via_log = (((w - 1) as f64) * (-1.0 / w as f64).ln_1p()).exp();
            let direct = component1_success_prob(w);
            assert!((via_log - direct).abs() <= 1e-12 * direct);
        }
    }

    #[test]
    fn hash_index_brackets_the_size() {
        for w in 1u64..100 {
            let k = hash_index_for_size(w);
            assert!(1u64 << k <= w && w <= 1u64 << (k + 1), "w={w} k={k}");
        }
        assert_eq!(hash_index_for_size(5), 2);
        assert_eq!(hash_index_for_size(8), 3);
    }

    #[test]
    fn np_soundness_is_perfect() {
        let table = presets::zero_table(8);
        for policy in OraclePolicy::ALL {
            for seed in 0..50u64 {
                let report = vv_np_run(&table, policy, &mut setup_rng(seed)).unwrap();
                assert!(!report.accepted);
                assert_eq!(report.unique_yes_hits, 0);
                assert!(report
                    .queries
                    .iter()
                    .all(|q| q.classification == UniqueClass::UmappNo));
            }
        }
    }

    #[test]
    fn np_single_witness_completeness() {
        let table = presets::table_with_witnesses(10, &[373]);
        let est = estimate_np_acceptance(&table, OraclePolicy::AnswerNo, 4000, 11).unwrap();
        assert!(
            est.accepted.meets_lower_bound(0.125),
            "estimate {}",
            est.accepted.p_hat()
        );
    }

    #[test]
    fn np_five_witnesses_unique_yes_rate() {
        let table = presets::random_witness_table(10, 5, &mut setup_rng(5));
        let est = estimate_np_acceptance(&table, OraclePolicy::AnswerNo, 4000, 13).unwrap();
        assert!(
            est.runs_with_unique_yes.meets_lower_bound(0.125),
            "estimate {}",
            est.runs_with_unique_yes.p_hat()
        );
        // Under the adversarial policy, acceptance means a genuine hit.
        assert_eq!(
            est.accepted.successes,
            est.runs_with_unique_yes.successes
        );
    }

    #[test]
    fn rejects_non_deterministic_table() {
        let table = WitnessTable::new(2, vec![0.4, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(
            vv_np_run(&table, OraclePolicy::AnswerNo, &mut setup_rng(0)).unwrap_err(),
            ReductionError::NotDeterministic
        );
    }

    #[test]
    fn isolation_estimates_respect_bounds() {
        // Single-set case at a few sizes.
        for (w, seed) in [(3u64, 21u64), (5, 22), (9, 23)] {
            let s1: Vec<u64> = (0..w).collect();
            let m = hash_index_for_size(w) + 2;
            let est = estimate_isolation_probability(10, &s1, &[], m, 20_000, seed).unwrap();
            assert!(
                est.meets_lower_bound(0.125),
                "w={w}: {}",
                est.p_hat()
            );
        }
        // Equal split: bound a/(8b) = 1/16.
        let s1: Vec<u64> = (0..8).collect();
        let s2: Vec<u64> = (8..16).collect();
        let m = hash_index_for_size(16) + 2;
        let est = estimate_isolation_probability(10, &s1, &s2, m, 20_000, 31).unwrap();
        assert!(est.meets_lower_bound(isolation_bound(8, 8)), "{}", est.p_hat());
    }

    #[test]
    fn isolation_empty_s1_is_impossible() {
        let s2: Vec<u64> = (0..4).collect();
        let est = estimate_isolation_probability(10, &[], &s2, 4, 500, 7).unwrap();
        assert_eq!(est.successes, 0);
    }

    #[test]
    fn isolation_rejects_overlap() {
        assert_eq!(
            estimate_isolation_probability(10, &[1, 2], &[2, 3], 4, 10, 0).unwrap_err(),
            ReductionError::OverlappingSets
        );
        assert_eq!(
            estimate_isolation_probability(10, &[1, 1], &[], 4, 10, 0).unwrap_err(),
            ReductionError::OverlappingSets
        );
    }

    fn ma_reps(l: u32) -> u64 {
        let lf = l as f64;
        find_amplification_reps(1.0 / 3.0, 2.0 / 3.0, 1.0 / lf, 1.0 - 1.0 / lf).unwrap()
    }

    #[test]
    fn ma_soundness_is_perfect() {
        let inst = presets::constant_no_instance(6, 0.2);
        let reps = ma_reps(6);
        for policy in OraclePolicy::ALL {
            for seed in 0..30u64 {
                let report = vv_ma_run(&inst, reps, policy, &mut setup_rng(seed)).unwrap();
                assert!(!report.accepted, "policy {policy:?} seed {seed}");
            }
        }
    }

    #[test]
    fn ma_single_witness_completeness() {
        let inst = presets::single_witness_instance(8);
        let est =
            estimate_ma_acceptance(&inst, ma_reps(8), OraclePolicy::AnswerNo, 2000, 17).unwrap();
        assert!(
            est.accepted.meets_lower_bound(0.125),
            "estimate {}",
            est.accepted.p_hat()
        );
    }

    #[test]
    fn ma_problematic_instance_completeness() {
        let inst = presets::problematic_instance(8);
        let est =
            estimate_ma_acceptance(&inst, ma_reps(8), OraclePolicy::AnswerNo, 2000, 19).unwrap();
        assert!(
            est.accepted.meets_lower_bound(1.0 / 24.0),
            "estimate {}",
            est.accepted.p_hat()
        );
    }

    #[test]
    fn ma_rejects_promise_violating_input() {
        let table = WitnessTable::new(3, vec![0.5; 8]).unwrap();
        let inst = PromiseInstance::new(table, 1.0 / 3.0, 2.0 / 3.0).unwrap();
        assert_eq!(
            vv_ma_run(&inst, 15, OraclePolicy::AnswerNo, &mut setup_rng(0)).unwrap_err(),
            ReductionError::PromiseViolatedInput
        );
    }

    #[test]
    fn ma_rejects_insufficient_reps() {
        let inst = presets::single_witness_instance(10);
        assert!(matches!(
            vv_ma_run(&inst, 1, OraclePolicy::AnswerNo, &mut setup_rng(0)).unwrap_err(),
            ReductionError::InsufficientAmplification { .. }
        ));
    }

    #[test]
    fn qcma_requires_amplified_thresholds() {
        let inst = presets::single_witness_instance(8);
        assert!(matches!(
            vv_qcma_run(&inst, OraclePolicy::AnswerNo, &mut setup_rng(0)).unwrap_err(),
            ReductionError::WrongThresholds { .. }
        ));
    }

    #[test]
    fn qcma_amplified_single_witness_completeness() {
        let l = 8u32;
        let lf = l as f64;
        let mut probs = vec![0.0; 1 << l];
        probs[5] = 1.0;
        let inst = PromiseInstance::new(
            WitnessTable::new(l, probs).unwrap(),
            1.0 / lf,
            1.0 - 1.0 / lf,
        )
        .unwrap();
        let est = estimate_qcma_acceptance(&inst, OraclePolicy::AnswerNo, 2000, 23).unwrap();
        assert!(
            est.accepted.meets_lower_bound(0.125),
            "estimate {}",
            est.accepted.p_hat()
        );
    }

    #[test]
    fn report_serializes_with_expected_fields() {
        let table = presets::table_with_witnesses(3, &[1]);
        let report = vv_np_run(&table, OraclePolicy::AnswerNo, &mut setup_rng(4)).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json.get("accepted").is_some());
        assert!(json.get("unique_yes_hits").is_some());
        let q = &json["queries"][0];
        for field in ["k", "b", "classification", "answer"] {
            assert!(q.get(field).is_some(), "missing {field}");
        }
    }

    proptest! {
        /// accepted == any query answered yes, and unique hits never exceed
        /// the query count.
        #[test]
        fn report_invariants(seed in any::<u64>(), w in 0u64..20) {
            let table = presets::random_witness_table(6, w, &mut setup_rng(seed));
            let report = vv_np_run(&table, OraclePolicy::AnswerRandom, &mut setup_rng(seed ^ 1)).unwrap();
            prop_assert_eq!(report.accepted, report.queries.iter().any(|q| q.answer));
            prop_assert!(report.unique_yes_hits <= report.queries.len() as u64);
        }

        /// Soundness under every policy for random no-instances.
        #[test]
        fn soundness_policy_independent(seed in any::<u64>(), l in 3u32..7) {
            let mut rng = setup_rng(seed);
            let probs: Vec<f64> = (0..1usize << l)
                .map(|_| rng.random::<f64>() / 3.0)
                .collect();
            let inst = PromiseInstance::new(
                WitnessTable::new(l, probs).unwrap(),
                1.0 / 3.0,
                2.0 / 3.0,
            )
            .unwrap();
            let reps = ma_reps(l);
            for policy in OraclePolicy::ALL {
                let report = vv_ma_run(&inst, reps, policy, &mut setup_rng(seed ^ 2)).unwrap();
                prop_assert!(!report.accepted);
            }
        }

        /// A genuine unique-yes query forces acceptance: the oracle answers
        /// promise queries correctly under every policy, so only the
        /// off-promise behavior differs.
        #[test]
        fn unique_yes_implies_accept(seed in any::<u64>(), w in 1u64..20) {
            let table = presets::random_witness_table(6, w, &mut setup_rng(seed));
            for policy in [OraclePolicy::AnswerNo, OraclePolicy::AnswerRandom] {
                let report = vv_np_run(&table, policy, &mut setup_rng(seed ^ 3)).unwrap();
                if report.unique_yes_hits > 0 {
                    prop_assert!(report.accepted);
                }
            }
        }
    }
}
