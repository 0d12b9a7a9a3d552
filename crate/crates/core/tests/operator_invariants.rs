//! Operator-level invariants tying the statevector, eigenbasis, and
//! promise-classification views of the acceptance operator together.

use num_complex::Complex64;
use rand::Rng;

use vvlab::linalg::{eigen_hermitian_jacobi, CMat, CVec};
use vvlab::qsim::{
    self, build_q_operator, classify_q, projection_gap_experiment, stock, top_two_eigenvectors,
    QOperator,
};
use vvlab::seedstream::{mix_seed, setup_rng};

fn inner(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Acceptance of any state is the eigenvalue mixture of its expansion
/// coefficients: <psi|Q|psi> = sum_i |a_i|^2 lambda_i.
#[test]
fn convex_combination_identity() {
    for seed in 0..10u64 {
        let mut rng = setup_rng(mix_seed(0xCC, seed));
        let l = rng.random_range(1..=4u32);
        let m = rng.random_range(0..=2u32);
        let circuit = stock::random_circuit(l, m, 16, &mut rng);
        let q = build_q_operator(&circuit).unwrap();
        let (values, vectors) = eigen_hermitian_jacobi(q.matrix());
        let dim = q.dim();
        for _ in 0..20 {
            let psi = qsim::random_state(dim, &mut rng);
            let mixture: f64 = (0..dim)
                .map(|i| {
                    let col = vectors.column(i).to_owned();
                    inner(&col, &psi).norm_sqr() * values[i]
                })
                .sum();
            let direct = q.acceptance(&psi).unwrap();
            assert!(
                (mixture - direct).abs() <= 1e-9,
                "seed {seed}: {mixture} vs {direct}"
            );
        }
    }
}

fn conjugated_diagonal(values: &[f64], seed: u64) -> QOperator {
    let dim = values.len();
    let mut rng = setup_rng(seed);
    let u = qsim::haar_unitary(dim, &mut rng);
    let mut m = CMat::zeros((dim, dim));
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &v) in values.iter().enumerate() {
                acc += u[[r, k]] * v * u[[c, k]].conj();
            }
            m[[r, c]] = acc;
        }
    }
    for r in 0..dim {
        for c in 0..r {
            let avg = 0.5 * (m[[r, c]] + m[[c, r]].conj());
            m[[r, c]] = avg;
            m[[c, r]] = avg.conj();
        }
        m[[r, r]] = Complex64::new(m[[r, r]].re, 0.0);
    }
    QOperator::new(m).unwrap()
}

/// The state-based unique-yes condition (one state accepted at 2/3 or
/// better while every orthogonal state stays at 1/3 or below) holds iff
/// lambda_1 >= 2/3 and lambda_2 <= 1/3. Both directions are checked with
/// explicit witness states built from the eigenbasis.
#[test]
fn unique_promise_definitions_agree() {
    let operators: Vec<QOperator> = vec![
        build_q_operator(&stock::unique_all_ones(3)).unwrap(),
        build_q_operator(&stock::all_reject(3)).unwrap(),
        conjugated_diagonal(&[0.9, 0.2, 0.1, 0.05], 1),
        conjugated_diagonal(&[0.9, 0.8, 0.1, 0.0], 2),
        conjugated_diagonal(&[0.5, 0.4, 0.3, 0.2], 3),
        conjugated_diagonal(&[1.0, 0.0], 4),
        conjugated_diagonal(&[0.7, 0.35, 0.0, 0.0], 5),
    ];
    for (idx, q) in operators.iter().enumerate() {
        let spec = q.spectrum_desc().unwrap();
        let (l1, l2) = (spec[0], spec.get(1).copied().unwrap_or(0.0));
        let operator_level = l1 >= 2.0 / 3.0 && l2 <= 1.0 / 3.0;
        let (v1, v2) = top_two_eigenvectors(q).unwrap();
        if operator_level {
            // Witness direction: the top eigenvector is accepted at l1 and
            // everything orthogonal to it is capped by l2.
            assert!(q.acceptance(&v1).unwrap() >= 2.0 / 3.0 - 1e-9);
            let dim = q.dim();
            let mut rng = setup_rng(mix_seed(0xDEF, idx as u64));
            for _ in 0..20 {
                // Random state orthogonal to v1.
                let raw = qsim::random_state(dim, &mut rng);
                let overlap = inner(&v1, &raw);
                let mut phi: CVec = raw.clone();
                for i in 0..dim {
                    phi[i] -= overlap * v1[i];
                }
                let norm: f64 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-6 {
                    continue;
                }
                for z in phi.iter_mut() {
                    *z /= norm;
                }
                assert!(
                    q.acceptance(&phi).unwrap() <= 1.0 / 3.0 + 1e-9,
                    "operator {idx}: orthogonal state above 1/3"
                );
            }
        } else if l1 >= 2.0 / 3.0 {
            // l2 > 1/3: any accepted candidate has an orthogonal companion
            // inside the top-2 eigenspace that is accepted above 1/3.
            let mut rng = setup_rng(mix_seed(0xFED, idx as u64));
            for _ in 0..20 {
                // Candidate inside span(v1, v2) weighted toward v1 so its
                // acceptance clears 2/3 when possible.
                let t: f64 = rng.random::<f64>() * 0.3;
                let phase = Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
                let mut psi = CVec::zeros(q.dim());
                for i in 0..q.dim() {
                    psi[i] = (1.0 - t * t).sqrt() * v1[i] + t * phase * v2[i];
                }
                if q.acceptance(&psi).unwrap() < 2.0 / 3.0 {
                    continue;
                }
                // Companion in the same 2-dim space, orthogonal to psi.
                let c1 = inner(&psi, &v1);
                let c2 = inner(&psi, &v2);
                let mut phi = CVec::zeros(q.dim());
                for i in 0..q.dim() {
                    phi[i] = c2 * v1[i] - c1 * v2[i];
                }
                let norm: f64 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in phi.iter_mut() {
                    *z /= norm;
                }
                assert!(inner(&psi, &phi).norm() < 1e-9);
                assert!(
                    q.acceptance(&phi).unwrap() > 1.0 / 3.0,
                    "operator {idx}: no orthogonal refuter found"
                );
            }
        } else {
            // l1 < 2/3: no state reaches the yes threshold at all.
            assert!(q.acceptance(&v1).unwrap() < 2.0 / 3.0);
        }
        // classify_q agrees with the hand comparison.
        let labels = classify_q(q, 1.0 / 3.0, 2.0 / 3.0, 0.01).unwrap();
        assert_eq!(labels.uqma_yes, operator_level, "operator {idx}");
    }
}

/// The circuit-table reduction end to end: a circuit accepting exactly one
/// basis witness clears the 1/8 completeness floor, and a filtered witness
/// has restricted acceptance probability exactly zero.
#[test]
fn circuit_reduction_completeness() {
    use vvlab::hashfam::AffineHash;
    use vvlab::reduction::{estimate_qcma_acceptance, OraclePolicy};

    let l = 5u32;
    let lf = l as f64;
    let circuit = stock::unique_all_ones(l);
    let inst = qsim::basis_witness_table(&circuit, 1.0 / lf, 1.0 - 1.0 / lf).unwrap();
    let est = estimate_qcma_acceptance(&inst, OraclePolicy::AnswerNo, 2000, 0x51).unwrap();
    assert!(
        est.accepted.meets_lower_bound(0.125),
        "estimate {}",
        est.accepted.p_hat()
    );

    // A filter that rejects the accepting witness zeroes it outright.
    let winner = (1u64 << l) - 1;
    let mut rng = setup_rng(0x52);
    let h = std::iter::repeat_with(|| AffineHash::sample(l, 3, &mut rng).unwrap())
        .find(|h| !h.maps_to_zero(winner).unwrap())
        .unwrap();
    let restricted = inst.restrict(&h).unwrap();
    assert_eq!(restricted.table.prob(winner), 0.0);
}

/// Projection-gap statistics do not depend on which orthonormal pair spans
/// the subspace: a circuit's top-2 eigenvectors and a Haar-random pair give
/// the same mean within 3 pooled standard errors.
#[test]
fn projection_gap_subspace_invariance() {
    let q = build_q_operator(&stock::unique_all_ones(3)).unwrap();
    let eig_pair = top_two_eigenvectors(&q).unwrap();
    let rand_pair = qsim::haar_isometry_pair(8, &mut setup_rng(0xABC));
    let a = projection_gap_experiment(3, 4, 4000, &eig_pair, 11).unwrap();
    let b = projection_gap_experiment(3, 4, 4000, &rand_pair, 12).unwrap();
    let var = |r: &qsim::ProjectionExperimentResult| {
        let m = r.mean_gap;
        r.gaps.iter().map(|g| (g - m) * (g - m)).sum::<f64>() / (r.gaps.len() - 1) as f64
    };
    let se = (var(&a) / a.gaps.len() as f64 + var(&b) / b.gaps.len() as f64).sqrt();
    assert!(
        (a.mean_gap - b.mean_gap).abs() <= 3.0 * se,
        "means {} vs {} (3se {})",
        a.mean_gap,
        b.mean_gap,
        3.0 * se
    );
}
