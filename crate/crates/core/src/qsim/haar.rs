//! Haar-measure sampling.
//!
//! Unitaries are drawn by orthonormalizing a square complex-Gaussian
//! (Ginibre) matrix with modified Gram-Schmidt. Normalization makes the
//! implicit triangular factor's diagonal real and positive, which removes
//! the phase ambiguity of QR and leaves exactly the Haar distribution.
//! A second orthogonalization pass keeps columns orthonormal to ~1e-14.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{CMat, CVec};

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Gaussian-random unit vector: uniform on the sphere in C^dim.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVec {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return CVec::from_vec(v.into_iter().map(|z| z / norm).collect());
        }
    }
}

/// Orthonormalize `cols` in place with two-pass modified Gram-Schmidt.
/// Returns false if a column degenerated (numerically never for Gaussians).
fn mgs(cols: &mut [Vec<Complex64>]) -> bool {
    let k = cols.len();
    for j in 0..k {
        for _pass in 0..2 {
            for i in 0..j {
                let proj: Complex64 = cols[i]
                    .iter()
                    .zip(cols[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let (head, tail) = cols.split_at_mut(j);
                for (a, b) in head[i].iter().zip(tail[0].iter_mut()) {
                    *b -= proj * a;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return false;
        }
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    true
}

/// Haar-random unitary on C^n, columns orthonormal to ~1e-14.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    assert!(n >= 1);
    loop {
        let mut cols: Vec<Vec<Complex64>> =
            (0..n)
                .map(|_| (0..n).map(|_| complex_normal(rng)).collect())
                .collect();
        if !mgs(&mut cols) {
            continue;
        }
        let mut u = CMat::zeros((n, n));
        for (j, col) in cols.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                u[[i, j]] = z;
            }
        }
        return u;
    }
}

/// First two columns of a Haar-random unitary on C^n, sampled directly:
/// a uniformly random orthonormal pair.
pub fn haar_isometry_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (CVec, CVec) {
    assert!(n >= 2);
    loop {
        let mut cols: Vec<Vec<Complex64>> =
            (0..2)
                .map(|_| (0..n).map(|_| complex_normal(rng)).collect())
                .collect();
        if !mgs(&mut cols) {
            continue;
        }
        let b = cols.pop().unwrap();
        let a = cols.pop().unwrap();
        return (CVec::from_vec(a), CVec::from_vec(b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_error;
    use crate::seedstream::{setup_rng, trial_rng};
    use crate::stats::MeanAccumulator;

    #[test]
    fn single_dimension_is_a_phase() {
        for seed in 0..20u64 {
            let u = haar_unitary(1, &mut setup_rng(seed));
            assert!((u[[0, 0]].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn columns_orthonormal_at_n8() {
        for seed in 0..10u64 {
            let u = haar_unitary(8, &mut setup_rng(seed));
            assert!(unitarity_error(&u) < 1e-10);
        }
    }

    #[test]
    fn first_moment_matches_haar() {
        // E |U_11|^2 = 1/N for Haar; N = 4 here.
        let mut acc = MeanAccumulator::new();
        for trial in 0..100_000u64 {
            let mut rng = trial_rng(77, trial);
            let u = haar_unitary(4, &mut rng);
            acc.push(u[[0, 0]].norm_sqr());
        }
        assert!(
            acc.consistent_with(0.25),
            "mean {} stderr {}",
            acc.mean(),
            acc.stderr()
        );
    }

    #[test]
    fn phase_invariance_second_moment() {
        // E |U_11|^4 = 2/(N(N+1)) for Haar; N = 4 gives 0.1.
        let mut acc = MeanAccumulator::new();
        for trial in 0..100_000u64 {
            let mut rng = trial_rng(78, trial);
            let u = haar_unitary(4, &mut rng);
            acc.push(u[[0, 0]].norm_sqr().powi(2));
        }
        assert!(
            acc.consistent_with(0.1),
            "mean {} stderr {}",
            acc.mean(),
            acc.stderr()
        );
    }

    #[test]
    fn isometry_pair_is_orthonormal() {
        for seed in 0..10u64 {
            let (a, b) = haar_isometry_pair(16, &mut setup_rng(seed));
            let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
            let ip: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
            assert!((na - 1.0).abs() < 1e-12);
            assert!((nb - 1.0).abs() < 1e-12);
            assert!(ip.norm() < 1e-12);
        }
    }

    #[test]
    fn random_state_is_normalized() {
        let psi = random_state(8, &mut setup_rng(5));
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
