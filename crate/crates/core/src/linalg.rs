//! Dense complex linear algebra for small Hermitian problems.
//!
//! Two independently coded eigensolvers are kept on purpose so spectra can
//! be cross-checked: a Householder tridiagonalization followed by implicit
//! QL (values only, the fast path) and a cyclic complex Jacobi iteration
//! (values and vectors). Both are plain O(n^3) dense routines; dimensions
//! in this crate stay at or below 4096.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermiticity_error(a: &CMat) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Largest entrywise deviation of `U^dagger U` from the identity.
pub fn unitarity_error(u: &CMat) -> f64 {
    let n = u.nrows();
    assert_eq!(n, u.ncols());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += u[[k, i]].conj() * u[[k, j]];
            }
            let target = if i == j { ONE } else { ZERO };
            let d = (acc - target).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(a: &CMat) -> Complex64 {
    (0..a.nrows()).map(|i| a[[i, i]]).sum()
}

/// Kronecker product, row-major index convention:
/// `(a ⊗ b)[(i1,i2),(j1,j2)] = a[i1,j1] b[i2,j2]`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i1 in 0..ar {
        for j1 in 0..ac {
            let f = a[[i1, j1]];
            if f == ZERO {
                continue;
            }
            for i2 in 0..br {
                for j2 in 0..bc {
                    out[[i1 * br + i2, j1 * bc + j2]] = f * b[[i2, j2]];
                }
            }
        }
    }
    out
}

pub fn identity(n: usize) -> CMat {
    CMat::eye(n)
}

/// `<x|A|y>` for dense `A`.
pub fn quadratic_form(x: &CVec, a: &CMat, y: &CVec) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        let mut row = ZERO;
        for j in 0..n {
            row += a[[i, j]] * y[j];
        }
        acc += x[i].conj() * row;
    }
    acc
}

/// Eigenvalues of a Hermitian matrix, ascending. Householder reduction to
/// a real symmetric tridiagonal form, then implicit-shift QL.
pub fn eigenvalues_hermitian(a: &CMat) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![a[[0, 0]].re];
    }
    let (mut d, mut e) = tridiagonalize(a);
    tql_eigenvalues(&mut d, &mut e);
    d.sort_by(f64::total_cmp);
    d
}

/// Householder reduction of Hermitian `a` to tridiagonal form; returns the
/// (real) diagonal and the moduli of the off-diagonal, which define a real
/// symmetric tridiagonal matrix with the same spectrum. Works on a flat
/// row-major buffer to keep the O(n^3) update tight.
fn tridiagonalize(a: &CMat) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut m: Vec<Complex64> = a.iter().copied().collect();
    let idx = |i: usize, j: usize| i * n + j;
    for k in 0..n.saturating_sub(2) {
        let norm_x: f64 = (k + 1..n)
            .map(|i| m[idx(i, k)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm_x == 0.0 {
            continue;
        }
        let x0 = m[idx(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            ONE
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;
        // w = (x - alpha e1) / ||x - alpha e1||, reflector P = I - 2 w w^dagger.
        let mut w: Vec<Complex64> = (k + 1..n).map(|i| m[idx(i, k)]).collect();
        w[0] -= alpha;
        let wn: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if wn == 0.0 {
            continue;
        }
        for z in w.iter_mut() {
            *z /= wn;
        }
        // Two-sided update of the trailing block: A' = A - 2wp^+ - 2pw^+ + 4K ww^+
        // with p = Aw, K = w^+ p.
        let blk = n - k - 1;
        let mut p = vec![ZERO; blk];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &m[idx(k + 1 + i, k + 1)..idx(k + 1 + i, k + 1) + blk];
            let mut acc = ZERO;
            for (rij, wj) in row.iter().zip(&w) {
                acc += rij * wj;
            }
            *pi = acc;
        }
        let kappa: Complex64 = w.iter().zip(&p).map(|(wi, pi)| wi.conj() * pi).sum();
        for i in 0..blk {
            let wi = w[i];
            let pi = p[i];
            let coeff = 4.0 * kappa * wi;
            let row = &mut m[idx(k + 1 + i, k + 1)..idx(k + 1 + i, k + 1) + blk];
            for ((slot, pj), wj) in row.iter_mut().zip(&p).zip(&w) {
                *slot += -2.0 * wi * pj.conj() - 2.0 * pi * wj.conj() + coeff * wj.conj();
            }
        }
        // The pivot column/row collapse onto alpha.
        m[idx(k + 1, k)] = alpha;
        m[idx(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            m[idx(i, k)] = ZERO;
            m[idx(k, i)] = ZERO;
        }
    }
    let d: Vec<f64> = (0..n).map(|i| m[idx(i, i)].re).collect();
    let e: Vec<f64> = (0..n - 1).map(|i| m[idx(i + 1, i)].norm()).collect();
    (d, e)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix (values only).
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    // e is indexed 0..n-1 with a trailing scratch slot.
    let mut off = vec![0.0; n];
    off[..n - 1].copy_from_slice(e);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    off[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    d[l] -= p;
                    off[l] = g;
                    off[m] = 0.0;
                }
            }
        }
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns eigenvalues ascending and the matching orthonormal
/// eigenvectors as columns. Rotation angles take the |theta| <= pi/4 root,
/// the classically convergent choice.
pub fn eigen_hermitian_jacobi(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m: Vec<Complex64> = a.iter().copied().collect();
    let mut v: Vec<Complex64> = identity(n).iter().copied().collect();
    if n <= 1 {
        let vals = (0..n).map(|i| m[i * n + i].re).collect();
        return (vals, identity(n));
    }
    let scale = frobenius_norm(a).max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += 2.0 * m[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                // tan(2 theta) = 2r / (app - aqq), smaller-angle root.
                let den = app - aqq;
                let t = if den == 0.0 {
                    1.0
                } else {
                    2.0 * r / (den + den.hypot(2.0 * r).copysign(den))
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u = apq / r; // phase of the pivot entry
                let su = s * u;
                let su_conj = s * u.conj();
                // Column update: col p <- c p + s u^* q ; col q <- -s u p + c q.
                for i in 0..n {
                    let aip = m[i * n + p];
                    let aiq = m[i * n + q];
                    m[i * n + p] = c * aip + su_conj * aiq;
                    m[i * n + q] = -su * aip + c * aiq;
                }
                // Row update with the conjugate coefficients.
                {
                    let (rp, rq) = if p < q {
                        let (head, tail) = m.split_at_mut(q * n);
                        (&mut head[p * n..p * n + n], &mut tail[..n])
                    } else {
                        unreachable!("p < q by loop construction")
                    };
                    for (apj, aqj) in rp.iter_mut().zip(rq.iter_mut()) {
                        let a0 = *apj;
                        let a1 = *aqj;
                        *apj = c * a0 + su * a1;
                        *aqj = -su_conj * a0 + c * a1;
                    }
                }
                m[p * n + q] = ZERO;
                m[q * n + p] = ZERO;
                m[p * n + p] = Complex64::new(m[p * n + p].re, 0.0);
                m[q * n + q] = Complex64::new(m[q * n + q].re, 0.0);
                for i in 0..n {
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = c * vip + su_conj * viq;
                    v[i * n + q] = -su * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMat::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[[i, new_col]] = v[i * n + old_col];
        }
    }
    (values, vectors)
}
