//! 1-D 2-local chain Hamiltonians with exact low spectra.
//!
//! A chain Hamiltonian on `n` sites of local dimension `d` is a list of
//! nearest-neighbor Hermitian terms; site indices are 1-based and site 1 is
//! the most significant digit of a basis index. Dimensions stay at or below
//! 4096, so spectra come from dense diagonalization and the two smallest
//! eigenvalues classify instances against the plain, unique, and
//! poly-gapped promises.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    eigen_hermitian_jacobi, eigenvalues_hermitian, frobenius_norm, hermiticity_error, CMat,
};

/// Dense-diagonalization cap on total dimension `d^n`.
pub const DIM_CAP: usize = 4096;

const TERM_HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum HamiltonianError {
    #[error("total dimension {dim} exceeds the cap {DIM_CAP}")]
    CapExceeded { dim: u128 },
    #[error("local dimension must be at least 2, got {0}")]
    BadLocalDim(usize),
    #[error("need at least one site, got {0}")]
    BadSiteCount(usize),
    #[error("term site {site} outside 1..={max} (1-based, acts on site and site+1)")]
    BadSite { site: usize, max: usize },
    #[error("term matrix must be {expected}x{expected}, got {got}x{got}")]
    WrongTermDim { expected: usize, got: usize },
    #[error("term at site {site} is not Hermitian (deviation {dev:.3e})")]
    NotHermitian { site: usize, dev: f64 },
    #[error("thresholds must satisfy a < b, got a={a}, b={b}")]
    BadThresholds { a: f64, b: f64 },
    #[error("instance is not unique-yes at these thresholds")]
    NotUniqueYes,
    #[error("malformed chain encoding: {0}")]
    Parse(String),
}

type Result<T> = std::result::Result<T, HamiltonianError>;

/// One nearest-neighbor term: a `d^2 x d^2` Hermitian matrix acting on
/// sites `(site, site+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTerm {
    site: usize,
    matrix: CMat,
    norm_bound: f64,
}

impl ChainTerm {
    pub fn site(&self) -> usize {
        self.site
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Frobenius norm, recorded at construction as an operator-norm bound.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainHamiltonian {
    sites: usize,
    local_dim: usize,
    terms: Vec<ChainTerm>,
}

impl ChainHamiltonian {
    pub fn new(sites: usize, local_dim: usize, terms: Vec<(usize, CMat)>) -> Result<Self> {
        if sites == 0 {
            return Err(HamiltonianError::BadSiteCount(sites));
        }
        if local_dim < 2 {
            return Err(HamiltonianError::BadLocalDim(local_dim));
        }
        let dim = (local_dim as u128).pow(sites as u32);
        if dim > DIM_CAP as u128 {
            return Err(HamiltonianError::CapExceeded { dim });
        }
        let d2 = local_dim * local_dim;
        let mut checked = Vec::with_capacity(terms.len());
        for (site, matrix) in terms {
            if site == 0 || site + 1 > sites {
                return Err(HamiltonianError::BadSite {
                    site,
                    max: sites.saturating_sub(1),
                });
            }
            if matrix.nrows() != d2 || matrix.ncols() != d2 {
                return Err(HamiltonianError::WrongTermDim {
                    expected: d2,
                    got: matrix.nrows(),
                });
            }
            let dev = hermiticity_error(&matrix);
            if dev > TERM_HERMITICITY_TOL {
                return Err(HamiltonianError::NotHermitian { site, dev });
            }
            let norm_bound = frobenius_norm(&matrix);
            checked.push(ChainTerm {
                site,
                matrix,
                norm_bound,
            });
        }
        Ok(Self {
            sites,
            local_dim,
            terms: checked,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn terms(&self) -> &[ChainTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.local_dim.pow(self.sites as u32)
    }

    /// Sum of all embedded terms as a dense matrix.
    pub fn assemble_dense(&self) -> CMat {
        let d = self.local_dim;
        let d2 = d * d;
        let dim = self.dim();
        let mut out = CMat::zeros((dim, dim));
        for term in &self.terms {
            // Index split: |left, pair, right> with the pair on sites
            // (site, site+1); left has site-1 digits.
            let left: usize = d.pow((term.site - 1) as u32);
            let right: usize = d.pow((self.sites - term.site - 1) as u32);
            for a in 0..left {
                for b_row in 0..d2 {
                    for b_col in 0..d2 {
                        let v = term.matrix[[b_row, b_col]];
                        if v == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for c in 0..right {
                            let row = (a * d2 + b_row) * right + c;
                            let col = (a * d2 + b_col) * right + c;
                            out[[row, col]] += v;
                        }
                    }
                }
            }
        }
        out
    }

    /// The `count` smallest eigenvalues, ascending (implicit-QL path).
    pub fn low_spectrum(&self, count: usize) -> Vec<f64> {
        assert!(count <= self.dim(), "count exceeds the matrix dimension");
        let vals = eigenvalues_hermitian(&self.assemble_dense());
        vals.into_iter().take(count).collect()
    }

    /// Same spectrum through the independently coded Jacobi solver.
    pub fn low_spectrum_jacobi(&self, count: usize) -> Vec<f64> {
        let (vals, _) = eigen_hermitian_jacobi(&self.assemble_dense());
        vals.into_iter().take(count).collect()
    }

    /// Two smallest eigenvalues plus classification flags.
    pub fn gap_report(&self, a: f64, b: f64, delta_threshold: Option<f64>) -> Result<GapReport> {
        let ordered = a < b; // NaN also fails here
        if !ordered {
            return Err(HamiltonianError::BadThresholds { a, b });
        }
        let low = self.low_spectrum(2);
        let lambda0 = low[0];
        let lambda1 = if low.len() > 1 { low[1] } else { low[0] };
        let delta = lambda1 - lambda0;
        let flags = LhFlags {
            lh_yes: lambda0 <= a,
            lh_no: lambda0 > b,
            unique_lh_yes: lambda0 <= a && lambda1 > b,
            poly_gap_promise_ok: delta_threshold.map(|t| delta >= t),
            promise_violated: lambda0 > a && lambda0 <= b,
        };
        Ok(GapReport {
            lambda0,
            lambda1,
            delta,
            flags,
        })
    }

    /// For a unique-yes instance the uniqueness forces the spectral gap to
    /// exceed the threshold separation; returns `delta >= b - a`.
    pub fn uqma_yes_gap_witness(&self, a: f64, b: f64) -> Result<bool> {
        let report = self.gap_report(a, b, None)?;
        if !report.flags.unique_lh_yes {
            return Err(HamiltonianError::NotUniqueYes);
        }
        Ok(report.delta >= b - a)
    }
}

/// Classification flags against thresholds `(a, b)` and an optional gap
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LhFlags {
    pub lh_yes: bool,
    pub lh_no: bool,
    pub unique_lh_yes: bool,
    pub poly_gap_promise_ok: Option<bool>,
    pub promise_violated: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport {
    pub lambda0: f64,
    pub lambda1: f64,
    pub delta: f64,
    pub flags: LhFlags,
}

fn fmt_complex(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

impl fmt::Display for ChainHamiltonian {
    /// `n=<n> d=<d>` header; per term a `site=<i>` line followed by the
    /// `d^2 x d^2` matrix, one row per line, entries as `re,im` pairs.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} d={}", self.sites, self.local_dim)?;
        let d2 = self.local_dim * self.local_dim;
        for term in &self.terms {
            writeln!(f, "site={}", term.site)?;
            for row in 0..d2 {
                let line: Vec<String> = (0..d2)
                    .map(|col| fmt_complex(term.matrix[[row, col]]))
                    .collect();
                writeln!(f, "{}", line.join(" "))?;
            }
        }
        Ok(())
    }
}

impl FromStr for ChainHamiltonian {
    type Err = HamiltonianError;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        let mut sites_acc: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if header.is_none() {
                let mut toks = line.split_whitespace();
                let n = toks
                    .next()
                    .and_then(|t| t.strip_prefix("n="))
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| HamiltonianError::Parse("header needs n=<int>".into()))?;
                let d = toks
                    .next()
                    .and_then(|t| t.strip_prefix("d="))
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| HamiltonianError::Parse("header needs d=<int>".into()))?;
                header = Some((n, d));
                continue;
            }
            if let Some(site) = line.strip_prefix("site=") {
                let site = site
                    .parse()
                    .map_err(|e| HamiltonianError::Parse(format!("bad site index: {e}")))?;
                sites_acc.push((site, Vec::new()));
                continue;
            }
            if sites_acc.is_empty() {
                return Err(HamiltonianError::Parse(
                    "matrix entries before any site= line".into(),
                ));
            }
            for tok in line.split_whitespace() {
                let (re, im) = tok.split_once(',').ok_or_else(|| {
                    HamiltonianError::Parse(format!("expected re,im pair, got `{tok}`"))
                })?;
                let re = re
                    .parse()
                    .map_err(|e| HamiltonianError::Parse(format!("bad real `{re}`: {e}")))?;
                let im = im
                    .parse()
                    .map_err(|e| HamiltonianError::Parse(format!("bad imag `{im}`: {e}")))?;
                tokens.push(Complex64::new(re, im));
            }
            let last = sites_acc.last_mut().unwrap();
            last.1.append(&mut tokens);
        }
        let (n, d) = header.ok_or_else(|| HamiltonianError::Parse("missing header".into()))?;
        let d2 = d * d;
        let mut terms = Vec::with_capacity(sites_acc.len());
        for (site, entries) in sites_acc {
            if entries.len() != d2 * d2 {
                return Err(HamiltonianError::Parse(format!(
                    "term at site {site}: expected {} entries, got {}",
                    d2 * d2,
                    entries.len()
                )));
            }
            let mut m = CMat::zeros((d2, d2));
            for (idx, z) in entries.into_iter().enumerate() {
                m[[idx / d2, idx % d2]] = z;
            }
            terms.push((site, m));
        }
        ChainHamiltonian::new(n, d, terms)
    }
}

/// Stock chains.
pub mod stock {
    use super::*;
    use crate::linalg::kron;
    use rand::Rng;

    pub fn pauli_x() -> CMat {
        let mut m = CMat::zeros((2, 2));
        m[[0, 1]] = Complex64::new(1.0, 0.0);
        m[[1, 0]] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn pauli_y() -> CMat {
        let mut m = CMat::zeros((2, 2));
        m[[0, 1]] = Complex64::new(0.0, -1.0);
        m[[1, 0]] = Complex64::new(0.0, 1.0);
        m
    }

    pub fn pauli_z() -> CMat {
        let mut m = CMat::zeros((2, 2));
        m[[0, 0]] = Complex64::new(1.0, 0.0);
        m[[1, 1]] = Complex64::new(-1.0, 0.0);
        m
    }

    /// XX + YY + ZZ on one bond.
    pub fn heisenberg_term() -> CMat {
        let mut m = kron(&pauli_x(), &pauli_x());
        m = m + kron(&pauli_y(), &pauli_y());
        m + kron(&pauli_z(), &pauli_z())
    }

    /// Uniform Heisenberg chain on `n` qubits.
    pub fn heisenberg_chain(n: usize) -> ChainHamiltonian {
        let terms = (1..n).map(|site| (site, heisenberg_term())).collect();
        ChainHamiltonian::new(n, 2, terms).expect("valid chain")
    }

    /// Random chain with independent Gaussian Hermitian bond terms.
    pub fn random_chain(n: usize, d: usize, rng: &mut impl Rng) -> ChainHamiltonian {
        let d2 = d * d;
        let terms = (1..n)
            .map(|site| {
                let mut m = CMat::zeros((d2, d2));
                for i in 0..d2 {
                    m[[i, i]] = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, 0.0);
                    for j in i + 1..d2 {
                        let z = Complex64::new(
                            rng.random::<f64>() - 0.5,
                            rng.random::<f64>() - 0.5,
                        );
                        m[[i, j]] = z;
                        m[[j, i]] = z.conj();
                    }
                }
                (site, m)
            })
            .collect();
        ChainHamiltonian::new(n, d, terms).expect("valid chain")
    }
}
