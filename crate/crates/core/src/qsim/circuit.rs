//! Gate-list circuits and dense statevector simulation.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{QsimError, Result, MAX_QUBITS, NORMALIZATION_TOL, UNITARITY_TOL};
use crate::linalg::{CVec, ONE, ZERO};

/// Gate set: Hadamard, phase, pi/8, CNOT, plus arbitrary one- and
/// two-qubit unitaries for building test circuits.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Hadamard(u32),
    /// S gate: diag(1, i).
    Phase(u32),
    /// T gate: diag(1, e^{i pi/4}).
    T(u32),
    Cnot {
        control: u32,
        target: u32,
    },
    /// Row-major 2x2 unitary.
    Unitary2(u32, [Complex64; 4]),
    /// Row-major 4x4 unitary on (high, low); the first listed qubit is the
    /// more significant index of the 4-dim gate space.
    Unitary4(u32, u32, Box<[Complex64; 16]>),
}

impl Gate {
    fn qubits(&self) -> Vec<u32> {
        match self {
            Gate::Hadamard(q) | Gate::Phase(q) | Gate::T(q) | Gate::Unitary2(q, _) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Unitary4(a, b, _) => vec![*a, *b],
        }
    }

    fn check_unitary(&self) -> Result<()> {
        let dev = match self {
            Gate::Unitary2(_, u) => unitarity_dev(u.as_slice(), 2),
            Gate::Unitary4(_, _, u) => unitarity_dev(u.as_slice(), 4),
            _ => 0.0,
        };
        if dev > UNITARITY_TOL {
            return Err(QsimError::NonUnitaryGate(dev));
        }
        Ok(())
    }
}

fn unitarity_dev(u: &[Complex64], n: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += u[k * n + i].conj() * u[k * n + j];
            }
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

/// A verification circuit: `witness_bits` input qubits, `ancilla_bits`
/// ancillas initialized to |0>, and an ordered gate list. Acceptance is
/// the probability of measuring |1> on qubit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    witness_bits: u32,
    ancilla_bits: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(witness_bits: u32, ancilla_bits: u32, gates: Vec<Gate>) -> Result<Self> {
        if witness_bits == 0 {
            return Err(QsimError::BadQubit {
                qubit: 0,
                qubits: 0,
            });
        }
        let n = witness_bits + ancilla_bits;
        if n > MAX_QUBITS {
            return Err(QsimError::CapExceeded { qubits: n });
        }
        for gate in &gates {
            let qs = gate.qubits();
            for &q in &qs {
                if q >= n {
                    return Err(QsimError::BadQubit { qubit: q, qubits: n });
                }
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(QsimError::DuplicateQubit(qs[0]));
            }
            gate.check_unitary()?;
        }
        Ok(Self {
            witness_bits,
            ancilla_bits,
            gates,
        })
    }

    pub fn witness_bits(&self) -> u32 {
        self.witness_bits
    }

    pub fn ancilla_bits(&self) -> u32 {
        self.ancilla_bits
    }

    pub fn qubits(&self) -> u32 {
        self.witness_bits + self.ancilla_bits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn witness_dim(&self) -> usize {
        1usize << self.witness_bits
    }

    /// Full output state on witness input `input` (ancillas start at |0>).
    pub fn output_state(&self, input: &CVec) -> Result<CVec> {
        if input.len() != self.witness_dim() {
            return Err(QsimError::WrongDimension {
                expected: self.witness_dim(),
                got: input.len(),
            });
        }
        let norm_dev = (input.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs();
        if norm_dev > NORMALIZATION_TOL {
            return Err(QsimError::NotNormalized(norm_dev));
        }
        let n = self.qubits();
        let mut state = vec![ZERO; 1usize << n];
        for (y, &amp) in input.iter().enumerate() {
            state[y << self.ancilla_bits] = amp;
        }
        for gate in &self.gates {
            self.apply(gate, &mut state);
        }
        Ok(CVec::from_vec(state))
    }

    /// Probability of measuring |1> on qubit 0 after running on `input`.
    pub fn simulate(&self, input: &CVec) -> Result<f64> {
        let out = self.output_state(input)?;
        Ok(accept_probability(&out, self.qubits()))
    }

    /// Acceptance probability of the basis witness |y>.
    pub fn simulate_basis(&self, y: u64) -> Result<f64> {
        let dim = self.witness_dim();
        assert!((y as usize) < dim, "basis witness out of range");
        let mut input = CVec::zeros(dim);
        input[y as usize] = ONE;
        self.simulate(&input)
    }

    // Qubit q occupies bit position (n-1-q) of a state index.
    fn bit_pos(&self, q: u32) -> u32 {
        self.qubits() - 1 - q
    }

    fn apply(&self, gate: &Gate, state: &mut [Complex64]) {
        match gate {
            Gate::Hadamard(q) => {
                let h = FRAC_1_SQRT_2;
                self.apply_1q(*q, state, |a0, a1| (h * (a0 + a1), h * (a0 - a1)));
            }
            Gate::Phase(q) => {
                let i = Complex64::new(0.0, 1.0);
                self.apply_1q(*q, state, move |a0, a1| (a0, i * a1));
            }
            Gate::T(q) => {
                let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
                self.apply_1q(*q, state, move |a0, a1| (a0, w * a1));
            }
            Gate::Cnot { control, target } => {
                let pc = 1usize << self.bit_pos(*control);
                let pt = 1usize << self.bit_pos(*target);
                for s in 0..state.len() {
                    if s & pc != 0 && s & pt == 0 {
                        state.swap(s, s | pt);
                    }
                }
            }
            Gate::Unitary2(q, u) => {
                let u = *u;
                self.apply_1q(*q, state, move |a0, a1| {
                    (u[0] * a0 + u[1] * a1, u[2] * a0 + u[3] * a1)
                });
            }
            Gate::Unitary4(qa, qb, u) => {
                let pa = 1usize << self.bit_pos(*qa);
                let pb = 1usize << self.bit_pos(*qb);
                for s in 0..state.len() {
                    if s & pa == 0 && s & pb == 0 {
                        let idx = [s, s | pb, s | pa, s | pa | pb];
                        let amps = [state[idx[0]], state[idx[1]], state[idx[2]], state[idx[3]]];
                        for (r, &target) in idx.iter().enumerate() {
                            let mut acc = ZERO;
                            for (c, &amp) in amps.iter().enumerate() {
                                acc += u[r * 4 + c] * amp;
                            }
                            state[target] = acc;
                        }
                    }
                }
            }
        }
    }

    fn apply_1q<F>(&self, q: u32, state: &mut [Complex64], f: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let p = 1usize << self.bit_pos(q);
        for s in 0..state.len() {
            if s & p == 0 {
                let (a0, a1) = (state[s], state[s | p]);
                let (b0, b1) = f(a0, a1);
                state[s] = b0;
                state[s | p] = b1;
            }
        }
    }
}

/// Probability mass on states whose qubit 0 is |1>.
pub(crate) fn accept_probability(state: &CVec, qubits: u32) -> f64 {
    let msb = 1usize << (qubits - 1);
    state
        .iter()
        .enumerate()
        .filter(|(s, _)| s & msb != 0)
        .map(|(_, z)| z.norm_sqr())
        .sum()
}

fn fmt_complex(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

fn parse_complex(tok: &str) -> Result<Complex64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| QsimError::Parse(format!("expected re,im pair, got `{tok}`")))?;
    let re = re
        .parse()
        .map_err(|e| QsimError::Parse(format!("bad real part `{re}`: {e}")))?;
    let im = im
        .parse()
        .map_err(|e| QsimError::Parse(format!("bad imaginary part `{im}`: {e}")))?;
    Ok(Complex64::new(re, im))
}

impl fmt::Display for Circuit {
    /// One gate per line after an `l=<l> m=<m>` header; matrix gates list
    /// row-major `re,im` entries.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "l={} m={}", self.witness_bits, self.ancilla_bits)?;
        for gate in &self.gates {
            match gate {
                Gate::Hadamard(q) => writeln!(f, "h {q}")?,
                Gate::Phase(q) => writeln!(f, "s {q}")?,
                Gate::T(q) => writeln!(f, "t {q}")?,
                Gate::Cnot { control, target } => writeln!(f, "cnot {control} {target}")?,
                Gate::Unitary2(q, u) => {
                    let entries: Vec<String> = u.iter().copied().map(fmt_complex).collect();
                    writeln!(f, "u2 {q} {}", entries.join(" "))?;
                }
                Gate::Unitary4(a, b, u) => {
                    let entries: Vec<String> = u.iter().copied().map(fmt_complex).collect();
                    writeln!(f, "u4 {a} {b} {}", entries.join(" "))?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = QsimError;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| QsimError::Parse("empty circuit file".into()))?;
        let mut toks = header.split_whitespace();
        let l = toks
            .next()
            .and_then(|t| t.strip_prefix("l="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| QsimError::Parse("header must start with l=<int>".into()))?;
        let m = toks
            .next()
            .and_then(|t| t.strip_prefix("m="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| QsimError::Parse("header must contain m=<int>".into()))?;
        let mut gates = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut toks = line.split_whitespace();
            let name = toks.next().unwrap();
            let mut qubit = |what: &str| -> Result<u32> {
                toks.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| QsimError::Parse(format!("line {}: missing {what}", lineno + 1)))
            };
            let gate = match name {
                "h" => Gate::Hadamard(qubit("qubit")?),
                "s" => Gate::Phase(qubit("qubit")?),
                "t" => Gate::T(qubit("qubit")?),
                "cnot" => Gate::Cnot {
                    control: qubit("control")?,
                    target: qubit("target")?,
                },
                "u2" => {
                    let q = qubit("qubit")?;
                    let rest: Vec<&str> = toks.collect();
                    if rest.len() != 4 {
                        return Err(QsimError::Parse(format!(
                            "line {}: u2 needs 4 entries, got {}",
                            lineno + 1,
                            rest.len()
                        )));
                    }
                    let mut u = [ZERO; 4];
                    for (slot, tok) in u.iter_mut().zip(rest) {
                        *slot = parse_complex(tok)?;
                    }
                    Gate::Unitary2(q, u)
                }
                "u4" => {
                    let a = qubit("first qubit")?;
                    let b = qubit("second qubit")?;
                    let rest: Vec<&str> = toks.collect();
                    if rest.len() != 16 {
                        return Err(QsimError::Parse(format!(
                            "line {}: u4 needs 16 entries, got {}",
                            lineno + 1,
                            rest.len()
                        )));
                    }
                    let mut u = Box::new([ZERO; 16]);
                    for (slot, tok) in u.iter_mut().zip(rest) {
                        *slot = parse_complex(tok)?;
                    }
                    Gate::Unitary4(a, b, u)
                }
                other => {
                    return Err(QsimError::Parse(format!(
                        "line {}: unknown gate `{other}`",
                        lineno + 1
                    )))
                }
            };
            gates.push(gate);
        }
        Circuit::new(l, m, gates)
    }
}

/// Stock circuits used by experiments and tests.
pub mod stock {
    use super::*;
    use crate::qsim::haar::haar_unitary;
    use rand::Rng;

    /// Random circuit over the full gate set, with Haar-random matrices
    /// for the arbitrary one- and two-qubit gates.
    pub fn random_circuit<R: Rng + ?Sized>(
        l: u32,
        m: u32,
        gate_count: usize,
        rng: &mut R,
    ) -> Circuit {
        let n = l + m;
        let mut gates = Vec::with_capacity(gate_count);
        for _ in 0..gate_count {
            let kind = if n >= 2 {
                rng.random_range(0..6)
            } else {
                rng.random_range(0..5).min(4) // single qubit: no 2q gates
            };
            let q = rng.random_range(0..n);
            let gate = match kind {
                0 => Gate::Hadamard(q),
                1 => Gate::Phase(q),
                2 => Gate::T(q),
                3 if n >= 2 => {
                    let mut t = rng.random_range(0..n);
                    while t == q {
                        t = rng.random_range(0..n);
                    }
                    Gate::Cnot {
                        control: q,
                        target: t,
                    }
                }
                5 if n >= 2 => {
                    let mut t = rng.random_range(0..n);
                    while t == q {
                        t = rng.random_range(0..n);
                    }
                    let u = haar_unitary(4, rng);
                    let mut entries = Box::new([ZERO; 16]);
                    for r in 0..4 {
                        for c in 0..4 {
                            entries[r * 4 + c] = u[[r, c]];
                        }
                    }
                    Gate::Unitary4(q, t, entries)
                }
                _ => {
                    let u = haar_unitary(2, rng);
                    Gate::Unitary2(q, [u[[0, 0]], u[[0, 1]], u[[1, 0]], u[[1, 1]]])
                }
            };
            gates.push(gate);
        }
        Circuit::new(l, m, gates).expect("generated gates are valid")
    }

    /// Rejects every witness: qubit 0 is swapped with a fresh |0> ancilla,
    /// so the measured qubit is always |0>.
    pub fn all_reject(l: u32) -> Circuit {
        let anc = l; // first ancilla index
        let gates = vec![
            Gate::Cnot {
                control: 0,
                target: anc,
            },
            Gate::Cnot {
                control: anc,
                target: 0,
            },
            Gate::Cnot {
                control: 0,
                target: anc,
            },
        ];
        Circuit::new(l, 1, gates).expect("valid circuit")
    }

    /// Controlled-V as a 4x4 on (control, target); V^2 = X.
    fn controlled_v(control: u32, target: u32, dagger: bool) -> Gate {
        let half = Complex64::new(0.5, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let (a, b) = if dagger {
            (half * (ONE - i), half * (ONE + i))
        } else {
            (half * (ONE + i), half * (ONE - i))
        };
        let mut u = Box::new([ZERO; 16]);
        u[0] = ONE;
        u[5] = ONE;
        u[10] = a;
        u[11] = b;
        u[14] = b;
        u[15] = a;
        Gate::Unitary4(control, target, u)
    }

    /// Toffoli from five two-qubit gates.
    fn toffoli(c1: u32, c2: u32, target: u32, gates: &mut Vec<Gate>) {
        gates.push(controlled_v(c2, target, false));
        gates.push(Gate::Cnot {
            control: c1,
            target: c2,
        });
        gates.push(controlled_v(c2, target, true));
        gates.push(Gate::Cnot {
            control: c1,
            target: c2,
        });
        gates.push(controlled_v(c1, target, false));
    }

    /// Accepts exactly the all-ones witness: an AND-chain over ancillas,
    /// with the final AND swapped onto qubit 0. Needs `l >= 2`; uses `l-1`
    /// ancillas, so `2l - 1 <= MAX_QUBITS`.
    pub fn unique_all_ones(l: u32) -> Circuit {
        assert!(l >= 2, "need at least two witness qubits");
        let m = l - 1;
        assert!(2 * l - 1 <= MAX_QUBITS);
        let anc = |i: u32| l + i;
        let mut gates = Vec::new();
        toffoli(0, 1, anc(0), &mut gates);
        for i in 2..l {
            toffoli(anc(i - 2), i, anc(i - 1), &mut gates);
        }
        let result = anc(m - 1);
        // Swap the AND result onto the measured qubit.
        gates.push(Gate::Cnot {
            control: 0,
            target: result,
        });
        gates.push(Gate::Cnot {
            control: result,
            target: 0,
        });
        gates.push(Gate::Cnot {
            control: 0,
            target: result,
        });
        Circuit::new(l, m, gates).expect("valid circuit")
    }
}
