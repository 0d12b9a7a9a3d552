//! Pairwise-independent hash family over GF(2).
//!
//! A family member maps `{0,1}^l -> {0,1}^m` as `h(y) = A*y xor b` for a
//! uniformly random bit matrix `A` and offset `b`. For distinct inputs the
//! joint output distribution over a random member is exactly uniform on
//! `{0,1}^{2m}`, which is the only property the isolation reductions use.
//! The affine form keeps the family small enough to enumerate completely at
//! test sizes, so independence can be checked by exact counting instead of
//! sampling.
//!
//! Bit conventions, fixed for the serialized format: input bit 0 is the
//! least significant bit of `y`, row `i` of `A` produces output bit `i`,
//! and rows are stored (and printed) row-major.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

/// Structural limit: masks live in `u64`.
pub const MAX_BITS: u32 = 63;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HashFamError {
    #[error("input bit-count must be at least 1")]
    ZeroInputBits,
    #[error("bit-count {0} exceeds the structural limit of {MAX_BITS}")]
    TooManyBits(u32),
    #[error("input {value:#x} does not fit in {bits} bits")]
    InputOutOfRange { value: u64, bits: u32 },
    #[error("target {value:#x} does not fit in {bits} bits")]
    TargetOutOfRange { value: u64, bits: u32 },
    #[error("pairwise independence requires two distinct points")]
    EqualPoints,
    #[error("malformed hash encoding: {0}")]
    Parse(String),
}

/// One member of the affine family `h(y) = A*y xor b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineHash {
    input_bits: u32,
    output_bits: u32,
    /// Row `i` is an `input_bits`-wide mask over the input.
    rows: Vec<u64>,
    /// `output_bits`-wide offset.
    offset: u64,
}

fn check_bits(l: u32, m: u32) -> Result<(), HashFamError> {
    if l == 0 {
        return Err(HashFamError::ZeroInputBits);
    }
    if l > MAX_BITS {
        return Err(HashFamError::TooManyBits(l));
    }
    if m > MAX_BITS {
        return Err(HashFamError::TooManyBits(m));
    }
    Ok(())
}

fn mask(bits: u32) -> u64 {
    if bits == 0 {
        0
    } else {
        u64::MAX >> (64 - bits)
    }
}

impl AffineHash {
    /// Assemble a member from explicit rows and offset.
    pub fn new(input_bits: u32, rows: Vec<u64>, offset: u64) -> Result<Self, HashFamError> {
        let output_bits = rows.len() as u32;
        check_bits(input_bits, output_bits)?;
        for &row in &rows {
            if row & !mask(input_bits) != 0 {
                return Err(HashFamError::InputOutOfRange {
                    value: row,
                    bits: input_bits,
                });
            }
        }
        if offset & !mask(output_bits) != 0 {
            return Err(HashFamError::TargetOutOfRange {
                value: offset,
                bits: output_bits,
            });
        }
        Ok(Self {
            input_bits,
            output_bits,
            rows,
            offset,
        })
    }

    /// Draw a member uniformly: every bit of `A` and `b` is an independent
    /// fair coin.
    pub fn sample<R: Rng + ?Sized>(l: u32, m: u32, rng: &mut R) -> Result<Self, HashFamError> {
        check_bits(l, m)?;
        let rows = (0..m).map(|_| rng.random::<u64>() & mask(l)).collect();
        let offset = rng.random::<u64>() & mask(m);
        Ok(Self {
            input_bits: l,
            output_bits: m,
            rows,
            offset,
        })
    }

    pub fn input_bits(&self) -> u32 {
        self.input_bits
    }

    pub fn output_bits(&self) -> u32 {
        self.output_bits
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// `A*y xor b`; output bit `i` comes from row `i`.
    pub fn evaluate(&self, y: u64) -> Result<u64, HashFamError> {
        if y & !mask(self.input_bits) != 0 {
            return Err(HashFamError::InputOutOfRange {
                value: y,
                bits: self.input_bits,
            });
        }
        let mut out = self.offset;
        for (i, &row) in self.rows.iter().enumerate() {
            out ^= (((row & y).count_ones() & 1) as u64) << i;
        }
        Ok(out)
    }

    /// Whether `y` lands in the filter set `h^{-1}(0)`.
    pub fn maps_to_zero(&self, y: u64) -> Result<bool, HashFamError> {
        if y & !mask(self.input_bits) != 0 {
            return Err(HashFamError::InputOutOfRange {
                value: y,
                bits: self.input_bits,
            });
        }
        let offset = self.offset;
        Ok(self
            .rows
            .iter()
            .enumerate()
            .all(|(i, &row)| ((row & y).count_ones() & 1) as u64 == (offset >> i) & 1))
    }

    /// Unchecked variant for hot loops; caller guarantees `y` is in range.
    #[inline]
    pub(crate) fn maps_to_zero_unchecked(&self, y: u64) -> bool {
        let offset = self.offset;
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &row)| ((row & y).count_ones() & 1) as u64 == (offset >> i) & 1)
    }

    /// Number of family members at the given shape: `2^{m(l+1)}`.
    pub fn family_size(l: u32, m: u32) -> Result<u128, HashFamError> {
        check_bits(l, m)?;
        let bits = m as u128 * (l as u128 + 1);
        if bits >= 128 {
            return Err(HashFamError::TooManyBits(m));
        }
        Ok(1u128 << bits)
    }

    /// The `index`-th member under the fixed enumeration: row `i` occupies
    /// bits `[i*l, (i+1)*l)` of the index, the offset sits above the rows.
    pub fn family_member(l: u32, m: u32, index: u128) -> Result<Self, HashFamError> {
        let size = Self::family_size(l, m)?;
        assert!(index < size, "family index out of range");
        let rows = (0..m)
            .map(|i| ((index >> (i * l)) as u64) & mask(l))
            .collect();
        let offset = ((index >> (m * l)) as u64) & mask(m);
        Ok(Self {
            input_bits: l,
            output_bits: m,
            rows,
            offset,
        })
    }
}

/// Empirical frequency of `h(y1)=a and h(y2)=b` over freshly sampled
/// members; the exact value for distinct points is `2^{-2m}`.
#[allow(clippy::too_many_arguments)] // mirrors the experiment's parameter list
pub fn pairwise_independence_frequency<R: Rng + ?Sized>(
    l: u32,
    m: u32,
    y1: u64,
    y2: u64,
    a: u64,
    b: u64,
    trials: u64,
    rng: &mut R,
) -> Result<f64, HashFamError> {
    check_bits(l, m)?;
    if y1 == y2 {
        return Err(HashFamError::EqualPoints);
    }
    for &y in &[y1, y2] {
        if y & !mask(l) != 0 {
            return Err(HashFamError::InputOutOfRange { value: y, bits: l });
        }
    }
    for &t in &[a, b] {
        if t & !mask(m) != 0 {
            return Err(HashFamError::TargetOutOfRange { value: t, bits: m });
        }
    }
    assert!(trials >= 1, "need at least one trial");
    let mut hits = 0u64;
    for _ in 0..trials {
        let h = AffineHash::sample(l, m, rng)?;
        if h.evaluate(y1)? == a && h.evaluate(y2)? == b {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

fn hex_width(bits: u32) -> usize {
    bits.div_ceil(4) as usize
}

impl fmt::Display for AffineHash {
    /// Text encoding: `l=<l> m=<m>` header, one lowercase-hex line per row
    /// of `A`, then one hex line for `b`. Widths are fixed by the header so
    /// the round trip is bit-exact.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "l={} m={}", self.input_bits, self.output_bits)?;
        for &row in &self.rows {
            writeln!(f, "{:0width$x}", row, width = hex_width(self.input_bits))?;
        }
        writeln!(
            f,
            "{:0width$x}",
            self.offset,
            width = hex_width(self.output_bits)
        )
    }
}

impl FromStr for AffineHash {
    type Err = HashFamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines();
        let header = lines
            .next()
            .ok_or_else(|| HashFamError::Parse("missing header".into()))?;
        let parse_kv = |tok: &str, key: &str| -> Result<u32, HashFamError> {
            tok.strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| HashFamError::Parse(format!("bad header token `{tok}`")))
        };
        let mut toks = header.split_whitespace();
        let l = parse_kv(
            toks.next()
                .ok_or_else(|| HashFamError::Parse("empty header".into()))?,
            "l=",
        )?;
        let m = parse_kv(
            toks.next()
                .ok_or_else(|| HashFamError::Parse("header missing m=".into()))?,
            "m=",
        )?;
        check_bits(l, m)?;
        let mut read_hex = |what: &str| -> Result<u64, HashFamError> {
            let line = lines
                .next()
                .ok_or_else(|| HashFamError::Parse(format!("missing {what} line")))?;
            if line.is_empty() {
                return Ok(0);
            }
            u64::from_str_radix(line.trim(), 16)
                .map_err(|e| HashFamError::Parse(format!("bad {what} line: {e}")))
        };
        let rows: Vec<u64> = (0..m)
            .map(|i| read_hex(&format!("row {i}")))
            .collect::<Result<_, _>>()?;
        let offset = read_hex("offset")?;
        AffineHash::new(l, rows, offset)
    }
}
