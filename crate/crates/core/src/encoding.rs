//! Integer-to-binary encodings of a bounded integer `x` in `[l, u]`.
//!
//! | kind    | bits     | value                                   | penalty                    |
//! |---------|----------|-----------------------------------------|----------------------------|
//! | unary   | d        | l + sum q_k                              | 0                          |
//! | order   | d        | l + sum q_k                              | sum q_{k+1} (1 - q_k)      |
//! | log     | K + 1    | l + sum_{k<K} 2^k q_k + (d - 2^K + 1) q_K | 0                          |
//! | one-hot | d + 1    | l + sum k q_k                            | (sum q_k - 1)^2            |
//!
//! with `d = u - l` and `K = floor(log2 d)`. A fixed variable (`d = 0`) uses
//! no bits. Bits are little-endian within a variable: bit `k` has weight
//! `weights[k]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodingScheme {
    Unary,
    Order,
    Log,
    OneHot,
}

impl EncodingScheme {
    pub const ALL: [EncodingScheme; 4] =
        [EncodingScheme::Unary, EncodingScheme::Order, EncodingScheme::Log, EncodingScheme::OneHot];

    /// Number of bits needed for a domain of width `d`.
    pub fn bit_count(self, d: u64) -> usize {
        if d == 0 {
            return 0;
        }
        match self {
            EncodingScheme::Unary | EncodingScheme::Order => d as usize,
            EncodingScheme::Log => d.ilog2() as usize + 1,
            EncodingScheme::OneHot => d as usize + 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EncodingScheme::Unary => "unary",
            EncodingScheme::Order => "order",
            EncodingScheme::Log => "log",
            EncodingScheme::OneHot => "one_hot",
        }
    }
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncodingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unary" => Ok(EncodingScheme::Unary),
            "order" => Ok(EncodingScheme::Order),
            "log" => Ok(EncodingScheme::Log),
            "one_hot" | "one-hot" | "onehot" => Ok(EncodingScheme::OneHot),
            _ => Err(Error::Parse(format!("unknown encoding {s:?}"))),
        }
    }
}

/// Quadratic form over the bits of one variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub constant: i64,
    pub linear: Vec<(usize, i64)>,
    pub quadratic: Vec<(usize, usize, i64)>,
}

impl PenaltySpec {
    pub fn is_empty(&self) -> bool {
        self.constant == 0 && self.linear.is_empty() && self.quadratic.is_empty()
    }

    pub fn evaluate(&self, bits: &[bool]) -> i64 {
        let b = |k: usize| bits[k] as i64;
        self.constant
            + self.linear.iter().map(|&(k, w)| w * b(k)).sum::<i64>()
            + self.quadratic.iter().map(|&(i, j, w)| w * b(i) * b(j)).sum::<i64>()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedVariable {
    pub reaction_id: String,
    pub kind: EncodingScheme,
    pub lower: u64,
    pub upper: u64,
    pub bit_count: usize,
    pub offset: i64,
    pub weights: Vec<i64>,
    pub penalty: PenaltySpec,
}

pub fn encode(lower: u64, upper: u64, kind: EncodingScheme) -> Result<EncodedVariable> {
    if lower > upper {
        return Err(Error::InvalidBounds { lower, upper });
    }
    let d = upper - lower;
    let n = kind.bit_count(d);
    let weights: Vec<i64> = match kind {
        _ if n == 0 => Vec::new(),
        EncodingScheme::Unary | EncodingScheme::Order => vec![1; n],
        EncodingScheme::Log => {
            let k = n - 1;
            let mut w: Vec<i64> = (0..k).map(|i| 1i64 << i).collect();
            w.push(d as i64 - ((1i64 << k) - 1));
            w
        }
        EncodingScheme::OneHot => (0..n as i64).collect(),
    };
    let penalty = match kind {
        EncodingScheme::Order if n >= 2 => PenaltySpec {
            constant: 0,
            linear: (1..n).map(|k| (k, 1)).collect(),
            quadratic: (1..n).map(|k| (k - 1, k, -1)).collect(),
        },
        EncodingScheme::OneHot if n >= 1 => PenaltySpec {
            constant: 1,
            linear: (0..n).map(|k| (k, -1)).collect(),
            quadratic: (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 2))).collect(),
        },
        _ => PenaltySpec::default(),
    };
    Ok(EncodedVariable {
        reaction_id: String::new(),
        kind,
        lower,
        upper,
        bit_count: n,
        offset: lower as i64,
        weights,
        penalty,
    })
}

impl EncodedVariable {
    pub fn for_reaction(mut self, id: impl Into<String>) -> Self {
        self.reaction_id = id.into();
        self
    }

    fn check_len(&self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.bit_count {
            return Err(Error::LengthMismatch { expected: self.bit_count, actual: bits.len() });
        }
        Ok(())
    }

    /// Affine value `offset + sum w_k q_k`, unclamped.
    pub fn decode_raw(&self, bits: &[bool]) -> Result<i64> {
        self.check_len(bits)?;
        Ok(self.offset + self.weights.iter().zip(bits).filter(|(_, &b)| b).map(|(w, _)| w).sum::<i64>())
    }

    /// Decoded value clamped into `[lower, upper]`. Only a violated one-hot
    /// assignment can fall outside.
    pub fn decode(&self, bits: &[bool]) -> Result<u64> {
        let raw = self.decode_raw(bits)?;
        Ok(raw.clamp(self.lower as i64, self.upper as i64) as u64)
    }

    pub fn penalty_value(&self, bits: &[bool]) -> Result<i64> {
        self.check_len(bits)?;
        Ok(self.penalty.evaluate(bits))
    }

    /// A zero-penalty bit pattern decoding to `value`.
    pub fn canonical_bits(&self, value: u64) -> Result<Vec<bool>> {
        if value < self.lower || value > self.upper {
            return Err(Error::InvalidArgument(format!(
                "value {value} outside [{}, {}]",
                self.lower, self.upper
            )));
        }
        let t = value - self.lower;
        let n = self.bit_count;
        let mut bits = vec![false; n];
        match self.kind {
            _ if n == 0 => {}
            EncodingScheme::Unary | EncodingScheme::Order => bits[..t as usize].fill(true),
            EncodingScheme::Log => {
                let k = n - 1;
                let low_max = (1u64 << k) - 1;
                let rest = if t > low_max {
                    bits[k] = true;
                    t - self.weights[k] as u64
                } else {
                    t
                };
                for (i, bit) in bits.iter_mut().enumerate().take(k) {
                    *bit = rest >> i & 1 == 1;
                }
            }
            EncodingScheme::OneHot => bits[t as usize] = true,
        }
        Ok(bits)
    }

    pub fn has_penalty(&self) -> bool {
        !self.penalty.is_empty()
    }
}

pub fn decode(ev: &EncodedVariable, bits: &[bool]) -> Result<u64> {
    ev.decode(bits)
}

pub fn encoding_penalty_value(ev: &EncodedVariable, bits: &[bool]) -> Result<i64> {
    ev.penalty_value(bits)
}
