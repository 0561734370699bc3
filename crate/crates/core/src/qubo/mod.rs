//! QUBO assembly for the synthesis-planning problem.
//!
//! The objective is
//!
//! ```text
//!   sum_r c_unit_r x_r(q_r)
//! + sum_r c_fixed_r [y_r + (1 - y_r) x_r(q_r)]
//! + sum_s M_s (sum_r nu_sr x_r(q_r))^2
//! + sum_r L_r P_r(q_r)
//! ```
//!
//! expanded with `q^2 = q` into an upper-triangular coefficient map. The
//! auxiliary bit `y_r` replaces the positivity indicator: `min_y [y + (1-y)x]`
//! is 0 at `x = 0` and 1 for `x >= 1`. It is only allocated when a reaction
//! has a fixed cost and a non-degenerate domain.

mod io;
mod ising;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::crn::{Pathway, ReactionNetwork};
use crate::encoding::{encode, EncodedVariable, EncodingScheme};
use crate::error::{Error, Result};
use crate::problem::SynthesisProblem;
use crate::rational::{self, checked_add, checked_mul, serde_decimal, Rational};

pub use io::QuboFile;
pub use ising::{bits_to_spins, ising_energy, spins_to_bits, to_ising, IntegerIsing, IsingModel};

/// Penalty strengths `M_s` per species and `L_r` per penalty-bearing reaction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyAssignment {
    #[serde(with = "decimal_map")]
    pub mass_balance: BTreeMap<String, Rational>,
    #[serde(with = "decimal_map")]
    pub encoding: BTreeMap<String, Rational>,
}

impl PenaltyAssignment {
    /// Every species and every penalty-bearing reaction at `value`.
    pub fn uniform(net: &ReactionNetwork, kind: EncodingScheme, value: Rational) -> Result<Self> {
        let mass_balance = net.species().iter().map(|s| (s.id.clone(), value)).collect();
        let mut encoding = BTreeMap::new();
        for r in net.reactions() {
            if encode(r.lower_bound, r.upper_bound, kind)?.has_penalty() {
                encoding.insert(r.id.clone(), value);
            }
        }
        Ok(PenaltyAssignment { mass_balance, encoding })
    }

    /// Largest strength over all entries.
    pub fn max_strength(&self) -> Rational {
        self.mass_balance.values().chain(self.encoding.values()).copied().max().unwrap_or_else(Rational::zero)
    }
}

pub(crate) mod decimal_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<String, Rational>, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let text: BTreeMap<&str, String> = map.iter().map(|(k, v)| (k.as_str(), rational::format_decimal(v))).collect();
        text.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<BTreeMap<String, Rational>, D::Error> {
        let text: BTreeMap<String, String> = BTreeMap::deserialize(de)?;
        text.into_iter()
            .map(|(k, v)| rational::parse_decimal(&v).map(|r| (k, r)).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Location of one reaction's bits in the QUBO.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableBlock {
    pub start: usize,
    pub variable: EncodedVariable,
    /// Index of the auxiliary positivity bit `y_r`, when allocated.
    pub aux_bit: Option<usize>,
    #[serde(with = "serde_decimal")]
    pub fixed_cost: Rational,
}

impl VariableBlock {
    pub fn bits<'a>(&self, all: &'a [bool]) -> &'a [bool] {
        &all[self.start..self.start + self.variable.bit_count]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    num_bits: usize,
    terms: BTreeMap<(usize, usize), Rational>,
    offset: Rational,
    blocks: Vec<VariableBlock>,
}

#[derive(Default)]
struct Accumulator {
    terms: BTreeMap<(usize, usize), Rational>,
    offset: Rational,
}

impl Accumulator {
    fn add(&mut self, i: usize, j: usize, c: Rational) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let key = if i <= j { (i, j) } else { (j, i) };
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot = checked_add(slot, &c)?;
        Ok(())
    }

    fn add_offset(&mut self, c: Rational) -> Result<()> {
        self.offset = checked_add(&self.offset, &c)?;
        Ok(())
    }

    /// Add `weight * (constant + sum a_i q_i)^2` over distinct bits.
    fn add_squared(&mut self, weight: Rational, constant: i128, linear: &[(usize, i128)]) -> Result<()> {
        if weight.is_zero() {
            return Ok(());
        }
        let int = |v: i128| Rational::from_integer(v);
        let sq = constant.checked_mul(constant).ok_or(Error::Overflow)?;
        self.add_offset(checked_mul(&weight, &int(sq))?)?;
        for (k, &(i, a)) in linear.iter().enumerate() {
            let lin = a
                .checked_mul(a)
                .and_then(|aa| a.checked_mul(2 * constant).and_then(|b| aa.checked_add(b)))
                .ok_or(Error::Overflow)?;
            self.add(i, i, checked_mul(&weight, &int(lin))?)?;
            for &(j, b) in &linear[k + 1..] {
                let pair = a.checked_mul(b).and_then(|v| v.checked_mul(2)).ok_or(Error::Overflow)?;
                self.add(i, j, checked_mul(&weight, &int(pair))?)?;
            }
        }
        Ok(())
    }
}

/// Assemble the QUBO for a network; targets play no role beyond the bounds.
pub fn build_qubo_for_network(
    net: &ReactionNetwork,
    kind: EncodingScheme,
    penalties: &PenaltyAssignment,
) -> Result<QuboModel> {
    for (id, v) in penalties.mass_balance.iter().chain(&penalties.encoding) {
        if v.is_negative() {
            return Err(Error::NegativePenalty(id.clone()));
        }
    }
    let mut blocks = Vec::with_capacity(net.reactions().len());
    let mut next = 0usize;
    for r in net.reactions() {
        let variable = encode(r.lower_bound, r.upper_bound, kind)?.for_reaction(r.id.clone());
        let start = next;
        next += variable.bit_count;
        let aux_bit = if r.fixed_cost > Rational::zero() && variable.bit_count > 0 {
            next += 1;
            Some(next - 1)
        } else {
            None
        };
        if variable.has_penalty() && !penalties.encoding.contains_key(&r.id) {
            return Err(Error::MissingPenalty(format!("encoding of reaction {:?}", r.id)));
        }
        blocks.push(VariableBlock { start, variable, aux_bit, fixed_cost: r.fixed_cost });
    }

    let mut acc = Accumulator::default();
    for (r, block) in net.reactions().iter().zip(&blocks) {
        let v = &block.variable;
        let offset = Rational::from_integer(v.offset as i128);
        // Variable cost.
        acc.add_offset(checked_mul(&r.unit_cost, &offset)?)?;
        for (k, &w) in v.weights.iter().enumerate() {
            acc.add(block.start + k, block.start + k, checked_mul(&r.unit_cost, &Rational::from_integer(w as i128))?)?;
        }
        // Fixed cost.
        match block.aux_bit {
            None if v.offset > 0 => acc.add_offset(r.fixed_cost)?,
            None => {}
            Some(y) => {
                let cf = r.fixed_cost;
                acc.add_offset(checked_mul(&cf, &offset)?)?;
                acc.add(y, y, checked_mul(&cf, &Rational::from_integer(1 - v.offset as i128))?)?;
                for (k, &w) in v.weights.iter().enumerate() {
                    let cw = checked_mul(&cf, &Rational::from_integer(w as i128))?;
                    acc.add(block.start + k, block.start + k, cw)?;
                    acc.add(y, block.start + k, -cw)?;
                }
            }
        }
        // Encoding penalty.
        if v.has_penalty() {
            let l = penalties.encoding[&r.id];
            let p = &v.penalty;
            acc.add_offset(checked_mul(&l, &Rational::from_integer(p.constant as i128))?)?;
            for &(k, w) in &p.linear {
                acc.add(block.start + k, block.start + k, checked_mul(&l, &Rational::from_integer(w as i128))?)?;
            }
            for &(i, j, w) in &p.quadratic {
                acc.add(block.start + i, block.start + j, checked_mul(&l, &Rational::from_integer(w as i128))?)?;
            }
        }
    }
    // Mass balance.
    for (i, s) in net.species().iter().enumerate() {
        let weight = *penalties
            .mass_balance
            .get(&s.id)
            .ok_or_else(|| Error::MissingPenalty(format!("mass balance of species {:?}", s.id)))?;
        let mut constant = 0i128;
        let mut linear = Vec::new();
        for &j in net.incident(i) {
            let nu = net.coefficient(i, j) as i128;
            let block = &blocks[j];
            constant += nu * block.variable.offset as i128;
            for (k, &w) in block.variable.weights.iter().enumerate() {
                if w != 0 {
                    linear.push((block.start + k, nu * w as i128));
                }
            }
        }
        acc.add_squared(weight, constant, &linear)?;
    }

    acc.terms.retain(|_, v| !v.is_zero());
    Ok(QuboModel { num_bits: next, terms: acc.terms, offset: acc.offset, blocks })
}

pub fn build_qubo(prob: &SynthesisProblem, kind: EncodingScheme, penalties: &PenaltyAssignment) -> Result<QuboModel> {
    build_qubo_for_network(prob.network(), kind, penalties)
}

impl QuboModel {
    pub fn from_parts(
        num_bits: usize,
        terms: BTreeMap<(usize, usize), Rational>,
        offset: Rational,
        blocks: Vec<VariableBlock>,
    ) -> Result<Self> {
        for &(i, j) in terms.keys() {
            if i > j || j >= num_bits {
                return Err(Error::InvalidArgument(format!("bad term index ({i}, {j})")));
            }
        }
        let mut owner = vec![false; num_bits];
        for b in &blocks {
            let bits = (b.start..b.start + b.variable.bit_count).chain(b.aux_bit);
            for k in bits {
                if k >= num_bits || owner[k] {
                    return Err(Error::InvalidArgument(format!("bit {k} is out of range or shared")));
                }
                owner[k] = true;
            }
        }
        let terms = terms.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(QuboModel { num_bits, terms, offset, blocks })
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), Rational> {
        &self.terms
    }

    pub fn offset(&self) -> Rational {
        self.offset
    }

    pub fn blocks(&self) -> &[VariableBlock] {
        &self.blocks
    }

    fn check_len(&self, bits: &[bool]) -> Result<()> {
        if bits.len() != self.num_bits {
            return Err(Error::LengthMismatch { expected: self.num_bits, actual: bits.len() });
        }
        Ok(())
    }

    pub fn energy(&self, bits: &[bool]) -> Result<Rational> {
        self.check_len(bits)?;
        let mut e = self.offset;
        for (&(i, j), c) in &self.terms {
            if bits[i] && bits[j] {
                e += c;
            }
        }
        Ok(e)
    }

    /// Multiplicities in reaction order (one-hot values clamped).
    pub fn decode_dense(&self, bits: &[bool]) -> Result<Vec<u64>> {
        self.check_len(bits)?;
        self.blocks.iter().map(|b| b.variable.decode(b.bits(bits))).collect()
    }

    /// Unclamped affine values, for diagnosing one-hot violations.
    pub fn decode_raw(&self, bits: &[bool]) -> Result<Vec<i64>> {
        self.check_len(bits)?;
        self.blocks.iter().map(|b| b.variable.decode_raw(b.bits(bits))).collect()
    }

    /// Total encoding penalty `sum_r P_r(q_r)` (unweighted).
    pub fn encoding_penalty(&self, bits: &[bool]) -> Result<i64> {
        self.check_len(bits)?;
        self.blocks.iter().map(|b| b.variable.penalty_value(b.bits(bits))).sum()
    }

    pub fn decode_sample(&self, bits: &[bool]) -> Result<Pathway> {
        let m = self.decode_dense(bits)?;
        Ok(Pathway {
            multiplicities: self.blocks.iter().zip(m).map(|(b, v)| (b.variable.reaction_id.clone(), v)).collect(),
        })
    }

    /// Zero-penalty bit pattern for an in-bound pathway, with each auxiliary
    /// bit at its minimizing value.
    pub fn encode_pathway(&self, p: &Pathway) -> Result<Vec<bool>> {
        for id in p.multiplicities.keys() {
            if !self.blocks.iter().any(|b| &b.variable.reaction_id == id) {
                return Err(Error::UnknownReaction(id.clone()));
            }
        }
        let mut bits = vec![false; self.num_bits];
        for b in &self.blocks {
            let x = p.get(&b.variable.reaction_id);
            let pattern = b.variable.canonical_bits(x)?;
            bits[b.start..b.start + pattern.len()].copy_from_slice(&pattern);
            if let Some(y) = b.aux_bit {
                bits[y] = x > 0;
            }
        }
        Ok(bits)
    }

    /// Coefficients on a shared integer grid: `energy = (offset + sum) / denominator`.
    pub fn integer_form(&self) -> Result<IntegerQubo> {
        let denominator = rational::common_denominator(self.terms.values().chain(std::iter::once(&self.offset)))?;
        let mut diag = vec![0i128; self.num_bits];
        let mut neighbors = vec![Vec::new(); self.num_bits];
        for (&(i, j), c) in &self.terms {
            let v = rational::scale_to_int(c, denominator)?;
            if i == j {
                diag[i] = v;
            } else {
                neighbors[i].push((j, v));
                neighbors[j].push((i, v));
            }
        }
        Ok(IntegerQubo { denominator, offset: rational::scale_to_int(&self.offset, denominator)?, diag, neighbors })
    }

    /// Minimum energy and every minimizing assignment, by Gray-code
    /// enumeration of all `2^n` assignments.
    pub fn exhaustive_minimum(&self, max_bits: usize) -> Result<(Rational, Vec<Vec<bool>>)> {
        if self.num_bits > max_bits {
            return Err(Error::SearchSpaceTooLarge { size: 1u128 << self.num_bits.min(127), limit: 1u128 << max_bits });
        }
        let form = self.integer_form()?;
        let n = self.num_bits;
        let mut bits = vec![false; n];
        let mut energy = form.offset;
        let mut best = energy;
        let mut argmin = vec![bits.clone()];
        for step in 1u64..(1u64 << n) {
            let i = step.trailing_zeros() as usize;
            energy += form.flip_delta(&bits, i);
            bits[i] = !bits[i];
            if energy < best {
                best = energy;
                argmin.clear();
                argmin.push(bits.clone());
            } else if energy == best {
                argmin.push(bits.clone());
            }
        }
        Ok((Rational::new(best, form.denominator), argmin))
    }
}

/// Integer-scaled QUBO for fast exact evaluation.
#[derive(Debug, Clone)]
pub struct IntegerQubo {
    pub denominator: i128,
    pub offset: i128,
    pub diag: Vec<i128>,
    pub neighbors: Vec<Vec<(usize, i128)>>,
}

impl IntegerQubo {
    /// Energy change (scaled) from flipping bit `i`.
    pub fn flip_delta(&self, bits: &[bool], i: usize) -> i128 {
        let field: i128 = self.diag[i] + self.neighbors[i].iter().filter(|(j, _)| bits[*j]).map(|(_, c)| c).sum::<i128>();
        if bits[i] {
            -field
        } else {
            field
        }
    }

    pub fn energy(&self, bits: &[bool]) -> i128 {
        let mut e = self.offset;
        for i in (0..bits.len()).filter(|&i| bits[i]) {
            e += self.diag[i];
            e += self.neighbors[i].iter().filter(|&&(j, _)| j > i && bits[j]).map(|(_, c)| c).sum::<i128>();
        }
        e
    }
}

pub fn qubo_energy(m: &QuboModel, bits: &[bool]) -> Result<Rational> {
    m.energy(bits)
}

pub fn decode_sample(m: &QuboModel, bits: &[bool]) -> Result<Pathway> {
    m.decode_sample(bits)
}
