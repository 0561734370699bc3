//! Ising form of a QUBO under `q = (1 - sigma) / 2`, with
//! `H = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i + offset`.
//! Spin `+1` is bit 0.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::QuboModel;
use crate::error::{Error, Result};
use crate::rational::{self, checked_add, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub num_spins: usize,
    pub couplings: BTreeMap<(usize, usize), Rational>,
    pub fields: Vec<Rational>,
    pub offset: Rational,
}

pub fn to_ising(q: &QuboModel) -> Result<IsingModel> {
    let n = q.num_bits();
    let mut couplings: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut fields = vec![Rational::zero(); n];
    let mut offset = q.offset();
    let half = Rational::new(1, 2);
    let quarter = Rational::new(1, 4);
    for (&(i, j), c) in q.terms() {
        if i == j {
            let v = c * half;
            fields[i] = checked_add(&fields[i], &v)?;
            offset = checked_add(&offset, &v)?;
        } else {
            let v = c * quarter;
            let slot = couplings.entry((i, j)).or_insert_with(Rational::zero);
            *slot = checked_add(slot, &-v)?;
            fields[i] = checked_add(&fields[i], &v)?;
            fields[j] = checked_add(&fields[j], &v)?;
            offset = checked_add(&offset, &v)?;
        }
    }
    couplings.retain(|_, v| !v.is_zero());
    Ok(IsingModel { num_spins: n, couplings, fields, offset })
}

pub fn ising_energy(m: &IsingModel, spins: &[i8]) -> Result<Rational> {
    m.energy(spins)
}

impl IsingModel {
    pub fn energy(&self, spins: &[i8]) -> Result<Rational> {
        if spins.len() != self.num_spins {
            return Err(Error::LengthMismatch { expected: self.num_spins, actual: spins.len() });
        }
        let mut e = self.offset;
        for (&(i, j), c) in &self.couplings {
            e -= c * Rational::from_integer((spins[i] * spins[j]) as i128);
        }
        for (h, &s) in self.fields.iter().zip(spins) {
            e -= h * Rational::from_integer(s as i128);
        }
        Ok(e)
    }

    /// Largest coefficient magnitude over couplings and fields.
    pub fn max_abs_coefficient(&self) -> Rational {
        self.couplings
            .values()
            .chain(&self.fields)
            .map(|v| if *v < Rational::zero() { -v } else { *v })
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn integer_form(&self) -> Result<IntegerIsing> {
        let denominator =
            rational::common_denominator(self.couplings.values().chain(&self.fields).chain(std::iter::once(&self.offset)))?;
        let mut neighbors = vec![Vec::new(); self.num_spins];
        for (&(i, j), c) in &self.couplings {
            let v = rational::scale_to_int(c, denominator)?;
            neighbors[i].push((j, v));
            neighbors[j].push((i, v));
        }
        let fields = self.fields.iter().map(|h| rational::scale_to_int(h, denominator)).collect::<Result<_>>()?;
        Ok(IntegerIsing { denominator, offset: rational::scale_to_int(&self.offset, denominator)?, fields, neighbors })
    }
}

pub fn bits_to_spins(bits: &[bool]) -> Vec<i8> {
    bits.iter().map(|&b| if b { -1 } else { 1 }).collect()
}

pub fn spins_to_bits(spins: &[i8]) -> Vec<bool> {
    spins.iter().map(|&s| s < 0).collect()
}

/// Integer-scaled Ising model: `H = (offset - ...) / denominator`.
#[derive(Debug, Clone)]
pub struct IntegerIsing {
    pub denominator: i128,
    pub offset: i128,
    pub fields: Vec<i128>,
    pub neighbors: Vec<Vec<(usize, i128)>>,
}

impl IntegerIsing {
    pub fn local_field(&self, spins: &[i8], i: usize) -> i128 {
        self.fields[i] + self.neighbors[i].iter().map(|&(j, c)| c * spins[j] as i128).sum::<i128>()
    }

    /// Scaled energy change from flipping spin `i`.
    pub fn flip_delta(&self, spins: &[i8], i: usize) -> i128 {
        2 * spins[i] as i128 * self.local_field(spins, i)
    }

    pub fn energy(&self, spins: &[i8]) -> i128 {
        let mut e = self.offset;
        for i in 0..spins.len() {
            let s = spins[i] as i128;
            e -= self.fields[i] * s;
            e -= self.neighbors[i].iter().filter(|&&(j, _)| j > i).map(|&(j, c)| c * s * spins[j] as i128).sum::<i128>();
        }
        e
    }

    pub fn energy_rational(&self, spins: &[i8]) -> Rational {
        Rational::new(self.energy(spins), self.denominator)
    }
}
