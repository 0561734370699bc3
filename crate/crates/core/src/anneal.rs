//! Simulated annealing over an Ising model and steepest-descent local search.
//!
//! Inverse temperatures are given in the units of the model's energy. The
//! sampler divides every coefficient by `max(|J_ij|, |h_i|)` and multiplies
//! the schedule by the same factor, so the dynamics do not depend on the
//! overall energy scale. Reported energies are recomputed exactly.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{IntegerIsing, IsingModel};
use crate::rational::{self, serde_decimal, Rational};

pub const DEFAULT_SWEEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Geometric,
    InverseLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub kind: ScheduleKind,
    pub sweeps: usize,
    pub beta_hot: f64,
    pub beta_cold: f64,
    /// Energy scale `Delta` of the inverse-log schedule `T(t) = N Delta / log t`.
    pub delta_scale: f64,
}

impl AnnealSchedule {
    pub fn geometric(sweeps: usize, beta_hot: f64, beta_cold: f64) -> Result<Self> {
        let s = AnnealSchedule { kind: ScheduleKind::Geometric, sweeps, beta_hot, beta_cold, delta_scale: 0.0 };
        s.validate()?;
        Ok(s)
    }

    pub fn inverse_log(sweeps: usize, delta_scale: f64) -> Result<Self> {
        let s = AnnealSchedule { kind: ScheduleKind::InverseLog, sweeps, beta_hot: 0.0, beta_cold: 0.0, delta_scale };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::InvalidArgument("sweeps must be at least 1".into()));
        }
        match self.kind {
            ScheduleKind::Geometric => {
                let ok = self.beta_hot > 0.0 && self.beta_hot.is_finite() && self.beta_cold.is_finite();
                if !ok || self.beta_hot > self.beta_cold {
                    return Err(Error::InvalidArgument(format!(
                        "need 0 < beta_hot <= beta_cold, got {} and {}",
                        self.beta_hot, self.beta_cold
                    )));
                }
            }
            ScheduleKind::InverseLog => {
                if !(self.delta_scale > 0.0 && self.delta_scale.is_finite()) {
                    return Err(Error::InvalidArgument("inverse-log schedule needs a positive delta".into()));
                }
            }
        }
        Ok(())
    }

    /// Inverse temperature per sweep for a model with `num_spins` spins.
    /// A single-sweep geometric schedule runs at `beta_cold`.
    pub fn betas(&self, num_spins: usize) -> Vec<f64> {
        let n = self.sweeps;
        match self.kind {
            ScheduleKind::Geometric => {
                if n == 1 {
                    return vec![self.beta_cold];
                }
                let ratio = self.beta_cold / self.beta_hot;
                (0..n)
                    .map(|t| match t {
                        0 => self.beta_hot,
                        t if t == n - 1 => self.beta_cold,
                        t => self.beta_hot * ratio.powf(t as f64 / (n - 1) as f64),
                    })
                    .collect()
            }
            ScheduleKind::InverseLog => {
                // t starts at 2 so that the first temperature is finite.
                let scale = num_spins.max(1) as f64 * self.delta_scale;
                (0..n).map(|t| ((t + 2) as f64).ln() / scale).collect()
            }
        }
    }
}

/// `(beta_hot, beta_cold)` from single-flip energy-change bounds.
///
/// The largest change is bounded by `2 (sum_j |J_ij| + |h_i|)` over spins;
/// the smallest nonzero change is estimated as twice the smallest nonzero
/// coefficient magnitude. An all-zero model gets `(1, 1)`.
pub fn default_beta_range(m: &IsingModel) -> (f64, f64) {
    let n = m.num_spins;
    let mut sums = vec![0.0f64; n];
    let mut min_coef = f64::INFINITY;
    for (&(i, j), c) in &m.couplings {
        let a = rational::to_f64(c).abs();
        sums[i] += a;
        sums[j] += a;
        if a > 0.0 {
            min_coef = min_coef.min(a);
        }
    }
    for (i, h) in m.fields.iter().enumerate() {
        let a = rational::to_f64(h).abs();
        sums[i] += a;
        if a > 0.0 {
            min_coef = min_coef.min(a);
        }
    }
    let max_delta = 2.0 * sums.iter().cloned().fold(0.0, f64::max);
    if max_delta == 0.0 || !min_coef.is_finite() {
        return (1.0, 1.0);
    }
    let min_delta = 2.0 * min_coef;
    (2f64.ln() / max_delta, 100f64.ln() / min_delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub spins: Vec<i8>,
    #[serde(with = "serde_decimal")]
    pub energy: Rational,
    pub num_occurrences: usize,
}

/// Reads grouped by distinct spin vector, in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub samples: Vec<SampleRecord>,
    /// Index into `samples` for each read, in read order.
    pub read_order: Vec<usize>,
    pub seed: u64,
    pub schedule: AnnealSchedule,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub read_seconds: Vec<f64>,
}

impl SampleSet {
    pub fn from_reads(reads: Vec<(Vec<i8>, Rational)>, seed: u64, schedule: AnnealSchedule, read_seconds: Vec<f64>) -> Self {
        let mut samples: Vec<SampleRecord> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut read_order = Vec::with_capacity(reads.len());
        for (spins, energy) in reads {
            let k = *index.entry(spins.clone()).or_insert_with(|| {
                samples.push(SampleRecord { spins, energy, num_occurrences: 0 });
                samples.len() - 1
            });
            samples[k].num_occurrences += 1;
            read_order.push(k);
        }
        SampleSet { samples, read_order, seed, schedule, read_seconds }
    }

    pub fn num_reads(&self) -> usize {
        self.read_order.len()
    }

    /// Spin vector and energy of each read, in read order.
    pub fn reads(&self) -> impl Iterator<Item = &SampleRecord> + '_ {
        self.read_order.iter().map(|&k| &self.samples[k])
    }

    pub fn lowest(&self) -> Option<&SampleRecord> {
        self.samples.iter().min_by(|a, b| a.energy.cmp(&b.energy))
    }
}

/// Float copy of the model in CSR form, divided by `scale`.
struct FloatModel {
    scale: f64,
    fields: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
}

impl FloatModel {
    fn new(m: &IsingModel) -> FloatModel {
        let max = rational::to_f64(&m.max_abs_coefficient());
        let scale = if max > 0.0 { max } else { 1.0 };
        let n = m.num_spins;
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(i, j), c) in &m.couplings {
            let v = rational::to_f64(c) / scale;
            adj[i].push((j, v));
            adj[j].push((i, v));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for row in adj {
            for (j, v) in row {
                targets.push(j);
                weights.push(v);
            }
            offsets.push(targets.len());
        }
        let fields = m.fields.iter().map(|h| rational::to_f64(h) / scale).collect();
        FloatModel { scale, fields, offsets, targets, weights }
    }

    fn anneal(&self, betas: &[f64], rng: &mut ChaCha8Rng) -> Vec<i8> {
        let n = self.fields.len();
        let mut spins: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        // local[i] = h_i + sum_j J_ij s_j; flipping i changes H by 2 s_i local[i].
        let mut local = self.fields.clone();
        for i in 0..n {
            for k in self.offsets[i]..self.offsets[i + 1] {
                local[i] += self.weights[k] * spins[self.targets[k]] as f64;
            }
        }
        for &beta in betas {
            let b = beta * self.scale;
            for i in 0..n {
                let delta = 2.0 * spins[i] as f64 * local[i];
                if delta > 0.0 && rng.gen::<f64>() >= (-b * delta).exp() {
                    continue;
                }
                let old = spins[i] as f64;
                spins[i] = -spins[i];
                for k in self.offsets[i]..self.offsets[i + 1] {
                    local[self.targets[k]] -= 2.0 * self.weights[k] * old;
                }
            }
        }
        spins
    }
}

fn read_rng(seed: u64, read: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read as u64);
    rng
}

/// Run `num_reads` independent anneals. Read `k` draws from stream `k` of a
/// generator seeded with `seed`, so results do not depend on thread count.
pub fn simulated_anneal(m: &IsingModel, schedule: &AnnealSchedule, num_reads: usize, seed: u64) -> Result<SampleSet> {
    if num_reads == 0 {
        return Err(Error::InvalidArgument("num_reads must be at least 1".into()));
    }
    schedule.validate()?;
    let float = FloatModel::new(m);
    let exact = m.integer_form()?;
    let betas = schedule.betas(m.num_spins);
    let results: Vec<(Vec<i8>, Rational, f64)> = (0..num_reads)
        .into_par_iter()
        .map(|k| {
            let start = Instant::now();
            let mut rng = read_rng(seed, k);
            let spins = float.anneal(&betas, &mut rng);
            let secs = start.elapsed().as_secs_f64();
            let e = exact.energy_rational(&spins);
            (spins, e, secs)
        })
        .collect();
    let seconds = results.iter().map(|r| r.2).collect();
    let reads = results.into_iter().map(|(s, e, _)| (s, e)).collect();
    Ok(SampleSet::from_reads(reads, seed, *schedule, seconds))
}

/// Best-improvement single-flip descent until no flip strictly lowers the
/// energy. Ties go to the lowest spin index.
pub fn steepest_descent(m: &IsingModel, spins: &[i8]) -> Result<Vec<i8>> {
    if spins.len() != m.num_spins {
        return Err(Error::LengthMismatch { expected: m.num_spins, actual: spins.len() });
    }
    Ok(steepest_descent_int(&m.integer_form()?, spins))
}

pub fn steepest_descent_int(m: &IntegerIsing, spins: &[i8]) -> Vec<i8> {
    let mut s = spins.to_vec();
    let n = s.len();
    let mut local: Vec<i128> = (0..n).map(|i| m.local_field(&s, i)).collect();
    loop {
        let mut best = 0i128;
        let mut pick = None;
        for i in 0..n {
            let delta = 2 * s[i] as i128 * local[i];
            if delta < best {
                best = delta;
                pick = Some(i);
            }
        }
        let Some(i) = pick else { return s };
        let old = s[i] as i128;
        s[i] = -s[i];
        for &(j, c) in &m.neighbors[i] {
            local[j] -= 2 * c * old;
        }
    }
}
