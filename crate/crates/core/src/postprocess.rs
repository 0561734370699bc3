//! Repair of annealer output: steepest descent on spins, decoding, and the
//! inflow/outflow adjustment.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::anneal::{steepest_descent_int, SampleSet};
use crate::crn::{Pathway, ReactionKind, ReactionNetwork};
use crate::error::Result;
use crate::problem::SynthesisProblem;
use crate::qubo::{spins_to_bits, IntegerIsing, QuboModel};
use crate::rational::{serde_decimal, Rational};

/// Reset every inflow and outflow to its lower bound, then give each
/// imbalanced species as much of the needed dummy flow as its bounds allow.
/// Returns the species (by index) left unbalanced.
pub fn adjust_ioflow_dense(net: &ReactionNetwork, m: &mut [u64]) -> Vec<usize> {
    for (x, r) in m.iter_mut().zip(net.reactions()) {
        if r.is_dummy() {
            *x = r.lower_bound;
        }
    }
    let residuals = net.residuals_dense(m);
    let mut order: Vec<usize> = (0..net.species().len()).collect();
    order.sort_by(|&a, &b| net.species()[a].id.cmp(&net.species()[b].id));
    let mut unbalanced = Vec::new();
    for i in order {
        let delta = residuals[i];
        if delta == 0 {
            continue;
        }
        // Overproduction goes out; overconsumption comes in.
        let kind = if delta > 0 { ReactionKind::Outflow } else { ReactionKind::Inflow };
        let need = delta.unsigned_abs();
        let mut left = need;
        if let Some(&j) = net.dummies_of(i, kind).first() {
            let nu = net.coefficient(i, j).unsigned_abs();
            let r = &net.reactions()[j];
            let headroom = r.upper_bound - m[j];
            let step = (left / nu).min(headroom);
            m[j] += step;
            left -= step * nu;
        }
        if left != 0 {
            unbalanced.push(i);
        }
    }
    unbalanced
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoflowAdjustment {
    pub pathway: Pathway,
    pub unbalanced: Vec<String>,
}

pub fn adjust_ioflow_report(net: &ReactionNetwork, p: &Pathway) -> Result<IoflowAdjustment> {
    let mut m = net.dense(p)?;
    let unbalanced = adjust_ioflow_dense(net, &mut m);
    Ok(IoflowAdjustment {
        pathway: net.pathway_from_dense(&m),
        unbalanced: unbalanced.into_iter().map(|i| net.species()[i].id.clone()).collect(),
    })
}

pub fn adjust_ioflow(net: &ReactionNetwork, p: &Pathway) -> Result<Pathway> {
    Ok(adjust_ioflow_report(net, p)?.pathway)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageScores {
    #[serde(with = "serde_decimal")]
    pub annealed: Rational,
    #[serde(default, with = "opt_decimal", skip_serializing_if = "Option::is_none")]
    pub steepest_descent: Option<Rational>,
    #[serde(default, with = "opt_decimal", skip_serializing_if = "Option::is_none")]
    pub ioflow: Option<Rational>,
}

impl StageScores {
    pub fn last(&self) -> Rational {
        self.ioflow.or(self.steepest_descent).unwrap_or(self.annealed)
    }
}

pub(crate) mod opt_decimal {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Rational>, ser: S) -> std::result::Result<S::Ok, S::Error> {
        v.map(|r| crate::rational::format_decimal(&r)).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Option<Rational>, D::Error> {
        let text: Option<String> = Option::deserialize(de)?;
        text.map(|t| crate::rational::parse_decimal(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairedSample {
    pub read: usize,
    #[serde(with = "serde_decimal")]
    pub annealed_energy: Rational,
    #[serde(with = "serde_decimal")]
    pub final_energy: Rational,
    pub scores: StageScores,
    pub pathway: Pathway,
    #[serde(with = "serde_decimal")]
    pub cost: Rational,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unbalanced: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub num_bits: usize,
    pub num_reads: usize,
    pub postprocess: bool,
    /// Mean E-score after each stage.
    pub mean_scores: StageScores,
    pub feasible_reads: usize,
    /// Read with the lowest final score; ties go to the earliest read.
    pub best: Option<usize>,
    pub samples: Vec<RepairedSample>,
}

impl SolveReport {
    pub fn best_sample(&self) -> Option<&RepairedSample> {
        self.best.map(|k| &self.samples[k])
    }

    /// Lowest cost among feasible final pathways.
    pub fn best_feasible_cost(&self) -> Option<Rational> {
        self.samples.iter().filter(|s| s.feasible).map(|s| s.cost).min()
    }

    pub fn mean_final_score(&self) -> Rational {
        self.mean_scores.last()
    }
}

/// Shared state for repairing many samples of one QUBO.
pub struct Repairer<'a> {
    qubo: &'a QuboModel,
    prob: &'a SynthesisProblem,
    ising: IntegerIsing,
}

impl<'a> Repairer<'a> {
    pub fn new(qubo: &'a QuboModel, prob: &'a SynthesisProblem) -> Result<Self> {
        let ising = crate::qubo::to_ising(qubo)?.integer_form()?;
        Ok(Repairer { qubo, prob, ising })
    }

    pub fn repair(&self, read: usize, spins: &[i8], postprocess: bool) -> Result<RepairedSample> {
        let net = self.prob.network();
        let annealed_energy = self.ising.energy_rational(spins);
        let mut m = self.qubo.decode_dense(&spins_to_bits(spins))?;
        let annealed = self.prob.score_dense(&m);
        let mut scores = StageScores { annealed, steepest_descent: None, ioflow: None };
        let mut final_energy = annealed_energy;
        let mut unbalanced = Vec::new();
        if postprocess {
            let sd = steepest_descent_int(&self.ising, spins);
            final_energy = self.ising.energy_rational(&sd);
            m = self.qubo.decode_dense(&spins_to_bits(&sd))?;
            scores.steepest_descent = Some(self.prob.score_dense(&m));
            unbalanced = adjust_ioflow_dense(net, &mut m);
            scores.ioflow = Some(self.prob.score_dense(&m));
        }
        Ok(RepairedSample {
            read,
            annealed_energy,
            final_energy,
            scores,
            cost: self.prob.cost_dense(&m).total,
            feasible: net.is_feasible_dense(&m),
            pathway: net.pathway_from_dense(&m),
            unbalanced: unbalanced.into_iter().map(|i| net.species()[i].id.clone()).collect(),
        })
    }
}

fn mean(values: impl Iterator<Item = Rational>, n: usize) -> Rational {
    values.fold(Rational::zero(), |a, b| a + b) / Rational::from_integer(n.max(1) as i128)
}

/// Steepest descent, decoding, and inflow/outflow adjustment for every read,
/// with the E-score recorded after each stage. With `postprocess` off only
/// the decoded annealer output is scored.
pub fn repair_pipeline(
    qubo: &QuboModel,
    prob: &SynthesisProblem,
    samples: &SampleSet,
    postprocess: bool,
) -> Result<SolveReport> {
    let repairer = Repairer::new(qubo, prob)?;
    // Identical spin vectors repair identically; do the work once per record.
    let mut cache: BTreeMap<usize, RepairedSample> = BTreeMap::new();
    let mut out = Vec::with_capacity(samples.num_reads());
    for (read, &k) in samples.read_order.iter().enumerate() {
        let base = match cache.get(&k) {
            Some(s) => s.clone(),
            None => {
                let s = repairer.repair(read, &samples.samples[k].spins, postprocess)?;
                cache.insert(k, s.clone());
                s
            }
        };
        out.push(RepairedSample { read, ..base });
    }
    let n = out.len();
    let mean_scores = StageScores {
        annealed: mean(out.iter().map(|s| s.scores.annealed), n),
        steepest_descent: postprocess.then(|| mean(out.iter().filter_map(|s| s.scores.steepest_descent), n)),
        ioflow: postprocess.then(|| mean(out.iter().filter_map(|s| s.scores.ioflow), n)),
    };
    let best = (0..n).min_by(|&a, &b| out[a].scores.last().cmp(&out[b].scores.last()));
    Ok(SolveReport {
        num_bits: qubo.num_bits(),
        num_reads: n,
        postprocess,
        mean_scores,
        feasible_reads: out.iter().filter(|s| s.feasible).count(),
        best,
        samples: out,
    })
}
