//! The synthesis-planning problem: minimize variable plus fixed costs over
//! integer multiplicities subject to mass balance and bounds.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::crn::{NetworkFile, Pathway, ReactionKind, ReactionNetwork};
use crate::error::{Error, Result};
use crate::rational::{serde_decimal, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisProblem {
    network: ReactionNetwork,
    targets: BTreeSet<String>,
    bound: PenaltyBound,
}

impl SynthesisProblem {
    /// Targets are the species whose outflow has a positive lower bound.
    pub fn new(network: ReactionNetwork) -> Result<Self> {
        let targets: BTreeSet<String> = network
            .reactions()
            .iter()
            .filter(|r| r.kind == ReactionKind::Outflow && r.lower_bound >= 1)
            .flat_map(|r| r.stoichiometry.keys().cloned())
            .collect();
        if targets.is_empty() {
            return Err(Error::NoTargets);
        }
        let mut prob = SynthesisProblem { network, targets, bound: PenaltyBound::default() };
        prob.bound = prob.compute_penalty_bound();
        Ok(prob)
    }

    /// Explicit target list; it must still satisfy the positive-outflow invariant.
    pub fn with_targets(network: ReactionNetwork, targets: BTreeSet<String>) -> Result<Self> {
        for t in &targets {
            network.species_by_id(t)?;
        }
        let derived = SynthesisProblem::new(network)?;
        if targets.is_empty() {
            return Ok(derived);
        }
        Ok(SynthesisProblem { targets, ..derived })
    }

    pub fn from_file(file: &NetworkFile) -> Result<Self> {
        SynthesisProblem::with_targets(file.to_network()?, file.target_set())
    }

    pub fn to_file(&self) -> NetworkFile {
        NetworkFile::from_network(&self.network, &self.targets)
    }

    pub fn network(&self) -> &ReactionNetwork {
        &self.network
    }

    pub fn targets(&self) -> &BTreeSet<String> {
        &self.targets
    }

    pub fn target_indices(&self) -> Vec<usize> {
        self.targets.iter().filter_map(|t| self.network.species_index(t)).collect()
    }

    /// Number of integer variables, i.e. reactions.
    pub fn num_variables(&self) -> usize {
        self.network.reactions().len()
    }

    pub fn cost_dense(&self, m: &[u64]) -> CostBreakdown {
        let mut variable = Rational::zero();
        let mut fixed = Rational::zero();
        for (r, &x) in self.network.reactions().iter().zip(m) {
            if x > 0 {
                variable += r.unit_cost * Rational::from_integer(x as i128);
                fixed += r.fixed_cost;
            }
        }
        CostBreakdown { variable_cost: variable, fixed_cost: fixed, total: variable + fixed }
    }

    pub fn squared_residual_sum(&self, m: &[u64]) -> i128 {
        self.network.residuals_dense(m).iter().map(|&v| (v as i128) * (v as i128)).sum()
    }

    pub fn score_dense(&self, m: &[u64]) -> Rational {
        let bound = self.bound.value;
        self.cost_dense(m).total + bound * Rational::from_integer(self.squared_residual_sum(m))
    }

    /// The penalty coefficient used by the score and the upper end of the
    /// tuning domain: the cost bound, widened when it would not separate
    /// feasible from infeasible pathways.
    pub fn penalty_bound(&self) -> PenaltyBound {
        self.bound
    }

    fn compute_penalty_bound(&self) -> PenaltyBound {
        let base = cost_upper_bound(self);
        let mut value = if base.is_zero() { Rational::from_integer(1) } else { base };
        let mut widened = base.is_zero();
        let upper: Vec<u64> = self.network.reactions().iter().map(|r| r.upper_bound).collect();
        if self.network.is_feasible_dense(&upper) {
            let top = self.cost_dense(&upper).total;
            while top >= value {
                value *= Rational::from_integer(2);
                widened = true;
            }
        }
        PenaltyBound { cost_bound: base, value, widened }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PenaltyBound {
    /// Sum over reactions of `c_unit * u + c_fixed`.
    #[serde(with = "serde_decimal")]
    pub cost_bound: Rational,
    /// Effective bound; equals `cost_bound` unless `widened`.
    #[serde(with = "serde_decimal")]
    pub value: Rational,
    pub widened: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    #[serde(with = "serde_decimal")]
    pub variable_cost: Rational,
    #[serde(with = "serde_decimal")]
    pub fixed_cost: Rational,
    #[serde(with = "serde_decimal")]
    pub total: Rational,
}

pub fn cost(prob: &SynthesisProblem, p: &Pathway) -> Result<CostBreakdown> {
    Ok(prob.cost_dense(&prob.network.dense(p)?))
}

pub fn cost_upper_bound(prob: &SynthesisProblem) -> Rational {
    prob.network
        .reactions()
        .iter()
        .map(|r| r.unit_cost * Rational::from_integer(r.upper_bound as i128) + r.fixed_cost)
        .sum()
}

/// Cost plus the bound-weighted sum of squared mass-balance residuals.
pub fn score(prob: &SynthesisProblem, p: &Pathway) -> Result<Rational> {
    Ok(prob.score_dense(&prob.network.dense(p)?))
}

/// Whether putting every reaction at its upper bound breaks mass balance.
pub fn check_allupper_infeasible(prob: &SynthesisProblem) -> bool {
    let upper: Vec<u64> = prob.network.reactions().iter().map(|r| r.upper_bound).collect();
    prob.network.residuals_dense(&upper).iter().any(|&v| v != 0)
}
