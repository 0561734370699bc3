//! Exact minimum-cost search by depth-first enumeration with interval
//! pruning on the mass-balance residuals.

use serde::{Deserialize, Serialize};

use crate::crn::{Pathway, ReactionNetwork};
use crate::error::{Error, Result};
use crate::problem::SynthesisProblem;
use crate::rational::{self, serde_decimal, Rational};

pub const DEFAULT_ORACLE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    #[serde(with = "serde_decimal")]
    pub min_cost: Rational,
    pub optimal_pathways: Vec<Pathway>,
    #[serde(default, with = "crate::postprocess::opt_decimal", skip_serializing_if = "Option::is_none")]
    pub second_min_cost: Option<Rational>,
    pub search_space_size: u128,
}

impl OracleResult {
    /// Gap between the best and second-best distinct feasible costs.
    pub fn delta(&self) -> Option<Rational> {
        self.second_min_cost.map(|s| s - self.min_cost)
    }
}

/// `prod_r (u_r - l_r + 1)`, saturating.
pub fn search_space_size(net: &ReactionNetwork) -> u128 {
    net.reactions().iter().fold(1u128, |acc, r| acc.saturating_mul(r.span() as u128 + 1))
}

/// Enumeration state. Reactions are visited chemical first, then dummies,
/// so that each dummy closes its species' balance.
struct Search<'a> {
    net: &'a ReactionNetwork,
    order: Vec<usize>,
    /// `suffix[k][i]`: reachable (min, max) residual contribution of
    /// reactions `order[k..]` on species `i`.
    suffix: Vec<Vec<(i64, i64)>>,
    /// Scaled cost of each reaction at each multiplicity offset.
    step_cost: Vec<Vec<i128>>,
    min_rest: Vec<i128>,
    residual: Vec<i64>,
    current: Vec<u64>,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(net: &'a ReactionNetwork, scale: i128) -> Result<Self> {
        let nr = net.reactions().len();
        let ns = net.species().len();
        let mut order: Vec<usize> = (0..nr).filter(|&j| !net.reactions()[j].is_dummy()).collect();
        order.extend((0..nr).filter(|&j| net.reactions()[j].is_dummy()));
        let mut suffix = vec![vec![(0i64, 0i64); ns]; nr + 1];
        for k in (0..nr).rev() {
            suffix[k] = suffix[k + 1].clone();
            let j = order[k];
            let r = &net.reactions()[j];
            for &(i, nu) in net.column(j) {
                let a = nu * r.lower_bound as i64;
                let b = nu * r.upper_bound as i64;
                suffix[k][i].0 += a.min(b);
                suffix[k][i].1 += a.max(b);
            }
        }
        let mut step_cost = Vec::with_capacity(nr);
        for &j in &order {
            let r = &net.reactions()[j];
            let unit = rational::scale_to_int(&r.unit_cost, scale)?;
            let fixed = rational::scale_to_int(&r.fixed_cost, scale)?;
            step_cost.push(
                (r.lower_bound..=r.upper_bound)
                    .map(|x| unit * x as i128 + if x > 0 { fixed } else { 0 })
                    .collect::<Vec<_>>(),
            );
        }
        let mut min_rest = vec![0i128; nr + 1];
        for k in (0..nr).rev() {
            min_rest[k] = min_rest[k + 1] + step_cost[k].iter().copied().min().unwrap_or(0);
        }
        Ok(Search {
            net,
            order,
            suffix,
            step_cost,
            min_rest,
            residual: vec![0; ns],
            current: vec![0; nr],
            nodes: 0,
        })
    }

    fn consistent(&self, k: usize, j: usize) -> bool {
        self.net.column(j).iter().all(|&(i, _)| {
            let (lo, hi) = self.suffix[k + 1][i];
            let r = self.residual[i];
            r + lo <= 0 && r + hi >= 0
        })
    }

    fn assign(&mut self, j: usize, x: u64, sign: i64) {
        for &(i, nu) in self.net.column(j) {
            self.residual[i] += sign * nu * x as i64;
        }
    }

    /// Visit every feasible completion whose cost lower bound passes
    /// `prune(bound)`; `leaf` returns whether to stop.
    fn run(
        &mut self,
        k: usize,
        partial: i128,
        prune: &mut dyn FnMut(i128) -> bool,
        leaf: &mut dyn FnMut(&[u64], i128) -> bool,
    ) -> bool {
        self.nodes += 1;
        if k == self.order.len() {
            return leaf(&self.current, partial);
        }
        let j = self.order[k];
        let (lo, hi) = (self.net.reactions()[j].lower_bound, self.net.reactions()[j].upper_bound);
        for x in lo..=hi {
            let c = partial + self.step_cost[k][(x - lo) as usize];
            if prune(c + self.min_rest[k + 1]) {
                continue;
            }
            self.assign(j, x, 1);
            self.current[j] = x;
            let stop = self.consistent(k, j) && self.run(k + 1, c, prune, leaf);
            self.assign(j, x, -1);
            if stop {
                return true;
            }
        }
        false
    }
}

fn cost_scale(net: &ReactionNetwork) -> Result<i128> {
    rational::common_denominator(net.reactions().iter().flat_map(|r| [&r.unit_cost, &r.fixed_cost]))
}

/// Exact minimum cost, every minimizer, and the second-best distinct cost.
pub fn exhaustive_oracle(prob: &SynthesisProblem, limit: u128) -> Result<OracleResult> {
    let net = prob.network();
    let size = search_space_size(net);
    if size > limit {
        return Err(Error::SearchSpaceTooLarge { size, limit });
    }
    let scale = cost_scale(net)?;
    let mut search = Search::new(net, scale)?;
    let mut best: Option<i128> = None;
    let mut optima: Vec<Vec<u64>> = Vec::new();
    let second = std::cell::Cell::new(None::<i128>);
    let mut prune = |bound: i128| second.get().is_some_and(|s| bound >= s);
    let mut leaf = |m: &[u64], c: i128| {
        match best {
            Some(b) if c > b => {
                if second.get().is_none_or(|s| c < s) {
                    second.set(Some(c));
                }
            }
            Some(b) if c == b => optima.push(m.to_vec()),
            _ => {
                if let Some(b) = best {
                    second.set(Some(b));
                }
                best = Some(c);
                optima.clear();
                optima.push(m.to_vec());
            }
        }
        false
    };
    search.run(0, 0, &mut prune, &mut leaf);
    let second = second.get();
    let Some(best) = best else { return Err(Error::NoFeasiblePathway) };
    optima.sort();
    Ok(OracleResult {
        min_cost: Rational::new(best, scale),
        optimal_pathways: optima.iter().map(|m| net.pathway_from_dense(m)).collect(),
        second_min_cost: second.map(|s| Rational::new(s, scale)),
        search_space_size: size,
    })
}

/// Some feasible pathway, if one is found within `node_limit` search nodes.
/// `Err` means the budget ran out first.
pub fn find_feasible(net: &ReactionNetwork, node_limit: u64) -> std::result::Result<Option<Vec<u64>>, ()> {
    let scale = cost_scale(net).map_err(|_| ())?;
    let mut search = Search::new(net, scale).map_err(|_| ())?;
    let mut found = None;
    let nodes = std::cell::Cell::new(0u64);
    let exhausted = std::cell::Cell::new(false);
    let mut prune = |_: i128| {
        nodes.set(nodes.get() + 1);
        if nodes.get() > node_limit {
            exhausted.set(true);
        }
        exhausted.get()
    };
    let mut leaf = |m: &[u64], _| {
        found = Some(m.to_vec());
        true
    };
    search.run(0, 0, &mut prune, &mut leaf);
    match found {
        Some(m) => Ok(Some(m)),
        None if exhausted.get() => Err(()),
        None => Ok(None),
    }
}
