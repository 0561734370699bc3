//! Synthetic benchmark problems.
//!
//! A random bipartite reaction network stands in for a reaction database.
//! Availability, targets, costs and bounds then follow the usual benchmark
//! recipe: hubs and sources are purchasable together with a quarter of the
//! other non-terminal species, targets are drawn from the unavailable
//! species, the relevant subnetwork is extracted, dummies are attached,
//! inflow prices and chemical fixed costs are integers drawn from 1..=10,
//! target outflows are fixed to 1 and every other reaction ranges over 0..=5.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle::find_feasible;
use crate::crn::{
    attach_dummy_reactions, extract_relevant_subnetwork, is_connected, DummyOptions, NetworkFile, Reaction,
    ReactionKind, ReactionNetwork, Species,
};
use crate::error::{Error, Result};
use crate::problem::{check_allupper_infeasible, SynthesisProblem};
use crate::rational::from_int;

pub const HUB_DEGREE: usize = 20;
pub const MIN_COST: i64 = 1;
pub const MAX_COST: i64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeProfile {
    pub name: String,
    pub num_species: usize,
    pub num_reactions: usize,
    pub min_targets: usize,
    pub max_targets: usize,
    /// Reject problems with more integer variables than this.
    pub max_variables: Option<usize>,
    pub min_variables: usize,
    pub max_attempts: usize,
    /// Search-node budget for the feasibility check.
    pub feasibility_nodes: u64,
}

impl SizeProfile {
    /// At most 12 integer variables; small enough for exhaustive checks.
    pub fn tiny() -> Self {
        SizeProfile {
            name: "tiny".into(),
            num_species: 14,
            num_reactions: 12,
            min_targets: 1,
            max_targets: 2,
            max_variables: Some(12),
            min_variables: 4,
            max_attempts: 20000,
            feasibility_nodes: 2_000_000,
        }
    }

    pub fn small() -> Self {
        SizeProfile {
            name: "small".into(),
            num_species: 40,
            num_reactions: 30,
            min_targets: 1,
            max_targets: 10,
            max_variables: Some(40),
            min_variables: 10,
            max_attempts: 20000,
            feasibility_nodes: 2_000_000,
        }
    }

    pub fn medium() -> Self {
        SizeProfile {
            name: "medium".into(),
            num_species: 120,
            num_reactions: 90,
            min_targets: 1,
            max_targets: 10,
            max_variables: Some(120),
            min_variables: 25,
            max_attempts: 20000,
            feasibility_nodes: 5_000_000,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "tiny" => Ok(Self::tiny()),
            "small" => Ok(Self::small()),
            "medium" => Ok(Self::medium()),
            _ => Err(Error::InvalidArgument(format!("unknown size profile {name:?}"))),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_species < 4 || self.num_reactions == 0 || self.min_targets == 0 || self.min_targets > self.max_targets {
            return Err(Error::InvalidArgument(format!("bad size profile {:?}", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProblem {
    pub problem: SynthesisProblem,
    pub seed: u64,
    pub profile: SizeProfile,
    pub attempts: usize,
    pub purchasable: BTreeSet<String>,
}

impl GeneratedProblem {
    /// Network file with the generation provenance attached.
    pub fn to_file(&self) -> NetworkFile {
        let mut file = self.problem.to_file();
        file.provenance = Some(serde_json::json!({
            "generator": "random_bipartite",
            "seed": self.seed,
            "profile": self.profile,
            "attempts": self.attempts,
        }));
        file
    }
}

fn random_database(rng: &mut ChaCha8Rng, profile: &SizeProfile) -> Result<ReactionNetwork> {
    let n = profile.num_species;
    let species: Vec<Species> = (0..n).map(|i| Species::new(format!("S{i}"))).collect();
    let mut reactions = Vec::with_capacity(profile.num_reactions);
    let ids: Vec<usize> = (0..n).collect();
    for j in 0..profile.num_reactions {
        let reactants = rng.gen_range(1..=3);
        let products = rng.gen_range(1..=2);
        let picked: Vec<usize> = ids.choose_multiple(rng, reactants + products).copied().collect();
        let mut stoich: Vec<(String, i64)> = Vec::new();
        for (k, &s) in picked.iter().enumerate() {
            let c = rng.gen_range(1..=2);
            stoich.push((format!("S{s}"), if k < reactants { -c } else { c }));
        }
        let refs: Vec<(&str, i64)> = stoich.iter().map(|(s, c)| (s.as_str(), *c)).collect();
        reactions.push(Reaction::chemical(format!("R{j}"), &refs));
    }
    ReactionNetwork::new(species, reactions)
}

struct Availability {
    purchasable: BTreeSet<String>,
    candidates: Vec<String>,
}

fn availability(rng: &mut ChaCha8Rng, db: &ReactionNetwork) -> Availability {
    let mut purchasable = BTreeSet::new();
    let mut non_terminal = Vec::new();
    let mut sinks = Vec::new();
    for (i, s) in db.species().iter().enumerate() {
        let indeg = db.incident(i).iter().filter(|&&j| db.coefficient(i, j) > 0).count();
        let outdeg = db.incident(i).len() - indeg;
        if indeg >= HUB_DEGREE || outdeg >= HUB_DEGREE || indeg == 0 {
            // Hubs count as purchasable; sources always are.
            purchasable.insert(s.id.clone());
        } else if outdeg == 0 {
            sinks.push(s.id.clone());
        } else {
            non_terminal.push(s.id.clone());
        }
    }
    non_terminal.shuffle(rng);
    let bought = non_terminal.len() / 4;
    purchasable.extend(non_terminal.drain(..bought));
    let mut candidates = sinks;
    candidates.extend(non_terminal);
    candidates.sort();
    Availability { purchasable, candidates }
}

fn attempt(rng: &mut ChaCha8Rng, profile: &SizeProfile) -> std::result::Result<(SynthesisProblem, BTreeSet<String>), String> {
    let db = random_database(rng, profile).map_err(|e| e.to_string())?;
    let avail = availability(rng, &db);
    if avail.candidates.is_empty() {
        return Err("no target candidates".into());
    }
    let count = rng.gen_range(profile.min_targets..=profile.max_targets).min(avail.candidates.len());
    let targets: BTreeSet<String> = avail.candidates.choose_multiple(rng, count).cloned().collect();
    let relevant = extract_relevant_subnetwork(&db, &targets, db.reactions().len(), Some(HUB_DEGREE))
        .map_err(|e| e.to_string())?;
    if relevant.reactions().is_empty() {
        return Err("no relevant reactions".into());
    }
    if !is_connected(&relevant) {
        return Err("relevant network is disconnected".into());
    }
    let with_dummies = attach_dummy_reactions(&relevant, &avail.purchasable, &targets, DummyOptions::default())
        .map_err(|e| e.to_string())?;
    let n = with_dummies.reactions().len();
    if n < profile.min_variables || profile.max_variables.is_some_and(|m| n > m) {
        return Err(format!("{n} integer variables is outside the profile"));
    }
    let reactions: Vec<Reaction> = with_dummies
        .reactions()
        .iter()
        .cloned()
        .map(|r| match r.kind {
            ReactionKind::Chemical => {
                let c = rng.gen_range(MIN_COST..=MAX_COST);
                r.with_costs(from_int(0), from_int(c))
            }
            ReactionKind::Inflow => {
                let c = rng.gen_range(MIN_COST..=MAX_COST);
                r.with_costs(from_int(c), from_int(0))
            }
            ReactionKind::Outflow => r,
        })
        .map(|r| {
            let is_target = r.kind == ReactionKind::Outflow && r.stoichiometry.keys().any(|s| targets.contains(s));
            if is_target {
                r.with_bounds(1, 1)
            } else {
                r.with_bounds(0, 5)
            }
        })
        .collect();
    let net = ReactionNetwork::new(with_dummies.species().to_vec(), reactions).map_err(|e| e.to_string())?;
    let prob = SynthesisProblem::with_targets(net, targets).map_err(|e| e.to_string())?;
    if !check_allupper_infeasible(&prob) {
        return Err("all-upper-bounds pathway is feasible".into());
    }
    match find_feasible(prob.network(), profile.feasibility_nodes) {
        Ok(Some(_)) => Ok((prob, avail.purchasable)),
        Ok(None) => Err("infeasible".into()),
        Err(()) => Err("feasibility undetermined within the node budget".into()),
    }
}

/// Draw problems from `seed` until one passes every check.
pub fn generate_benchmark(seed: u64, profile: &SizeProfile) -> Result<GeneratedProblem> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for attempts in 1..=profile.max_attempts {
        match attempt(&mut rng, profile) {
            Ok((problem, purchasable)) => {
                return Ok(GeneratedProblem { problem, seed, profile: profile.clone(), attempts, purchasable })
            }
            Err(reason) => last = reason,
        }
    }
    Err(Error::GenerationFailed { attempts: profile.max_attempts, reason: last })
}
