use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{ReactionKind, ReactionNetwork};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesCategory {
    Target,
    Substrate,
    Intermediate,
    SubstrateIntermediate,
    Byproduct,
}

impl SpeciesCategory {
    pub const ALL: [SpeciesCategory; 5] = [
        SpeciesCategory::Target,
        SpeciesCategory::Substrate,
        SpeciesCategory::Intermediate,
        SpeciesCategory::SubstrateIntermediate,
        SpeciesCategory::Byproduct,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SpeciesCategory::Target => "targets",
            SpeciesCategory::Substrate => "substrates",
            SpeciesCategory::Intermediate => "intermediates",
            SpeciesCategory::SubstrateIntermediate => "substrates_intermediates",
            SpeciesCategory::Byproduct => "byproducts",
        }
    }
}

fn target_indices(net: &ReactionNetwork, targets: &BTreeSet<String>) -> Result<Vec<usize>> {
    targets
        .iter()
        .map(|t| net.species_index(t).ok_or_else(|| Error::UnknownSpecies(t.clone())))
        .collect()
}

/// Minimum number of synthesis steps from each species to any target, in
/// species order. `None` marks byproducts.
pub(crate) fn depths_dense(net: &ReactionNetwork, targets: &[usize]) -> Vec<Option<u32>> {
    let mut depth = vec![None; net.species().len()];
    let mut queue = VecDeque::new();
    for &t in targets {
        if depth[t].is_none() {
            depth[t] = Some(0);
            queue.push_back(t);
        }
    }
    while let Some(s) = queue.pop_front() {
        let d = depth[s].unwrap();
        for &j in net.incident(s) {
            if net.reactions()[j].kind != ReactionKind::Chemical || net.coefficient(s, j) <= 0 {
                continue;
            }
            for &(reactant, c) in net.column(j) {
                if c < 0 && depth[reactant].is_none() {
                    depth[reactant] = Some(d + 1);
                    queue.push_back(reactant);
                }
            }
        }
    }
    depth
}

pub fn species_depths(net: &ReactionNetwork, targets: &BTreeSet<String>) -> Result<BTreeMap<String, Option<u32>>> {
    let t = target_indices(net, targets)?;
    let depth = depths_dense(net, &t);
    Ok(net.species().iter().zip(depth).map(|(s, d)| (s.id.clone(), d)).collect())
}

pub(crate) fn categories_dense(net: &ReactionNetwork, targets: &[usize]) -> Vec<SpeciesCategory> {
    let depth = depths_dense(net, targets);
    (0..net.species().len())
        .map(|i| {
            if targets.contains(&i) {
                return SpeciesCategory::Target;
            }
            if depth[i].is_none() {
                return SpeciesCategory::Byproduct;
            }
            let mut has_inflow = false;
            let mut produced = false;
            for &j in net.incident(i) {
                match net.reactions()[j].kind {
                    ReactionKind::Inflow => has_inflow = true,
                    ReactionKind::Chemical if net.coefficient(i, j) > 0 => produced = true,
                    _ => {}
                }
            }
            match (has_inflow, produced) {
                (true, true) => SpeciesCategory::SubstrateIntermediate,
                (false, true) => SpeciesCategory::Intermediate,
                // Precursors that are neither bought nor synthesized are
                // starting materials too; they land with the substrates.
                _ => SpeciesCategory::Substrate,
            }
        })
        .collect()
}

pub fn classify_species(
    net: &ReactionNetwork,
    targets: &BTreeSet<String>,
) -> Result<BTreeMap<String, SpeciesCategory>> {
    let t = target_indices(net, targets)?;
    let cats = categories_dense(net, &t);
    Ok(net.species().iter().zip(cats).map(|(s, c)| (s.id.clone(), c)).collect())
}

/// Number of reactions (dummies included) with a nonzero coefficient for `s`.
pub fn species_degree(net: &ReactionNetwork, s: &str) -> Result<usize> {
    let i = net.species_index(s).ok_or_else(|| Error::UnknownSpecies(s.to_string()))?;
    Ok(net.incident(i).len())
}
