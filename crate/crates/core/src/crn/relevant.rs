use std::collections::BTreeSet;

use super::species::depths_dense;
use super::{Reaction, ReactionKind, ReactionNetwork};
use crate::error::{Error, Result};

/// Collect the reactions relevant to synthesizing `targets` and the species
/// participating in them.
///
/// A reaction is relevant if it produces a target, or produces a reactant of
/// another relevant reaction, discovered breadth-first up to `d_max` steps
/// away from the targets. With `hub_threshold`, species whose in- or
/// out-degree in `database` reaches the threshold are treated as virtually
/// purchasable: they join the network but the search does not recurse past
/// them. Dummy reactions of `database` are ignored.
pub fn extract_relevant_subnetwork(
    database: &ReactionNetwork,
    targets: &BTreeSet<String>,
    d_max: usize,
    hub_threshold: Option<usize>,
) -> Result<ReactionNetwork> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("at least one target is required".into()));
    }
    if d_max == 0 {
        return Err(Error::InvalidArgument("d_max must be at least 1".into()));
    }
    let ns = database.species().len();
    let nr = database.reactions().len();
    let target_idx: Vec<usize> = targets
        .iter()
        .map(|t| database.species_index(t).ok_or_else(|| Error::UnknownSpecies(t.clone())))
        .collect::<Result<_>>()?;

    let is_hub = |i: usize| -> bool {
        let Some(threshold) = hub_threshold else { return false };
        let mut indeg = 0;
        let mut outdeg = 0;
        for &j in database.incident(i) {
            if database.reactions()[j].kind != ReactionKind::Chemical {
                continue;
            }
            if database.coefficient(i, j) > 0 {
                indeg += 1;
            } else {
                outdeg += 1;
            }
        }
        indeg >= threshold || outdeg >= threshold
    };

    let mut seen = vec![false; ns];
    let mut relevant = vec![false; nr];
    let mut frontier = Vec::new();
    for &t in &target_idx {
        if !seen[t] {
            seen[t] = true;
            frontier.push(t);
        }
    }
    for _depth in 1..=d_max {
        let mut next = Vec::new();
        for &s in &frontier {
            if !target_idx.contains(&s) && is_hub(s) {
                continue;
            }
            for &j in database.incident(s) {
                if relevant[j]
                    || database.reactions()[j].kind != ReactionKind::Chemical
                    || database.coefficient(s, j) <= 0
                {
                    continue;
                }
                relevant[j] = true;
                for &(r, c) in database.column(j) {
                    if c < 0 && !seen[r] {
                        seen[r] = true;
                        next.push(r);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }

    let mut keep_species = vec![false; ns];
    for &t in &target_idx {
        keep_species[t] = true;
    }
    for j in (0..nr).filter(|&j| relevant[j]) {
        for &(i, _) in database.column(j) {
            keep_species[i] = true;
        }
    }
    let species = database
        .species()
        .iter()
        .zip(&keep_species)
        .filter(|(_, &keep)| keep)
        .map(|(s, _)| s.clone())
        .collect();
    let reactions = database
        .reactions()
        .iter()
        .zip(&relevant)
        .filter(|(_, &keep)| keep)
        .map(|(r, _)| r.clone())
        .collect();
    ReactionNetwork::new(species, reactions)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DummyOptions {
    /// Attach disposal outflows to every produced non-target species.
    pub disposal: bool,
    pub target_bounds: (u64, u64),
    pub default_bounds: (u64, u64),
}

impl Default for DummyOptions {
    fn default() -> Self {
        DummyOptions { disposal: true, target_bounds: (1, 1), default_bounds: (0, 5) }
    }
}

/// Add inflow (purchase) and outflow (shipping/disposal) dummy reactions.
///
/// Inflows go to purchasable species that are not byproducts; targets get an
/// outflow with a positive lower bound; with `options.disposal`, every other
/// species produced by some chemical reaction gets a disposal outflow.
/// Existing dummies are kept and never duplicated. Purchasable ids not in
/// `net` are ignored.
pub fn attach_dummy_reactions(
    net: &ReactionNetwork,
    purchasable: &BTreeSet<String>,
    targets: &BTreeSet<String>,
    options: DummyOptions,
) -> Result<ReactionNetwork> {
    if let Some(t) = targets.iter().find(|t| purchasable.contains(*t)) {
        return Err(Error::PurchasableTarget(t.clone()));
    }
    if options.target_bounds.0 == 0 {
        return Err(Error::InvalidArgument("target outflow lower bound must be positive".into()));
    }
    let target_idx: Vec<usize> = targets
        .iter()
        .map(|t| net.species_index(t).ok_or_else(|| Error::UnknownSpecies(t.clone())))
        .collect::<Result<_>>()?;
    let depth = depths_dense(net, &target_idx);

    let mut reactions: Vec<Reaction> = net.reactions().to_vec();
    for (i, s) in net.species().iter().enumerate() {
        let has = |kind| !net.dummies_of(i, kind).is_empty();
        let produced = net
            .incident(i)
            .iter()
            .any(|&j| net.reactions()[j].kind == ReactionKind::Chemical && net.coefficient(i, j) > 0);
        let (lo, hi) = options.default_bounds;
        if purchasable.contains(&s.id) && depth[i].is_some() && !has(ReactionKind::Inflow) {
            reactions.push(Reaction::inflow(format!("in_{}", s.id), &s.id).with_bounds(lo, hi));
        }
        if has(ReactionKind::Outflow) {
            continue;
        }
        if target_idx.contains(&i) {
            let (tl, tu) = options.target_bounds;
            reactions.push(Reaction::outflow(format!("out_{}", s.id), &s.id).with_bounds(tl, tu));
        } else if options.disposal && produced {
            reactions.push(Reaction::outflow(format!("out_{}", s.id), &s.id).with_bounds(lo, hi));
        }
    }
    ReactionNetwork::new(net.species().to_vec(), reactions)
}

/// Whether species and chemical reactions form a single connected component.
pub fn is_connected(net: &ReactionNetwork) -> bool {
    let ns = net.species().len();
    if ns == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..ns).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (j, r) in net.reactions().iter().enumerate() {
        if r.kind != ReactionKind::Chemical {
            continue;
        }
        let col = net.column(j);
        for w in col.windows(2) {
            let a = find(&mut parent, w[0].0);
            let b = find(&mut parent, w[1].0);
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    (1..ns).all(|i| find(&mut parent, i) == root)
}
