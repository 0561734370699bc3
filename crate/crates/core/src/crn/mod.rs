//! Chemical reaction networks, pathways and mass balance.
//!
//! A [`ReactionNetwork`] is a bipartite graph of species and reactions. Edges
//! carry signed stoichiometric coefficients: positive when the reaction
//! produces (or supplies) the species, negative when it consumes (or exports)
//! it. A [`Pathway`] assigns a multiplicity to each reaction.

mod io;
mod relevant;
pub(crate) mod species;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use io::{NetworkFile, PathwayFile, ReactionRecord, SpeciesRecord};
pub use relevant::{attach_dummy_reactions, extract_relevant_subnetwork, is_connected, DummyOptions};
pub use species::{classify_species, species_degree, species_depths, SpeciesCategory};

/// Largest accepted stoichiometric coefficient magnitude.
pub const MAX_COEFFICIENT: i64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReactionKind {
    Chemical,
    Inflow,
    Outflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeciesRole {
    Target,
    Precursor,
    Byproduct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub id: String,
    pub name: String,
    pub role: Option<SpeciesRole>,
}

impl Species {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Species { name: id.clone(), id, role: None }
    }

    pub fn named(id: impl Into<String>, name: impl Into<String>) -> Self {
        Species { id: id.into(), name: name.into(), role: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reaction {
    pub id: String,
    pub kind: ReactionKind,
    /// Nonzero signed coefficients keyed by species id.
    pub stoichiometry: BTreeMap<String, i64>,
    pub lower_bound: u64,
    pub upper_bound: u64,
    pub unit_cost: Rational,
    pub fixed_cost: Rational,
}

impl Reaction {
    pub fn new(id: impl Into<String>, kind: ReactionKind, stoichiometry: &[(&str, i64)]) -> Self {
        Reaction {
            id: id.into(),
            kind,
            stoichiometry: stoichiometry.iter().map(|(s, v)| (s.to_string(), *v)).collect(),
            lower_bound: 0,
            upper_bound: 5,
            unit_cost: Rational::from_integer(0),
            fixed_cost: Rational::from_integer(0),
        }
    }

    pub fn chemical(id: impl Into<String>, stoichiometry: &[(&str, i64)]) -> Self {
        Reaction::new(id, ReactionKind::Chemical, stoichiometry)
    }

    pub fn inflow(id: impl Into<String>, species: &str) -> Self {
        Reaction::new(id, ReactionKind::Inflow, &[(species, 1)])
    }

    pub fn outflow(id: impl Into<String>, species: &str) -> Self {
        Reaction::new(id, ReactionKind::Outflow, &[(species, -1)])
    }

    pub fn with_bounds(mut self, lower: u64, upper: u64) -> Self {
        self.lower_bound = lower;
        self.upper_bound = upper;
        self
    }

    pub fn with_costs(mut self, unit: Rational, fixed: Rational) -> Self {
        self.unit_cost = unit;
        self.fixed_cost = fixed;
        self
    }

    pub fn is_dummy(&self) -> bool {
        self.kind != ReactionKind::Chemical
    }

    /// Width of the multiplicity domain, `u - l`.
    pub fn span(&self) -> u64 {
        self.upper_bound - self.lower_bound
    }

    fn validate(&self) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidReaction { id: self.id.clone(), reason: reason.to_string() };
        if self.lower_bound > self.upper_bound {
            return Err(Error::InvalidBounds { lower: self.lower_bound, upper: self.upper_bound });
        }
        if self.unit_cost < Rational::from_integer(0) || self.fixed_cost < Rational::from_integer(0) {
            return Err(invalid("costs must be non-negative"));
        }
        for (species, &coefficient) in &self.stoichiometry {
            if coefficient == 0 {
                return Err(invalid("zero stoichiometric entry"));
            }
            if coefficient.abs() > MAX_COEFFICIENT {
                return Err(Error::CoefficientTooLarge {
                    reaction: self.id.clone(),
                    species: species.clone(),
                    coefficient,
                    max: MAX_COEFFICIENT,
                });
            }
        }
        let positives = self.stoichiometry.values().filter(|&&v| v > 0).count();
        let negatives = self.stoichiometry.values().filter(|&&v| v < 0).count();
        match self.kind {
            ReactionKind::Inflow if self.stoichiometry.len() != 1 || positives != 1 => {
                Err(invalid("inflow must have exactly one positive entry"))
            }
            ReactionKind::Outflow if self.stoichiometry.len() != 1 || negatives != 1 => {
                Err(invalid("outflow must have exactly one negative entry"))
            }
            ReactionKind::Chemical if positives == 0 || negatives == 0 => {
                Err(invalid("chemical reaction needs at least one reactant and one product"))
            }
            _ => Ok(()),
        }
    }
}

/// Multiplicities keyed by reaction id. Reactions without an entry have
/// multiplicity zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pathway {
    pub multiplicities: BTreeMap<String, u64>,
}

impl Pathway {
    pub fn new() -> Self {
        Pathway::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        Pathway { multiplicities: pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
    }

    pub fn get(&self, reaction: &str) -> u64 {
        self.multiplicities.get(reaction).copied().unwrap_or(0)
    }

    pub fn set(&mut self, reaction: impl Into<String>, value: u64) {
        self.multiplicities.insert(reaction.into(), value);
    }
}

/// Immutable, validated reaction network.
#[derive(Debug, Clone)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    reactions: Vec<Reaction>,
    species_index: HashMap<String, usize>,
    reaction_index: HashMap<String, usize>,
    /// Per reaction: (species index, coefficient), sorted by species index.
    columns: Vec<Vec<(usize, i64)>>,
    /// Per species: incident reaction indices in reaction order.
    adjacency: Vec<Vec<usize>>,
}

impl PartialEq for ReactionNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.species == other.species && self.reactions == other.reactions
    }
}

impl ReactionNetwork {
    pub fn new(species: Vec<Species>, reactions: Vec<Reaction>) -> Result<Self> {
        let mut species_index = HashMap::with_capacity(species.len());
        for (i, s) in species.iter().enumerate() {
            if species_index.insert(s.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(s.id.clone()));
            }
        }
        let mut reaction_index = HashMap::with_capacity(reactions.len());
        let mut columns = Vec::with_capacity(reactions.len());
        let mut adjacency = vec![Vec::new(); species.len()];
        for (j, r) in reactions.iter().enumerate() {
            if reaction_index.insert(r.id.clone(), j).is_some() || species_index.contains_key(&r.id) {
                return Err(Error::DuplicateId(r.id.clone()));
            }
            r.validate()?;
            let mut column = Vec::with_capacity(r.stoichiometry.len());
            for (sid, &coefficient) in &r.stoichiometry {
                let &i = species_index.get(sid).ok_or_else(|| Error::UnknownSpecies(sid.clone()))?;
                column.push((i, coefficient));
                adjacency[i].push(j);
            }
            column.sort_unstable();
            columns.push(column);
        }
        Ok(ReactionNetwork { species, reactions, species_index, reaction_index, columns, adjacency })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn species_index(&self, id: &str) -> Option<usize> {
        self.species_index.get(id).copied()
    }

    pub fn reaction_index(&self, id: &str) -> Option<usize> {
        self.reaction_index.get(id).copied()
    }

    pub fn species_by_id(&self, id: &str) -> Result<&Species> {
        self.species_index(id).map(|i| &self.species[i]).ok_or_else(|| Error::UnknownSpecies(id.to_string()))
    }

    pub fn reaction_by_id(&self, id: &str) -> Result<&Reaction> {
        self.reaction_index(id).map(|j| &self.reactions[j]).ok_or_else(|| Error::UnknownReaction(id.to_string()))
    }

    /// Signed coefficients of reaction `j` as (species index, coefficient).
    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    /// Reaction indices incident to species `i`.
    pub fn incident(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn coefficient(&self, species: usize, reaction: usize) -> i64 {
        self.columns[reaction]
            .binary_search_by_key(&species, |&(s, _)| s)
            .map(|k| self.columns[reaction][k].1)
            .unwrap_or(0)
    }

    /// Dummy reactions of `kind` attached to species `i`, sorted by reaction id.
    pub fn dummies_of(&self, i: usize, kind: ReactionKind) -> Vec<usize> {
        let mut found: Vec<usize> =
            self.adjacency[i].iter().copied().filter(|&j| self.reactions[j].kind == kind).collect();
        found.sort_by(|&a, &b| self.reactions[a].id.cmp(&self.reactions[b].id));
        found
    }

    /// Copy of this network with species roles assigned.
    pub fn with_roles(&self, roles: &BTreeMap<String, SpeciesRole>) -> Self {
        let mut out = self.clone();
        for s in &mut out.species {
            s.role = roles.get(&s.id).copied();
        }
        out
    }

    /// Dense multiplicity vector in reaction order.
    pub fn dense(&self, p: &Pathway) -> Result<Vec<u64>> {
        let mut m = vec![0; self.reactions.len()];
        for (id, &value) in &p.multiplicities {
            let j = self.reaction_index(id).ok_or_else(|| Error::UnknownReaction(id.clone()))?;
            m[j] = value;
        }
        Ok(m)
    }

    pub fn pathway_from_dense(&self, m: &[u64]) -> Pathway {
        Pathway {
            multiplicities: self.reactions.iter().zip(m).map(|(r, &v)| (r.id.clone(), v)).collect(),
        }
    }

    /// Residuals `sum_r nu_sr m_r` in species order.
    pub fn residuals_dense(&self, m: &[u64]) -> Vec<i64> {
        let mut res = vec![0i64; self.species.len()];
        for (j, &mult) in m.iter().enumerate() {
            if mult == 0 {
                continue;
            }
            for &(i, c) in &self.columns[j] {
                res[i] += c * mult as i64;
            }
        }
        res
    }

    pub fn within_bounds_dense(&self, m: &[u64]) -> bool {
        self.reactions.iter().zip(m).all(|(r, &v)| r.lower_bound <= v && v <= r.upper_bound)
    }

    pub fn is_feasible_dense(&self, m: &[u64]) -> bool {
        self.within_bounds_dense(m) && self.residuals_dense(m).iter().all(|&v| v == 0)
    }
}

/// Mass balance residual of every species, keyed by species id.
pub fn mass_balance_residuals(net: &ReactionNetwork, p: &Pathway) -> Result<BTreeMap<String, i64>> {
    let m = net.dense(p)?;
    let res = net.residuals_dense(&m);
    Ok(net.species.iter().zip(res).map(|(s, v)| (s.id.clone(), v)).collect())
}

/// All residuals zero and every multiplicity inside `[l_r, u_r]`.
pub fn is_feasible(net: &ReactionNetwork, p: &Pathway) -> Result<bool> {
    let m = net.dense(p)?;
    Ok(net.is_feasible_dense(&m))
}
