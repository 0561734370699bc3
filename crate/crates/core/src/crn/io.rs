//! JSON network file format.
//!
//! ```json
//! {
//!   "species":   [{"id": "NaCl", "name": "sodium chloride"}, ...],
//!   "reactions": [{"id": "r1", "kind": "chemical",
//!                  "stoichiometry": {"NaCl": -1, "NaHCO3": 1},
//!                  "lower_bound": 0, "upper_bound": 5,
//!                  "unit_cost": "1", "fixed_cost": "0"}, ...],
//!   "targets":   ["Na2CO3"],
//!   "pathway":   {"r1": 2, ...},        // optional
//!   "provenance": {...}                 // optional, free-form
//! }
//! ```
//!
//! Costs are decimal strings. Object keys are written in sorted order so that
//! serialization is deterministic.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Pathway, Reaction, ReactionKind, ReactionNetwork, Species};
use crate::error::Result;
use crate::rational::{serde_decimal, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesRecord {
    pub id: String,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactionRecord {
    pub id: String,
    pub kind: ReactionKind,
    pub stoichiometry: BTreeMap<String, i64>,
    pub lower_bound: u64,
    pub upper_bound: u64,
    #[serde(with = "serde_decimal")]
    pub unit_cost: Rational,
    #[serde(with = "serde_decimal")]
    pub fixed_cost: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub species: Vec<SpeciesRecord>,
    pub reactions: Vec<ReactionRecord>,
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathway: Option<Pathway>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

/// A standalone pathway file: `{"multiplicities": {"r1": 2, ...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwayFile {
    pub multiplicities: Pathway,
}

impl NetworkFile {
    pub fn from_network(net: &ReactionNetwork, targets: &BTreeSet<String>) -> Self {
        NetworkFile {
            species: net
                .species()
                .iter()
                .map(|s| SpeciesRecord { id: s.id.clone(), name: (s.name != s.id).then(|| s.name.clone()) })
                .collect(),
            reactions: net
                .reactions()
                .iter()
                .map(|r| ReactionRecord {
                    id: r.id.clone(),
                    kind: r.kind,
                    stoichiometry: r.stoichiometry.clone(),
                    lower_bound: r.lower_bound,
                    upper_bound: r.upper_bound,
                    unit_cost: r.unit_cost,
                    fixed_cost: r.fixed_cost,
                })
                .collect(),
            targets: targets.iter().cloned().collect(),
            pathway: None,
            provenance: None,
        }
    }

    pub fn to_network(&self) -> Result<ReactionNetwork> {
        let species = self
            .species
            .iter()
            .map(|s| Species::named(s.id.clone(), s.name.clone().unwrap_or_else(|| s.id.clone())))
            .collect();
        let reactions = self
            .reactions
            .iter()
            .map(|r| Reaction {
                id: r.id.clone(),
                kind: r.kind,
                stoichiometry: r.stoichiometry.clone(),
                lower_bound: r.lower_bound,
                upper_bound: r.upper_bound,
                unit_cost: r.unit_cost,
                fixed_cost: r.fixed_cost,
            })
            .collect();
        ReactionNetwork::new(species, reactions)
    }

    pub fn target_set(&self) -> BTreeSet<String> {
        self.targets.iter().cloned().collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
