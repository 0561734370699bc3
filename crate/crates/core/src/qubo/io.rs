//! JSON form of a QUBO:
//!
//! ```json
//! {"num_bits": 3, "offset": "0", "terms": [[0, 0, "10"], [0, 2, "-10"]],
//!  "decode_map": [{"start": 0, "variable": {...}, "aux_bit": 2, "fixed_cost": "10"}]}
//! ```
//!
//! Terms are listed in ascending `(i, j)` order with `i <= j`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{QuboModel, VariableBlock};
use crate::encoding::EncodingScheme;
use crate::error::{Error, Result};
use crate::rational::{format_decimal, parse_decimal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboFile {
    pub num_bits: usize,
    pub offset: String,
    pub terms: Vec<(usize, usize, String)>,
    pub decode_map: Vec<VariableBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<EncodingScheme>,
}

impl QuboFile {
    pub fn from_model(m: &QuboModel) -> Self {
        QuboFile {
            num_bits: m.num_bits(),
            offset: format_decimal(&m.offset()),
            terms: m.terms().iter().map(|(&(i, j), c)| (i, j, format_decimal(c))).collect(),
            decode_map: m.blocks().to_vec(),
            encoding: m.blocks().first().map(|b| b.variable.kind),
        }
    }

    pub fn to_model(&self) -> Result<QuboModel> {
        let mut terms = BTreeMap::new();
        for (i, j, c) in &self.terms {
            if terms.insert((*i, *j), parse_decimal(c)?).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate term ({i}, {j})")));
            }
        }
        QuboModel::from_parts(self.num_bits, terms, parse_decimal(&self.offset)?, self.decode_map.clone())
    }
}

impl QuboModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&QuboFile::from_model(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<QuboFile>(text)?.to_model()
    }
}
