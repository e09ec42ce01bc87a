//! JSON amalgam spec files.
//!
//! ```json
//! {
//!   "name": "PSL2(Z)",
//!   "g1": { "table": [[0, 1], [1, 0]] },
//!   "g2": { "permutation_generators": [[1, 2, 0]] },
//!   "h":  { "table": [[0]] },
//!   "embed1": [0],
//!   "embed2": [0]
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{AmalgamError, AmalgamSpec, Side};
use crate::groups::{FiniteGroup, GroupError, Monomorphism};

#[derive(Debug, Error)]
pub enum SpecFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation_generators: Option<Vec<Vec<usize>>>,
}

impl GroupBlock {
    fn build(&self, field: &'static str, cap: usize) -> Result<FiniteGroup, SpecFileError> {
        let located = |e: GroupError| SpecFileError::Field {
            field,
            message: e.to_string(),
        };
        match (&self.table, &self.permutation_generators) {
            (Some(t), None) => FiniteGroup::from_table_capped(t, cap).map_err(located),
            (None, Some(g)) => FiniteGroup::from_permutations_capped(g, cap).map_err(located),
            _ => Err(SpecFileError::Field {
                field,
                message: "give exactly one of `table` or `permutation_generators`".into(),
            }),
        }
    }

    fn from_group(g: &FiniteGroup) -> Self {
        Self {
            table: Some(g.rows()),
            permutation_generators: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub name: String,
    pub g1: GroupBlock,
    pub g2: GroupBlock,
    pub h: GroupBlock,
    pub embed1: Vec<usize>,
    pub embed2: Vec<usize>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, SpecFileError> {
        serde_json::from_str(text).map_err(|e| SpecFileError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &std::path::Path) -> Result<Self, SpecFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| SpecFileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn build(&self, order_cap: usize) -> Result<AmalgamSpec, SpecFileError> {
        let g1 = self.g1.build("g1", order_cap)?;
        let g2 = self.g2.build("g2", order_cap)?;
        let h = self.h.build("h", order_cap)?;
        for (field, g, map) in [("embed1", &g1, &self.embed1), ("embed2", &g2, &self.embed2)] {
            Monomorphism::new(&h, g, map).map_err(|e| SpecFileError::Field {
                field,
                message: e.to_string(),
            })?;
        }
        AmalgamSpec::new(self.name.clone(), g1, g2, h, &self.embed1, &self.embed2).map_err(|e| {
            let field = match e {
                AmalgamError::DegenerateAmalgam { side: 1 } => "embed1",
                AmalgamError::DegenerateAmalgam { .. } => "embed2",
                _ => "name",
            };
            SpecFileError::Field {
                field,
                message: e.to_string(),
            }
        })
    }

    /// Table form of a built spec; parses back to an equal spec.
    pub fn from_spec(spec: &AmalgamSpec) -> Self {
        Self {
            name: spec.name.clone(),
            g1: GroupBlock::from_group(spec.group(Side::One)),
            g2: GroupBlock::from_group(spec.group(Side::Two)),
            h: GroupBlock::from_group(&spec.h),
            embed1: spec.factor(Side::One).embedding.as_slice().to_vec(),
            embed2: spec.factor(Side::Two).embedding.as_slice().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("spec files serialize");
        out.push('\n');
        out
    }
}
