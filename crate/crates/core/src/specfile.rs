//! JSON spec files.
//!
//! ```json
//! {"d":3,
//!  "lambda":[{"colors":[1,2,3],"count":2},{"colors":[1,3],"count":1}],
//!  "gamma":[{"colors":[1,2,3],"count":2},{"colors":[1],"count":1},{"colors":[3],"count":1}]}
//! ```
//!
//! Colors are 1-based. Entries with count 0 are accepted and ignored; listing
//! the same color type twice on one side is an error.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::colored::{Color, ColorType, ColoredVertexSet, ContractionSpec};
use crate::error::{Error, Result, Side};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeCount {
    pub colors: Vec<Color>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub d: u32,
    pub lambda: Vec<TypeCount>,
    pub gamma: Vec<TypeCount>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SpecFormat(e.to_string()))
    }

    /// Canonical form: used types only, in canonical type order, colors sorted.
    pub fn from_spec(spec: &ContractionSpec) -> Self {
        let side = |set: &ColoredVertexSet| {
            set.types()
                .map(|(ty, count)| TypeCount {
                    colors: ty.to_vec(),
                    count,
                })
                .collect()
        };
        Self {
            d: spec.d(),
            lambda: side(spec.lambda()),
            gamma: side(spec.gamma()),
        }
    }

    pub fn to_spec(&self) -> Result<ContractionSpec> {
        if self.d == 0 || self.d > crate::colored::MAX_COLORS {
            return Err(Error::SpecFormat(format!(
                "d = {} is outside 1..={}",
                self.d,
                crate::colored::MAX_COLORS
            )));
        }
        let lambda = build_side(self.d, &self.lambda, Side::White)?;
        let gamma = build_side(self.d, &self.gamma, Side::Black)?;
        ContractionSpec::new(lambda, gamma)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

fn build_side(d: u32, entries: &[TypeCount], side: Side) -> Result<ColoredVertexSet> {
    let mut set = ColoredVertexSet::new(d);
    let mut seen = std::collections::BTreeSet::new();
    for entry in entries {
        let ty = ColorType::new(&entry.colors)?;
        if !seen.insert(ty) {
            return Err(Error::DuplicateType {
                side,
                ty: ty.to_string(),
            });
        }
        set.set(ty, entry.count)?;
    }
    Ok(set)
}

/// Parses and validates a spec file.
pub fn parse_spec(text: &str) -> Result<ContractionSpec> {
    SpecFile::parse(text)?.to_spec()
}

/// Compact canonical JSON; equal specs give equal strings.
pub fn canonical_json(spec: &ContractionSpec) -> String {
    serde_json::to_string(&SpecFile::from_spec(spec)).expect("plain data serializes")
}

/// SHA-256 of [`canonical_json`], hex encoded.
pub fn spec_digest(spec: &ContractionSpec) -> String {
    hex::encode(Sha256::digest(canonical_json(spec).as_bytes()))
}
