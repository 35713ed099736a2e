//! The instance file format shared by the command-line tools.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::QVector;
use crate::pivot::{Convention, ShadowSpec};
use crate::polytope::{vertex_from_basis, HPolytope, VertexBasis};

/// Where an instance came from and every transform applied since.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub chain: Vec<String>,
}

/// A polytope with its objective, optional shadow direction and start
/// vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceBundle {
    pub polytope: HPolytope,
    pub c: QVector,
    #[serde(default)]
    pub w: Option<QVector>,
    #[serde(default)]
    pub w_convention: Convention,
    pub start: Vec<usize>,
    #[serde(default)]
    pub target: Option<Vec<usize>>,
    pub metadata: Metadata,
}

impl InstanceBundle {
    pub fn new(polytope: HPolytope, c: QVector, start: Vec<usize>, generator: &str) -> Self {
        InstanceBundle {
            polytope,
            c,
            w: None,
            w_convention: Convention::Projection,
            start,
            target: None,
            metadata: Metadata {
                generator: generator.into(),
                ..Metadata::default()
            },
        }
    }

    pub fn with_shadow(mut self, spec: &ShadowSpec) -> Self {
        self.w = Some(spec.w.clone());
        self.w_convention = spec.convention;
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.params.insert(key.into(), value.to_string());
        self
    }

    /// Resolves `start` to a vertex.
    pub fn start_vertex(&self) -> Result<VertexBasis> {
        vertex_from_basis(&self.polytope, &self.start)
    }

    pub fn target_vertex(&self) -> Result<Option<VertexBasis>> {
        self.target
            .as_ref()
            .map(|t| vertex_from_basis(&self.polytope, t))
            .transpose()
    }

    /// The shadow pair, if the bundle carries `w`.
    pub fn shadow_spec(&self) -> Result<Option<ShadowSpec>> {
        self.w
            .as_ref()
            .map(|w| ShadowSpec::new(w.clone(), self.c.clone(), self.w_convention))
            .transpose()
    }

    /// Checks dimensions and that `start` (and `target`) are vertices.
    pub fn validate(&self) -> Result<()> {
        let n = self.polytope.dim();
        if self.c.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.c.dim(),
            });
        }
        if let Some(w) = &self.w {
            if w.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: w.dim(),
                });
            }
        }
        self.start_vertex()?;
        self.target_vertex()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let b: InstanceBundle =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        b.validate()?;
        Ok(b)
    }
}
