//! Exact-arithmetic tools for simplex pivot paths on simple polytopes:
//! generators of polytopes with long shadow paths, the transforms that
//! lengthen them, a simplex engine with shadow and steepest-edge rules, and
//! verifiers that check the resulting path lengths exactly.

pub mod analysis;
pub mod bundle;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod pivot;
pub mod polytope;

pub use bundle::{InstanceBundle, Metadata};
pub use error::{Error, Result};
pub use exact::{QMatrix, QVector, Scalar};
pub use pivot::{
    Convention, NormSpec, PathRecord, PivotRule, PivotRuleSpec, ShadowSpec, TiePolicy,
};
pub use polytope::{HPolytope, NormalFan, SimplicialCone, VertexBasis};
