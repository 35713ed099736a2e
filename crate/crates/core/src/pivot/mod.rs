//! The simplex walk and its pivot rules.
//!
//! Rules are stated geometrically on `Ax ≤ b`: at vertex `v` the edge that
//! drops tight facet `j` has direction `d_j` with `a_j·d_j = -1`, and full
//! step `s = u - v`.

mod norm;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub(crate) use norm::random_small_rational;
pub use norm::{Interval, NormKind, NormSpec, NormValue, Normalization, MAX_BITS, START_BITS};

use crate::error::{Error, Result};
use crate::exact::{format_scalar, rank, QMatrix, QVector, Scalar};
use crate::polytope::{
    basis_inverse, describe, neighbor_inverse, neighbors, neighbors_with_inverse, HPolytope,
    Neighbor, VertexBasis,
};

/// Which way round `w` is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Start at the unique `w`-minimizer; edge slope is `(c·s)/(w·s)`.
    #[default]
    Projection,
    /// Start at the unique `w`-maximizer; the path maximizes
    /// `λw + (1-λ)c` as λ goes from 1 to 0.
    Parametric,
}

/// An auxiliary objective `w` paired with the objective `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowSpec {
    pub w: QVector,
    pub c: QVector,
    pub convention: Convention,
}

impl ShadowSpec {
    /// Checks dimensions and that `w` and `c` are linearly independent.
    pub fn new(w: QVector, c: QVector, convention: Convention) -> Result<Self> {
        if w.dim() != c.dim() {
            return Err(Error::DimensionMismatch {
                expected: c.dim(),
                found: w.dim(),
            });
        }
        let m = QMatrix::from_rows(vec![w.clone(), c.clone()])?;
        if rank(&m) < 2 {
            return Err(Error::NonGeneric("w and c are linearly dependent".into()));
        }
        Ok(ShadowSpec { w, c, convention })
    }

    pub fn projection(w: QVector, c: QVector) -> Result<Self> {
        Self::new(w, c, Convention::Projection)
    }

    pub fn parametric(w: QVector, c: QVector) -> Result<Self> {
        Self::new(w, c, Convention::Parametric)
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    /// `w` as read in the projection convention.
    pub fn projection_w(&self) -> QVector {
        match self.convention {
            Convention::Projection => self.w.clone(),
            Convention::Parametric => self.w.neg(),
        }
    }

    /// `w` as read in the parametric convention.
    pub fn parametric_w(&self) -> QVector {
        match self.convention {
            Convention::Projection => self.w.neg(),
            Convention::Parametric => self.w.clone(),
        }
    }

    pub fn to_projection(&self) -> ShadowSpec {
        ShadowSpec {
            w: self.projection_w(),
            c: self.c.clone(),
            convention: Convention::Projection,
        }
    }

    pub fn to_parametric(&self) -> ShadowSpec {
        ShadowSpec {
            w: self.parametric_w(),
            c: self.c.clone(),
            convention: Convention::Parametric,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PivotRule {
    Shadow(ShadowSpec),
    SteepestEdge(NormSpec),
    Dantzig,
    GreatestImprovement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TiePolicy {
    #[default]
    Error,
    /// Keep the candidate whose leaving facet has the smallest index.
    LowestIndex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PivotRuleSpec {
    pub rule: PivotRule,
    pub tie_policy: TiePolicy,
}

impl PivotRuleSpec {
    pub fn new(rule: PivotRule) -> Self {
        PivotRuleSpec {
            rule,
            tie_policy: TiePolicy::Error,
        }
    }

    pub fn shadow(spec: ShadowSpec) -> Self {
        Self::new(PivotRule::Shadow(spec))
    }

    pub fn steepest(norm: NormSpec) -> Self {
        Self::new(PivotRule::SteepestEdge(norm))
    }

    pub fn dantzig() -> Self {
        Self::new(PivotRule::Dantzig)
    }

    pub fn greatest() -> Self {
        Self::new(PivotRule::GreatestImprovement)
    }

    pub fn with_tie_policy(mut self, t: TiePolicy) -> Self {
        self.tie_policy = t;
        self
    }

    /// Parses `dantzig | greatest | shadow[:<w>] | steepest:<norm>`. An
    /// explicit shadow `w` is read in the projection convention; a bare
    /// `shadow` uses `default_shadow`.
    pub fn parse(s: &str, c: &QVector, default_shadow: Option<&ShadowSpec>) -> Result<Self> {
        let s = s.trim();
        let rule = match s.split_once(':') {
            None if s == "dantzig" => PivotRule::Dantzig,
            None if s == "greatest" => PivotRule::GreatestImprovement,
            None if s == "shadow" => match default_shadow {
                Some(spec) => PivotRule::Shadow(spec.clone()),
                None => return Err(Error::InvalidRule("shadow rule needs a w vector".into())),
            },
            Some(("shadow", w)) => {
                let w = QVector::parse_list(w).map_err(|e| Error::InvalidRule(e.to_string()))?;
                PivotRule::Shadow(ShadowSpec::projection(w, c.clone())?)
            }
            Some(("steepest", n)) => PivotRule::SteepestEdge(NormSpec::parse(n)?),
            _ => return Err(Error::InvalidRule(format!("unrecognized rule {s:?}"))),
        };
        Ok(Self::new(rule))
    }
}

impl fmt::Display for PivotRuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            PivotRule::Shadow(s) => {
                let parts: Vec<String> = s.projection_w().iter().map(format_scalar).collect();
                write!(f, "shadow:{}", parts.join(","))
            }
            PivotRule::SteepestEdge(n) => write!(f, "steepest:{n}"),
            PivotRule::Dantzig => write!(f, "dantzig"),
            PivotRule::GreatestImprovement => write!(f, "greatest"),
        }
    }
}

/// A monotone walk with its objective values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub vertices: Vec<VertexBasis>,
    #[serde(with = "scalar_list")]
    pub c_values: Vec<Scalar>,
    #[serde(with = "opt_scalar_list", default)]
    pub w_values: Option<Vec<Scalar>>,
    pub length: usize,
    pub rule: String,
}

impl PathRecord {
    pub fn tight_sequence(&self) -> Vec<Vec<usize>> {
        self.vertices.iter().map(|v| v.tight.clone()).collect()
    }

    pub fn last(&self) -> &VertexBasis {
        self.vertices.last().expect("path has at least one vertex")
    }
}

mod scalar_list {
    use super::Scalar;
    use crate::exact::{format_scalar, parse_scalar};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(format_scalar))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|x| parse_scalar(x).map_err(serde::de::Error::custom))
            .collect()
    }
}

mod opt_scalar_list {
    use super::Scalar;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &Option<Vec<Scalar>>, s: S) -> Result<S::Ok, S::Error> {
        match xs {
            Some(v) => super::scalar_list::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Scalar>>, D::Error> {
        let raw = Option::<Vec<String>>::deserialize(d)?;
        raw.map(|v| {
            v.iter()
                .map(|x| crate::exact::parse_scalar(x).map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}

/// Neighbors `u` of `v` with `c·(u - v) > 0`.
pub fn improving_neighbors(p: &HPolytope, c: &QVector, v: &VertexBasis) -> Result<Vec<Neighbor>> {
    Ok(neighbors(p, v)?
        .into_iter()
        .filter(|nb| c.dot(&nb.edge).is_positive())
        .collect())
}

/// Index of the maximum under a fallible comparison. Ties against the
/// running best raise `Tie` under the error policy, or keep the earlier
/// candidate otherwise.
fn argmax_by<T>(
    items: &[T],
    policy: TiePolicy,
    mut cmp: impl FnMut(&T, &T) -> Result<Ordering>,
    what: &str,
) -> Result<usize> {
    assert!(!items.is_empty(), "argmax over an empty candidate list");
    let mut best = 0;
    let mut tied_with: Option<usize> = None;
    for i in 1..items.len() {
        match cmp(&items[i], &items[best])? {
            Ordering::Greater => {
                best = i;
                tied_with = None;
            }
            Ordering::Equal => {
                tied_with.get_or_insert(i);
            }
            Ordering::Less => {}
        }
    }
    match (tied_with, policy) {
        (Some(j), TiePolicy::Error) => Err(Error::Tie(format!(
            "{what}: candidates {best} and {j} are equal"
        ))),
        _ => Ok(best),
    }
}

fn leaving_order(a: &Neighbor, b: &Neighbor) -> Ordering {
    a.leaving.cmp(&b.leaving)
}

/// Sign-aware comparison of slopes `cn/wd`, with `cn > 0`: positive
/// denominators beat zero ones, which beat negative ones.
pub(crate) fn compare_slopes(c1: &Scalar, w1: &Scalar, c2: &Scalar, w2: &Scalar) -> Ordering {
    let class = |w: &Scalar| {
        if w.is_positive() {
            2
        } else if w.is_zero() {
            1
        } else {
            0
        }
    };
    match class(w1).cmp(&class(w2)) {
        Ordering::Equal if w1.is_zero() => c1.cmp(c2),
        Ordering::Equal => (c1 * w2).cmp(&(c2 * w1)),
        o => o,
    }
}

/// Shadow rule: the candidate maximizing `(c·s)/(w·s)` with `w` in the
/// projection convention. Returns an index into `candidates`.
pub fn select_shadow(
    candidates: &[Neighbor],
    spec: &ShadowSpec,
    policy: TiePolicy,
) -> Result<usize> {
    let w = spec.projection_w();
    let keys: Vec<(Scalar, Scalar, &Neighbor)> = candidates
        .iter()
        .map(|nb| (spec.c.dot(&nb.edge), w.dot(&nb.edge), nb))
        .collect();
    let order = sorted_by_leaving(&keys, |k| k.2);
    let best = argmax_by(
        &order,
        policy,
        |a, b| Ok(compare_slopes(&a.0, &a.1, &b.0, &b.1)),
        "shadow slope",
    )?;
    Ok(position_of(candidates, order[best].2))
}

/// Steepest edge: the candidate maximizing `(c·s)/η(s)`.
pub fn select_steepest(
    candidates: &[Neighbor],
    c: &QVector,
    norm: &NormSpec,
    policy: TiePolicy,
) -> Result<usize> {
    let keys: Vec<(Scalar, &Neighbor)> =
        candidates.iter().map(|nb| (c.dot(&nb.edge), nb)).collect();
    let order = sorted_by_leaving(&keys, |k| k.1);
    let best = argmax_by(
        &order,
        policy,
        |a, b| norm.compare_ratios(&a.0, &a.1.edge, &b.0, &b.1.edge),
        "steepest-edge ratio",
    )?;
    Ok(position_of(candidates, order[best].1))
}

fn sorted_by_leaving<'a, K: Clone>(keys: &[K], nb: impl Fn(&K) -> &'a Neighbor) -> Vec<K> {
    let mut v = keys.to_vec();
    v.sort_by(|a, b| leaving_order(nb(a), nb(b)));
    v
}

fn position_of(candidates: &[Neighbor], chosen: &Neighbor) -> usize {
    candidates
        .iter()
        .position(|n| std::ptr::eq(n, chosen))
        .expect("chosen candidate comes from the list")
}

/// Picks among improving candidates according to `rule`.
pub fn select(candidates: &[Neighbor], c: &QVector, rule: &PivotRuleSpec) -> Result<usize> {
    match &rule.rule {
        PivotRule::Shadow(spec) => select_shadow(candidates, spec, rule.tie_policy),
        PivotRule::SteepestEdge(norm) => select_steepest(candidates, c, norm, rule.tie_policy),
        PivotRule::Dantzig => {
            let keys: Vec<(Scalar, &Neighbor)> = candidates
                .iter()
                .map(|nb| (c.dot(&nb.direction), nb))
                .collect();
            let order = sorted_by_leaving(&keys, |k| k.1);
            let best = argmax_by(
                &order,
                rule.tie_policy,
                |a, b| Ok(a.0.cmp(&b.0)),
                "dantzig reduced cost",
            )?;
            Ok(position_of(candidates, order[best].1))
        }
        PivotRule::GreatestImprovement => {
            let keys: Vec<(Scalar, &Neighbor)> =
                candidates.iter().map(|nb| (c.dot(&nb.edge), nb)).collect();
            let order = sorted_by_leaving(&keys, |k| k.1);
            let best = argmax_by(
                &order,
                rule.tie_policy,
                |a, b| Ok(a.0.cmp(&b.0)),
                "greatest improvement",
            )?;
            Ok(position_of(candidates, order[best].1))
        }
    }
}

/// Runs the simplex method from `start` until no improving edge remains.
/// Raises `Degenerate` when an edge at a visited vertex keeps `c` constant,
/// and `StepCapExceeded` once `step_cap` steps have been taken without
/// reaching the optimum.
pub fn run_simplex(
    p: &HPolytope,
    c: &QVector,
    start: &VertexBasis,
    rule: &PivotRuleSpec,
    step_cap: usize,
) -> Result<PathRecord> {
    if c.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: c.dim(),
        });
    }
    let shadow_w = match &rule.rule {
        PivotRule::Shadow(spec) => {
            if spec.c != *c {
                return Err(Error::InvalidRule(
                    "shadow spec objective differs from c".into(),
                ));
            }
            Some(spec.projection_w())
        }
        PivotRule::SteepestEdge(norm) => {
            if norm.regular_required {
                norm.check_regular(p.dim())?;
            }
            None
        }
        _ => None,
    };
    let mut v = start.clone();
    let mut inv = basis_inverse(p, &v.tight)?;
    let mut rec = PathRecord {
        vertices: vec![v.clone()],
        c_values: vec![c.dot(&v.point)],
        w_values: shadow_w.as_ref().map(|w| vec![w.dot(&v.point)]),
        length: 0,
        rule: rule.to_string(),
    };
    loop {
        let nbs = neighbors_with_inverse(p, &v, &inv)?;
        if rec.length == 0 {
            if let Some(w) = &shadow_w {
                if nbs.iter().any(|nb| !w.dot(&nb.edge).is_positive()) {
                    return Err(Error::InvalidInput(format!(
                        "start vertex {:?} is not the unique minimizer of w",
                        v.tight
                    )));
                }
            }
        }
        if let Some(nb) = nbs.iter().find(|nb| c.dot(&nb.edge).is_zero()) {
            return Err(Error::Degenerate(format!(
                "c is constant along the edge {:?} -> {:?}",
                v.tight, nb.vertex.tight
            )));
        }
        let improving: Vec<Neighbor> = nbs
            .into_iter()
            .filter(|nb| c.dot(&nb.edge).is_positive())
            .collect();
        if improving.is_empty() {
            return Ok(rec);
        }
        if rec.length >= step_cap {
            return Err(Error::StepCapExceeded { cap: step_cap });
        }
        let pick = select(&improving, c, rule)?;
        let next = improving.into_iter().nth(pick).expect("index in range");
        if let (Some(w), Some(ws)) = (&shadow_w, rec.w_values.as_mut()) {
            let wv = w.dot(&next.vertex.point);
            if wv <= *ws.last().expect("nonempty") {
                return Err(Error::Degenerate(format!(
                    "shadow step to {:?} does not increase w ({})",
                    next.vertex.tight,
                    describe(w)
                )));
            }
            ws.push(wv);
        }
        rec.c_values.push(c.dot(&next.vertex.point));
        rec.length += 1;
        inv = neighbor_inverse(p, &v, &inv, &next);
        v = next.vertex;
        rec.vertices.push(v.clone());
    }
}

/// Walks to the maximizer of `obj`, requiring it to be unique. Edges along
/// which `obj` is constant are tolerated except at the optimum.
pub fn maximize(p: &HPolytope, obj: &QVector, start: &VertexBasis) -> Result<VertexBasis> {
    let mut v = start.clone();
    let mut inv = basis_inverse(p, &v.tight)?;
    loop {
        let nbs = neighbors_with_inverse(p, &v, &inv)?;
        let best = nbs
            .iter()
            .map(|nb| (obj.dot(&nb.edge), nb))
            .filter(|(g, _)| g.is_positive())
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.leaving.cmp(&a.1.leaving)));
        match best {
            Some((_, nb)) => {
                inv = neighbor_inverse(p, &v, &inv, nb);
                v = nb.vertex.clone();
            }
            None => {
                if nbs.iter().any(|nb| obj.dot(&nb.edge).is_zero()) {
                    return Err(Error::NonGeneric(format!(
                        "objective {} has no unique maximizer",
                        describe(obj)
                    )));
                }
                return Ok(v);
            }
        }
    }
}
