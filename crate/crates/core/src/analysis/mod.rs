//! Global path computations and the oracles that check them.

mod verify;

pub use verify::{
    all_norms_battery, check_certificate, sample_shadow_paths, CertificateCheck, RunSummary,
    VerificationReport,
};

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, QVector, Scalar};
use crate::pivot::{maximize, run_simplex, PathRecord, PivotRuleSpec, ShadowSpec};
use crate::polytope::{
    basis_inverse, enumerate_vertices, find_vertex, interval_from_coefficients, neighbor_inverse,
    neighbor_with_inverse, HPolytope, LambdaInterval, VertexBasis, DEFAULT_VERTEX_CAP,
};

/// A parametric path together with the λ-interval of each visited cone.
#[derive(Clone, Debug)]
pub struct ParametricPath {
    pub record: PathRecord,
    /// `intervals[i]` is where vertex `i` maximizes `λw + (1-λ)c`.
    pub intervals: Vec<LambdaInterval>,
}

/// The vertices maximizing `λw + (1-λ)c` as λ runs from 1 to 0.
pub fn parametric_path(p: &HPolytope, spec: &ShadowSpec) -> Result<PathRecord> {
    Ok(parametric_walk(p, spec, None)?.record)
}

/// [`parametric_path`] with an optional known starting vertex (the unique
/// maximizer of the parametric `w`), and the per-vertex λ-intervals.
pub fn parametric_walk(
    p: &HPolytope,
    spec: &ShadowSpec,
    start: Option<&VertexBasis>,
) -> Result<ParametricPath> {
    let spec = spec.to_parametric();
    let w = &spec.w;
    let c = &spec.c;
    let seed = match start {
        Some(v) => v.clone(),
        None => find_vertex(p)?,
    };
    let mut v = maximize(p, w, &seed)?;
    if let Some(s) = start {
        if s.tight != v.tight {
            return Err(Error::InvalidInput(format!(
                "vertex {:?} does not maximize w",
                s.tight
            )));
        }
    }
    let w_proj = spec.projection_w();
    let mut record = PathRecord {
        vertices: vec![],
        c_values: vec![],
        w_values: Some(vec![]),
        length: 0,
        rule: "parametric".into(),
    };
    let mut intervals = Vec::new();
    let mut lambda = int(1);
    let mut inv = basis_inverse(p, &v.tight)?;
    loop {
        let mw = inv.vec_mul(w)?;
        let mc = inv.vec_mul(c)?;
        let Some(iv) = interval_from_coefficients(&mw, &mc) else {
            return Err(Error::NonGeneric(format!(
                "cone at {:?} misses the segment",
                v.tight
            )));
        };
        if iv.hi != lambda {
            return Err(Error::NonGeneric(format!(
                "cone at {:?} does not continue the segment at the previous breakpoint",
                v.tight
            )));
        }
        if iv.is_point() {
            return Err(Error::NonGeneric(format!(
                "segment only touches the cone at {:?}",
                v.tight
            )));
        }
        record.c_values.push(c.dot(&v.point));
        record
            .w_values
            .as_mut()
            .expect("set")
            .push(w_proj.dot(&v.point));
        record.vertices.push(v.clone());
        lambda = iv.lo.clone();
        intervals.push(iv);
        if lambda.is_zero() {
            if mc.iter().any(|m| m.is_zero()) {
                return Err(Error::NonGeneric(format!(
                    "c lies on the boundary of the cone at {:?}",
                    v.tight
                )));
            }
            break;
        }
        // coefficients that vanish at the breakpoint while decreasing λ
        let hits: Vec<usize> = (0..mw.dim())
            .filter(|&j| {
                let slope = &mw[j] - &mc[j];
                slope.is_positive() && (&mc[j] + &lambda * &slope).is_zero()
            })
            .collect();
        if hits.len() != 1 {
            return Err(Error::NonGeneric(format!(
                "{} cone facets meet the segment together at λ = {}",
                hits.len(),
                crate::exact::format_scalar(&lambda)
            )));
        }
        if record.vertices.len() > DEFAULT_VERTEX_CAP {
            return Err(Error::LimitExceeded {
                what: "parametric path",
                cap: DEFAULT_VERTEX_CAP,
            });
        }
        let nb = neighbor_with_inverse(p, &v, &inv, hits[0])?;
        inv = neighbor_inverse(p, &v, &inv, &nb);
        v = nb.vertex;
    }
    record.length = record.vertices.len() - 1;
    Ok(ParametricPath { record, intervals })
}

/// `true` iff the local shadow rule (projection convention) from `start`
/// walks exactly the parametric path.
pub fn local_path_agreement(p: &HPolytope, spec: &ShadowSpec, start: &VertexBasis) -> Result<bool> {
    let global = parametric_walk(p, spec, Some(start))?.record;
    let proj = spec.to_projection();
    let local = run_simplex(
        p,
        &proj.c,
        start,
        &PivotRuleSpec::shadow(proj.clone()),
        DEFAULT_VERTEX_CAP,
    )?;
    Ok(global.tight_sequence() == local.tight_sequence())
}

/// The projection of a polytope onto `(w·x, c·x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShadowPolygon {
    pub vertices: Vec<VertexBasis>,
    #[serde(with = "point_list")]
    pub projected_points: Vec<(Scalar, Scalar)>,
    /// Indices into `vertices`, counter-clockwise, strictly convex.
    pub hull: Vec<usize>,
    pub hull_size: usize,
}

mod point_list {
    use super::Scalar;
    use crate::exact::{format_scalar, parse_scalar};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(pts: &[(Scalar, Scalar)], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            pts.iter()
                .map(|(a, b)| [format_scalar(a), format_scalar(b)]),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Scalar, Scalar)>, D::Error> {
        let raw = Vec::<[String; 2]>::deserialize(d)?;
        raw.iter()
            .map(|[a, b]| {
                Ok((
                    parse_scalar(a).map_err(serde::de::Error::custom)?,
                    parse_scalar(b).map_err(serde::de::Error::custom)?,
                ))
            })
            .collect()
    }
}

fn cross(o: &(Scalar, Scalar), a: &(Scalar, Scalar), b: &(Scalar, Scalar)) -> Scalar {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

/// Exact convex hull (monotone chain) of indexed points: counter-clockwise
/// indices of the strict corners. Duplicate points keep their first index.
pub fn convex_hull(points: &[(Scalar, Scalar)]) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| points[i].cmp(&points[j]).then(i.cmp(&j)));
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return Err(Error::DegenerateProjection);
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && !cross(
                &points[lower[lower.len() - 2]],
                &points[lower[lower.len() - 1]],
                &points[i],
            )
            .is_positive()
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && !cross(
                &points[upper[upper.len() - 2]],
                &points[upper[upper.len() - 1]],
                &points[i],
            )
            .is_positive()
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateProjection);
    }
    Ok(lower)
}

/// Projects every vertex onto `(w·x, c·x)` and takes the exact hull.
pub fn shadow_polygon(p: &HPolytope, spec: &ShadowSpec) -> Result<ShadowPolygon> {
    shadow_polygon_capped(p, spec, DEFAULT_VERTEX_CAP)
}

pub fn shadow_polygon_capped(
    p: &HPolytope,
    spec: &ShadowSpec,
    cap: usize,
) -> Result<ShadowPolygon> {
    let vertices = enumerate_vertices(p, &find_vertex(p)?, cap)?;
    let projected_points: Vec<(Scalar, Scalar)> = vertices
        .iter()
        .map(|v| (spec.w.dot(&v.point), spec.c.dot(&v.point)))
        .collect();
    let hull = convex_hull(&projected_points)?;
    Ok(ShadowPolygon {
        hull_size: hull.len(),
        vertices,
        projected_points,
        hull,
    })
}

/// Counts of `c`-monotone edge paths between two vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    #[serde(with = "biguint_str")]
    pub count: BigUint,
    pub min_length: Option<usize>,
    pub max_length: Option<usize>,
}

mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// All `c`-monotone paths from `from` to `to`, by dynamic programming over
/// the acyclic graph of improving edges (a path is determined by its edge
/// sequence, so counting along the DAG enumerates them exactly).
pub fn brute_force_paths(
    p: &HPolytope,
    c: &QVector,
    from: &VertexBasis,
    to: &VertexBasis,
    vertex_cap: usize,
) -> Result<PathStats> {
    let vertices = enumerate_vertices(p, from, vertex_cap)?;
    let mut order: Vec<&VertexBasis> = vertices.iter().collect();
    order.sort_by(|a, b| {
        c.dot(&a.point)
            .cmp(&c.dot(&b.point))
            .then(a.tight.cmp(&b.tight))
    });
    type Stat = (BigUint, usize, usize);
    let mut stats: BTreeMap<Vec<usize>, Stat> = BTreeMap::new();
    stats.insert(from.tight.clone(), (BigUint::one(), 0, 0));
    let from_value = c.dot(&from.point);
    for v in order {
        if c.dot(&v.point) < from_value {
            continue;
        }
        let Some((count, lo, hi)) = stats.get(&v.tight).cloned() else {
            continue;
        };
        for nb in crate::pivot::improving_neighbors(p, c, v)? {
            let e =
                stats
                    .entry(nb.vertex.tight.clone())
                    .or_insert((BigUint::zero(), usize::MAX, 0));
            e.0 += &count;
            e.1 = e.1.min(lo + 1);
            e.2 = e.2.max(hi + 1);
        }
    }
    Ok(match stats.get(&to.tight) {
        Some((count, lo, hi)) => PathStats {
            count: count.clone(),
            min_length: Some(*lo),
            max_length: Some(*hi),
        },
        None => PathStats {
            count: BigUint::zero(),
            min_length: None,
            max_length: None,
        },
    })
}

/// `true` iff sorting the vertices by `c·x` and by `w·x` (projection
/// convention) gives the same order.
pub fn check_ordering_coincide(p: &HPolytope, spec: &ShadowSpec) -> Result<bool> {
    let vertices = enumerate_vertices(p, &find_vertex(p)?, DEFAULT_VERTEX_CAP)?;
    let w = spec.projection_w();
    let order_by = |obj: &QVector, name: &str| -> Result<Vec<usize>> {
        let vals: Vec<Scalar> = vertices.iter().map(|v| obj.dot(&v.point)).collect();
        if vals.iter().collect::<BTreeSet<_>>().len() != vals.len() {
            return Err(Error::DuplicateValues(format!(
                "{name} takes equal values on two vertices"
            )));
        }
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&i, &j| vals[i].cmp(&vals[j]));
        Ok(idx)
    };
    Ok(order_by(&spec.c, "c")? == order_by(&w, "w")?)
}
