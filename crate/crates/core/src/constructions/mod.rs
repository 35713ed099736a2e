//! Instance generators and the transforms that make shadow paths long:
//! vertex cuts, thin normal cones, the two-sided and fixed-objective
//! composites, and edge compression.

mod compress;
mod generators;
pub mod random;

pub use compress::{
    canonicalize_w_to_e1, compress, find_k_for_norm, random_regular_polyhedral, uniform_regular_k,
    CompressSpec,
};
pub use generators::{
    deformed_cube, goldfarb_cube, klee_minty, GoldfarbInstance, GoldfarbParams, GOLDFARB_CAP,
};

use serde::{Deserialize, Serialize};

use num_traits::{Signed, Zero};

use crate::analysis::parametric_walk;
use crate::error::{Error, Result};
use crate::exact::{format_scalar, int, scalar_str, QMatrix, QVector, Scalar};
use crate::pivot::ShadowSpec;
use crate::polytope::{
    cone_contains, neighbors, normal_cone, vertex_from_basis, HPolytope, VertexBasis,
};

/// Upper bound on δ-halvings in [`thin_cone`].
pub const MAX_HALVINGS: usize = 200;

/// An open ℓ∞ ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ball {
    pub center: QVector,
    #[serde(with = "scalar_str")]
    pub radius: Scalar,
    #[serde(default = "linf_name")]
    pub norm: String,
}

fn linf_name() -> String {
    "linf".into()
}

impl Ball {
    pub fn new(center: QVector, radius: Scalar) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::InvalidInput("ball radius must be positive".into()));
        }
        Ok(Ball {
            center,
            radius,
            norm: linf_name(),
        })
    }

    /// Strict membership `|x_i - center_i| < radius` for all `i`.
    pub fn contains(&self, x: &QVector) -> bool {
        x.dim() == self.center.dim() && x.sub(&self.center).linf_norm() < self.radius
    }

    /// Whether some positive multiple `t·x` lies in the ball: each
    /// coordinate constrains `t` to an open interval; intersect them.
    pub fn contains_ray(&self, x: &QVector) -> bool {
        if x.dim() != self.center.dim() {
            return false;
        }
        let mut lo = Scalar::zero();
        let mut hi: Option<Scalar> = None;
        for (xi, ci) in x.iter().zip(self.center.iter()) {
            let (a, b) = (ci - &self.radius, ci + &self.radius);
            if xi.is_zero() {
                if !(a.is_negative() && b.is_positive()) {
                    return false;
                }
                continue;
            }
            let (l, h) = if xi.is_positive() {
                (a / xi, b / xi)
            } else {
                (b / xi, a / xi)
            };
            if l > lo {
                lo = l;
            }
            hi = Some(match hi {
                Some(cur) if cur < h => cur,
                _ => h,
            });
        }
        match hi {
            Some(h) => lo < h,
            None => true,
        }
    }
}

fn label_for(tight: &[usize]) -> String {
    let parts: Vec<String> = tight.iter().map(|i| i.to_string()).collect();
    format!("cut@{}", parts.join("."))
}

/// Cuts vertex `v` off with the hyperplane `w·x = w·v - eps`. The new facet
/// is appended at index `m`. `eps` defaults to half the smallest drop of
/// `w` along an edge at `v`.
pub fn vertex_cut(
    p: &HPolytope,
    v: &VertexBasis,
    w: &QVector,
    eps: Option<Scalar>,
) -> Result<HPolytope> {
    let v = vertex_from_basis(p, &v.tight)?;
    let cone = normal_cone(p, &v)?;
    if !cone_contains(&cone, w, true) {
        return Err(Error::NotInterior(v.tight.clone()));
    }
    let gap = neighbors(p, &v)?
        .iter()
        .map(|nb| -w.dot(&nb.edge))
        .min()
        .expect("a vertex has neighbors");
    let eps = match eps {
        Some(e) if e.is_positive() && e < gap => e,
        Some(e) => {
            return Err(Error::EpsTooLarge {
                eps: format_scalar(&e),
                gap: format_scalar(&gap),
            })
        }
        None => gap / int(2),
    };
    let rhs = w.dot(&v.point) - eps;
    p.with_facet(w.clone(), rhs, label_for(&v.tight))
}

/// Tight set of the vertex created by cutting `tight` with new facet
/// `new_facet` and dropping `replaced`.
fn swapped(tight: &[usize], replaced: usize, new_facet: usize) -> Vec<usize> {
    let mut t: Vec<usize> = tight.iter().copied().filter(|&i| i != replaced).collect();
    t.push(new_facet);
    t.sort_unstable();
    t
}

/// Replaces the normal cone at `v` by one whose generators all lie in `d`,
/// using `n` successive vertex cuts. Returns the new polytope and the new
/// vertex, which is tight exactly on the `n` appended facets.
pub fn thin_cone(p: &HPolytope, v: &VertexBasis, d: &Ball) -> Result<(HPolytope, VertexBasis)> {
    let n = p.dim();
    let v = vertex_from_basis(p, &v.tight)?;
    let cone = normal_cone(p, &v)?;
    if d.center.dim() != n || cone.linf_inradius(&d.center) < d.radius {
        return Err(Error::BallNotInterior(v.tight.clone()));
    }
    let rays: Vec<usize> = v.tight.clone();
    let m = p.num_facets();
    let mut q = vertex_cut(p, &v, &d.center, None)?;
    let mut ws = vec![d.center.clone()];
    let mut tight = swapped(&v.tight, rays[0], m);
    for k in 1..n {
        let tail = QVector::sum(rays[k..].iter().map(|&j| p.normal(j))).expect("nonempty tail");
        let avg = QVector::sum(ws.iter())
            .expect("nonempty")
            .scale(&Scalar::new(1.into(), (k as i64).into()));
        let mut delta = &d.radius / (int(1) + tail.linf_norm());
        let mut halvings = 0;
        let next = loop {
            let cand = avg.axpy(&delta, &tail);
            if d.contains(&cand) {
                break cand;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::DeltaUnderflow { stage: k });
            }
            delta /= int(2);
        };
        let cur = vertex_from_basis(&q, &tight)?;
        q = vertex_cut(&q, &cur, &next, None)?;
        tight = swapped(&tight, rays[k], m + k);
        ws.push(next);
    }
    let new_vertex = vertex_from_basis(&q, &tight)?;
    Ok((q, new_vertex))
}

/// Which cones a certificate thins.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMode {
    /// Both end cones are thinned; any `w` in the first and any `c` in the
    /// last give a long path.
    TwoSided,
    /// Only the start cone is thinned; `c` is fixed.
    FixedC,
}

/// One normal cone met by the original segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertCone {
    pub tight: Vec<usize>,
    pub rays: QMatrix,
}

/// Data whose exact verification shows every shadow path from `a` to `b`
/// on the constructed polytope has length at least `alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub alpha: usize,
    #[serde(with = "scalar_str")]
    pub epsilon: Scalar,
    /// `c_0 = w`, interior points `c_i` of the path cones, `c_α = c`.
    pub segment_points: Vec<QVector>,
    #[serde(rename = "D_w")]
    pub d_w: Ball,
    #[serde(rename = "D_c")]
    pub d_c: Ball,
    pub cut_facets: [Vec<usize>; 2],
    pub mode: CertificateMode,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    /// Cones of the original path, in order.
    pub cones: Vec<CertCone>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("certificate: {e}")))
    }
}

/// Result of [`many_from_one`] / [`fixed_c_variant`].
#[derive(Clone, Debug)]
pub struct LongPathInstance {
    pub polytope: HPolytope,
    pub a: VertexBasis,
    pub b: VertexBasis,
    pub certificate: Certificate,
}

impl LongPathInstance {
    /// A representative pair: `w` = sum of the rays at `a`, `c` = sum of the
    /// rays at `b` (or the fixed `c`), parametric convention.
    pub fn representative_spec(&self, fixed_c: Option<&QVector>) -> Result<ShadowSpec> {
        let q = &self.polytope;
        let w = QVector::sum(self.a.tight.iter().map(|&i| q.normal(i))).expect("nonempty");
        let c = match fixed_c {
            Some(c) => c.clone(),
            None => QVector::sum(self.b.tight.iter().map(|&i| q.normal(i))).expect("nonempty"),
        };
        ShadowSpec::parametric(w, c)
    }
}

/// Path vertices, segment points, radius and cones along the shadow path.
type SegmentData = (Vec<VertexBasis>, Vec<QVector>, Scalar, Vec<CertCone>);

fn segment_data(p: &HPolytope, spec: &ShadowSpec) -> Result<SegmentData> {
    let spec = spec.to_parametric();
    let path = parametric_walk(p, &spec, None).map_err(|e| match e {
        Error::NonGeneric(msg) => Error::DegeneratePath(msg),
        other => other,
    })?;
    let alpha = path.record.length;
    if alpha == 0 {
        return Err(Error::DegeneratePath(
            "w and c are maximized at the same vertex".into(),
        ));
    }
    let mut points = Vec::with_capacity(alpha + 1);
    let mut cones = Vec::with_capacity(alpha + 1);
    let mut eps: Option<Scalar> = None;
    for (i, (v, iv)) in path.record.vertices.iter().zip(&path.intervals).enumerate() {
        let pt = if i == 0 {
            spec.w.clone()
        } else if i == alpha {
            spec.c.clone()
        } else {
            let lam = iv.midpoint();
            spec.w.scale(&lam).add(&spec.c.scale(&(int(1) - &lam)))
        };
        let cone = normal_cone(p, v)?;
        let r = cone.linf_inradius(&pt);
        if !r.is_positive() {
            return Err(Error::DegeneratePath(format!(
                "segment point {i} is on the boundary of its cone"
            )));
        }
        eps = Some(match eps {
            Some(e) if e <= r => e,
            _ => r,
        });
        points.push(pt);
        cones.push(CertCone {
            tight: v.tight.clone(),
            rays: cone.rays().clone(),
        });
    }
    Ok((
        path.record.vertices,
        points,
        eps.expect("at least two points"),
        cones,
    ))
}

/// Thins the normal cones at both ends of the parametric path of `spec`,
/// so that every shadow path between the two new vertices is at least as
/// long as the original one. Adds `2n` facets.
pub fn many_from_one(p: &HPolytope, spec: &ShadowSpec) -> Result<LongPathInstance> {
    let (vertices, points, eps, cones) = segment_data(p, spec)?;
    let n = p.dim();
    let m = p.num_facets();
    let alpha = vertices.len() - 1;
    let d_w = Ball::new(points[0].clone(), eps.clone())?;
    let d_c = Ball::new(points[alpha].clone(), eps.clone())?;
    let (q1, a) = thin_cone(p, &vertices[0], &d_w)?;
    let v_in_q1 = vertex_from_basis(&q1, &vertices[alpha].tight)?;
    let (q, b) = thin_cone(&q1, &v_in_q1, &d_c)?;
    let a = vertex_from_basis(&q, &a.tight)?;
    let certificate = Certificate {
        alpha,
        epsilon: eps,
        segment_points: points,
        d_w,
        d_c,
        cut_facets: [(m..m + n).collect(), (m + n..m + 2 * n).collect()],
        mode: CertificateMode::TwoSided,
        a: a.tight.clone(),
        b: b.tight.clone(),
        cones,
    };
    Ok(LongPathInstance {
        polytope: q,
        a,
        b,
        certificate,
    })
}

/// Like [`many_from_one`] for a fixed objective `c`: only the start cone is
/// thinned, adding `n` facets.
pub fn fixed_c_variant(p: &HPolytope, spec: &ShadowSpec) -> Result<LongPathInstance> {
    let (vertices, points, eps, cones) = segment_data(p, spec)?;
    let n = p.dim();
    let m = p.num_facets();
    let alpha = vertices.len() - 1;
    let d_w = Ball::new(points[0].clone(), eps.clone())?;
    let d_c = Ball::new(points[alpha].clone(), eps.clone())?;
    let (q, a) = thin_cone(p, &vertices[0], &d_w)?;
    let b = vertex_from_basis(&q, &vertices[alpha].tight)?;
    let certificate = Certificate {
        alpha,
        epsilon: eps,
        segment_points: points,
        d_w,
        d_c,
        cut_facets: [(m..m + n).collect(), vec![]],
        mode: CertificateMode::FixedC,
        a: a.tight.clone(),
        b: b.tight.clone(),
        cones,
    };
    Ok(LongPathInstance {
        polytope: q,
        a,
        b,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::polytope::{enumerate_vertices, exhaustive_vertices, find_vertex, is_simple};

    fn count(p: &HPolytope) -> usize {
        enumerate_vertices(p, &find_vertex(p).unwrap(), 1 << 12)
            .unwrap()
            .len()
    }

    #[test]
    fn cut_square_corner() {
        let p = HPolytope::unit_cube(2);
        let v = vertex_from_basis(&p, &[2, 3]).unwrap();
        let q = vertex_cut(&p, &v, &QVector::from_i64s(&[1, 1]), None).unwrap();
        assert_eq!(q.num_facets(), 5);
        assert_eq!(q.rhs()[4], rat(3, 2));
        let pts: Vec<QVector> = exhaustive_vertices(&q, 100)
            .unwrap()
            .into_iter()
            .map(|v| v.point)
            .collect();
        assert!(pts.contains(&QVector::new(vec![int(1), rat(1, 2)])));
        assert!(pts.contains(&QVector::new(vec![rat(1, 2), int(1)])));
        assert_eq!(pts.len(), 5);
        let nv = vertex_from_basis(&q, &[2, 4]).unwrap();
        assert_eq!(nv.point, QVector::new(vec![int(1), rat(1, 2)]));
        assert_eq!(
            normal_cone(&q, &nv).unwrap().rays().rows(),
            &[QVector::from_i64s(&[1, 0]), QVector::from_i64s(&[1, 1])]
        );
        assert!(is_simple(&q));
    }

    #[test]
    fn cut_rejects_boundary_and_deep_eps() {
        let p = HPolytope::unit_cube(2);
        let v = vertex_from_basis(&p, &[2, 3]).unwrap();
        assert_eq!(
            vertex_cut(&p, &v, &QVector::from_i64s(&[1, 0]), None),
            Err(Error::NotInterior(vec![2, 3]))
        );
        assert!(matches!(
            vertex_cut(&p, &v, &QVector::from_i64s(&[1, 1]), Some(int(1))),
            Err(Error::EpsTooLarge { .. })
        ));
    }

    #[test]
    fn cut_cube_corner() {
        let p = HPolytope::unit_cube(3);
        let v = vertex_from_basis(&p, &[3, 4, 5]).unwrap();
        let q = vertex_cut(&p, &v, &QVector::from_i64s(&[1, 1, 1]), None).unwrap();
        assert_eq!(q.num_facets(), 7);
        assert_eq!(count(&q), 10);
    }

    #[test]
    fn thin_square_corner() {
        let p = HPolytope::unit_cube(2);
        let v = vertex_from_basis(&p, &[2, 3]).unwrap();
        let d = Ball::new(QVector::from_i64s(&[1, 1]), rat(1, 4)).unwrap();
        let (q, nv) = thin_cone(&p, &v, &d).unwrap();
        assert_eq!(q.num_facets(), 6);
        assert_eq!(nv.tight, vec![4, 5]);
        for &i in &nv.tight {
            assert!(d.contains(q.normal(i)));
        }
        assert!(is_simple(&q));
    }

    #[test]
    fn thin_cube_corner() {
        let p = HPolytope::unit_cube(3);
        let v = vertex_from_basis(&p, &[3, 4, 5]).unwrap();
        let d = Ball::new(QVector::from_i64s(&[1, 1, 1]), rat(1, 8)).unwrap();
        let (q, nv) = thin_cone(&p, &v, &d).unwrap();
        assert_eq!(q.num_facets(), 9);
        assert_eq!(nv.tight, vec![6, 7, 8]);
        assert!(nv.tight.iter().all(|&i| d.contains(q.normal(i))));
    }

    #[test]
    fn thin_rejects_outside_ball() {
        let p = HPolytope::unit_cube(2);
        let v = vertex_from_basis(&p, &[2, 3]).unwrap();
        let d = Ball::new(QVector::from_i64s(&[-1, 1]), rat(1, 4)).unwrap();
        assert_eq!(
            thin_cone(&p, &v, &d).unwrap_err(),
            Error::BallNotInterior(vec![2, 3])
        );
        // center inside but ball crossing the boundary
        let d = Ball::new(QVector::new(vec![int(1), rat(1, 8)]), rat(1, 4)).unwrap();
        assert!(matches!(
            thin_cone(&p, &v, &d),
            Err(Error::BallNotInterior(_))
        ));
    }

    #[test]
    fn ray_membership_by_rescaling() {
        let d = Ball::new(QVector::from_i64s(&[1, 1]), rat(1, 4)).unwrap();
        assert!(d.contains_ray(&QVector::from_i64s(&[3, 3])));
        assert!(d.contains_ray(&QVector::from_i64s(&[4, 5])));
        assert!(!d.contains_ray(&QVector::from_i64s(&[1, 2])));
        assert!(!d.contains_ray(&QVector::from_i64s(&[-1, -1])));
    }

    #[test]
    fn square_with_adjacent_optima() {
        let p = HPolytope::unit_cube(2);
        // w maximized at (1,0), c at (1,1)
        let spec =
            ShadowSpec::parametric(QVector::from_i64s(&[2, -1]), QVector::from_i64s(&[1, 3]))
                .unwrap();
        let inst = many_from_one(&p, &spec).unwrap();
        assert_eq!(inst.certificate.alpha, 1);
        assert_eq!(inst.polytope.num_facets(), 8);
        assert!(is_simple(&inst.polytope));
        let fixed = fixed_c_variant(&p, &spec).unwrap();
        assert_eq!(fixed.polytope.num_facets(), 6);
    }
}
