//! Edge compression toward a fixed direction, and the searches that pick
//! the compression factor.

use num_traits::{Signed, Zero};
use rand::Rng;

use crate::analysis::parametric_walk;
use crate::error::{Error, Result};
use crate::exact::{int, invert, QMatrix, QVector, Scalar};
use crate::pivot::{
    improving_neighbors, run_simplex, NormSpec, PathRecord, PivotRuleSpec, ShadowSpec,
};
use crate::polytope::{
    enumerate_vertices, vertex_from_basis, HPolytope, VertexBasis, DEFAULT_VERTEX_CAP,
};

/// The map `A_k = (1/k)I + (1 - 1/k) wwᵀ/(wᵀw)`, which fixes `w` and
/// shrinks its orthogonal complement by `1/k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressSpec {
    pub w: QVector,
    pub k: Scalar,
}

impl CompressSpec {
    pub fn new(w: QVector, k: Scalar) -> Result<Self> {
        if w.is_zero() {
            return Err(Error::InvalidInput(
                "compression direction must be nonzero".into(),
            ));
        }
        if !k.is_positive() {
            return Err(Error::InvalidInput(
                "compression factor must be positive".into(),
            ));
        }
        Ok(CompressSpec { w, k })
    }

    fn projector(&self) -> QMatrix {
        QMatrix::outer(&self.w, &self.w).scale(&self.w.l2_norm_squared().recip())
    }

    pub fn matrix(&self) -> QMatrix {
        let n = self.w.dim();
        let inv_k = self.k.recip();
        QMatrix::identity(n)
            .scale(&inv_k)
            .add(&self.projector().scale(&(int(1) - inv_k)))
            .expect("square")
    }

    /// `A_k⁻¹ = kI + (1 - k) wwᵀ/(wᵀw)`.
    pub fn inverse(&self) -> QMatrix {
        let n = self.w.dim();
        QMatrix::identity(n)
            .scale(&self.k)
            .add(&self.projector().scale(&(int(1) - &self.k)))
            .expect("square")
    }
}

/// `A_k(P)` in inequality form, and `c' = A_k⁻¹c` so that objective
/// differences between corresponding vertices are unchanged. Tight sets are
/// preserved.
pub fn compress(p: &HPolytope, c: &QVector, spec: &CompressSpec) -> Result<(HPolytope, QVector)> {
    if spec.w.dim() != p.dim() || c.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: spec.w.dim().max(c.dim()),
        });
    }
    let inv = spec.inverse();
    let q = p.map_rows(&inv)?;
    let c2 = inv.mul_vec(c)?;
    Ok((q, c2))
}

fn all_vertices_path(p: &HPolytope, spec: &ShadowSpec, start: &VertexBasis) -> Result<usize> {
    let count = enumerate_vertices(p, start, DEFAULT_VERTEX_CAP)?.len();
    let path = parametric_walk(p, &spec.to_parametric(), Some(start))?.record;
    if path.length + 1 != count {
        return Err(Error::InvalidInput(format!(
            "the shadow path visits {} of {count} vertices",
            path.length + 1
        )));
    }
    Ok(path.length)
}

/// The first `k` in `2, 4, 8, ...` for which steepest edge under `norm` on
/// the compressed polytope walks the full shadow path. A tie or an
/// uncertifiable comparison at some `k` counts as a failed probe.
pub fn find_k_for_norm(
    p: &HPolytope,
    spec: &ShadowSpec,
    start: &VertexBasis,
    norm: &NormSpec,
) -> Result<(Scalar, PathRecord)> {
    let target = all_vertices_path(p, spec, start)?;
    let proj = spec.to_projection();
    let rule = PivotRuleSpec::steepest(norm.clone());
    let mut k = int(2);
    for _ in 1..=64 {
        let cs = CompressSpec::new(proj.w.clone(), k.clone())?;
        let (q, c2) = compress(p, &proj.c, &cs)?;
        let s = vertex_from_basis(&q, &start.tight)?;
        match run_simplex(&q, &c2, &s, &rule, target + 1) {
            Ok(rec) if rec.length == target => return Ok((k, rec)),
            Ok(_)
            | Err(Error::Tie(_))
            | Err(Error::UncertifiableComparison { .. })
            | Err(Error::StepCapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
        k *= int(2);
    }
    Err(Error::KSearchExhausted)
}

/// An invertible `T` with `T·w = e_1`, the polytope and objectives in the
/// new coordinates (`a ↦ aT⁻¹`, `c ↦ T⁻ᵀc`), and `w` rescaled to `e_1`.
/// The rows of `T` after the first are orthogonal to `w`, so the new `w` is
/// a positive multiple of `e_1`.
pub fn canonicalize_w_to_e1(
    p: &HPolytope,
    spec: &ShadowSpec,
) -> Result<(HPolytope, ShadowSpec, QMatrix)> {
    let w = &spec.w;
    let n = w.dim();
    let Some(piv) = (0..n).find(|&i| !w[i].is_zero()) else {
        return Err(Error::InvalidInput("w must be nonzero".into()));
    };
    let mut rows = vec![w.scale(&w.l2_norm_squared().recip())];
    for j in (0..n).filter(|&j| j != piv) {
        rows.push(QVector::unit(n, j).axpy(&-(&w[j] / &w[piv]), &QVector::unit(n, piv)));
    }
    let t = QMatrix::new(rows, n)?;
    let t_inv = invert(&t)?;
    let q = p.map_rows(&t_inv)?;
    // T⁻ᵀc as a column is cᵀT⁻¹ as a row
    let c2 = t_inv.vec_mul(&spec.c)?;
    let spec2 = ShadowSpec::new(QVector::unit(n, 0), c2, spec.convention)?;
    Ok((q, spec2, t))
}

/// A single compression factor that makes every regular norm follow the
/// shadow path of `spec`, which must have `w = e_1` in the projection
/// convention (see [`canonicalize_w_to_e1`]).
///
/// For regular `η`, `|η(A_k s) - |s_1|| ≤ ‖(0, s_2, ..., s_n)‖₁ / k`, so each
/// ratio `c·s/η(A_k s)` lies in `[c·s/(s_1 + r/k), c·s/(s_1 - r/k)]`. The
/// smallest power of two separating the shadow choice from every other
/// improving edge at every path vertex is returned.
pub fn uniform_regular_k(p: &HPolytope, spec: &ShadowSpec, start: &VertexBasis) -> Result<Scalar> {
    let proj = spec.to_projection();
    let n = p.dim();
    if proj.w != QVector::unit(n, 0) {
        return Err(Error::InvalidInput(
            "w must be e_1 in the projection convention".into(),
        ));
    }
    let path = parametric_walk(p, &proj, Some(start))?.record;
    let mut k = int(2);
    let mut doublings = 1;
    for pair in path.vertices.windows(2) {
        let edges: Vec<(Scalar, Scalar, Scalar, bool)> = improving_neighbors(p, &proj.c, &pair[0])?
            .into_iter()
            .map(|nb| {
                let s1 = nb.edge[0].clone();
                let rest: Scalar = nb.edge.iter().skip(1).map(|x| x.abs()).sum();
                (
                    proj.c.dot(&nb.edge),
                    s1,
                    rest,
                    nb.vertex.tight == pair[1].tight,
                )
            })
            .collect();
        if edges.iter().any(|e| !e.1.is_positive()) {
            return Err(Error::InvalidInput(format!(
                "an improving edge at {:?} does not increase w",
                pair[0].tight
            )));
        }
        loop {
            if separated(&edges, &k) {
                break;
            }
            doublings += 1;
            if doublings > 64 {
                return Err(Error::KSearchExhausted);
            }
            k *= int(2);
        }
    }
    Ok(k)
}

fn separated(edges: &[(Scalar, Scalar, Scalar, bool)], k: &Scalar) -> bool {
    let bounds: Vec<Option<(Scalar, Scalar)>> = edges
        .iter()
        .map(|(cs, s1, rest, _)| {
            let slack = rest / k;
            (s1 > &slack).then(|| (cs / (s1 + &slack), cs / (s1 - &slack)))
        })
        .collect();
    let Some(chosen) = edges.iter().position(|e| e.3) else {
        return false;
    };
    let Some((lo, _)) = &bounds[chosen] else {
        return false;
    };
    bounds
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != chosen)
        .all(|(_, b)| match b {
            Some((_, hi)) => hi < lo,
            None => false,
        })
}

/// A regular polyhedral norm on `R^n`: the identity rows plus `extra`
/// random rows with entries in `[-1, 1]` (denominators up to 8).
pub fn random_regular_polyhedral(n: usize, extra: usize, rng: &mut impl Rng) -> NormSpec {
    let mut rows: Vec<QVector> = (0..n).map(|i| QVector::unit(n, i)).collect();
    for _ in 0..extra {
        rows.push(
            (0..n)
                .map(|_| {
                    let q: i64 = rng.gen_range(1..=8);
                    let p: i64 = rng.gen_range(-q..=q);
                    Scalar::new(p.into(), q.into())
                })
                .collect(),
        );
    }
    let g = QMatrix::new(rows, n).expect("rows share the dimension");
    let norm = NormSpec::polyhedral(g)
        .expect("identity rows give full rank")
        .require_regular();
    debug_assert!(norm.check_regular(n).is_ok());
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn axis_compression() {
        let cs = CompressSpec::new(QVector::unit(2, 0), int(4)).unwrap();
        assert_eq!(
            cs.matrix(),
            QMatrix::diagonal(&QVector::new(vec![int(1), rat(1, 4)]))
        );
        let p = HPolytope::unit_cube(2);
        let (q, _) = compress(&p, &QVector::from_i64s(&[1, 2]), &cs).unwrap();
        for i in 0..4 {
            let a = p.normal(i);
            assert_eq!(
                q.normal(i),
                &QVector::new(vec![a[0].clone(), &a[1] * int(4)])
            );
        }
    }

    #[test]
    fn unit_factor_is_identity() {
        let cs = CompressSpec::new(QVector::from_i64s(&[2, -1, 3]), int(1)).unwrap();
        assert_eq!(cs.matrix(), QMatrix::identity(3));
        let p = HPolytope::unit_cube(3);
        assert_eq!(
            compress(&p, &QVector::from_i64s(&[1, 2, 4]), &cs)
                .unwrap()
                .0,
            p
        );
    }

    #[test]
    fn diagonal_direction() {
        let cs = CompressSpec::new(QVector::from_i64s(&[1, 1]), int(2)).unwrap();
        let m = cs.matrix();
        let expect = QMatrix::new(
            vec![
                QVector::new(vec![rat(3, 4), rat(1, 4)]),
                QVector::new(vec![rat(1, 4), rat(3, 4)]),
            ],
            2,
        )
        .unwrap();
        assert_eq!(m, expect);
        assert_eq!(
            m.mul_vec(&QVector::from_i64s(&[1, 1])).unwrap(),
            QVector::from_i64s(&[1, 1])
        );
        assert!(m.is_symmetric());
        assert_eq!(m.mul(&cs.inverse()).unwrap(), QMatrix::identity(2));
    }

    #[test]
    fn canonical_examples() {
        let p = HPolytope::unit_cube(2);
        let c = QVector::from_i64s(&[1, 3]);
        let t_of = |w: &[i64]| {
            let spec = ShadowSpec::projection(QVector::from_i64s(w), c.clone()).unwrap();
            canonicalize_w_to_e1(&p, &spec).unwrap().2
        };
        assert_eq!(t_of(&[1, 0]), QMatrix::identity(2));
        assert_eq!(
            t_of(&[2, 0]),
            QMatrix::diagonal(&QVector::new(vec![rat(1, 2), int(1)]))
        );
        let w = QVector::from_i64s(&[1, 1]);
        assert_eq!(t_of(&[1, 1]).mul_vec(&w).unwrap(), QVector::unit(2, 0));
    }

    #[test]
    fn regular_random_norms() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let norm = random_regular_polyhedral(4, 3, &mut rng);
            assert!(norm.check_regular(4).is_ok());
        }
    }
}
