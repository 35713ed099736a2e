//! Seeded random instances: cut cubes and products of polygons.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{int, QMatrix, QVector, Scalar};
use crate::pivot::{maximize, random_small_rational, ShadowSpec};
use crate::polytope::{enumerate_vertices, find_vertex, normal_cone, HPolytope, VertexBasis};

use super::vertex_cut;

/// A random instance with a generic parametric objective pair.
#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub kind: &'static str,
    pub polytope: HPolytope,
    pub spec: ShadowSpec,
    /// Unique maximizer of the parametric `w`.
    pub start: VertexBasis,
}

fn positive_rational(rng: &mut impl Rng) -> Scalar {
    let p: i64 = rng.gen_range(1..=12);
    let q: i64 = rng.gen_range(1..=6);
    Scalar::new(p.into(), q.into())
}

/// A point strictly inside the normal cone at `v`.
fn interior_direction(p: &HPolytope, v: &VertexBasis, rng: &mut impl Rng) -> Result<QVector> {
    let cone = normal_cone(p, v)?;
    Ok(cone
        .rays()
        .rows()
        .iter()
        .fold(QVector::zeros(p.dim()), |acc, r| {
            acc.axpy(&positive_rational(rng), r)
        }))
}

/// The unit `n`-cube with `cuts` successive random vertex cuts.
pub fn cut_cube(n: usize, cuts: usize, rng: &mut impl Rng) -> Result<HPolytope> {
    let mut p = HPolytope::unit_cube(n);
    for _ in 0..cuts {
        let vs = enumerate_vertices(&p, &find_vertex(&p)?, 1 << 16)?;
        let v = &vs[rng.gen_range(0..vs.len())];
        let w = interior_direction(&p, v, rng)?;
        p = vertex_cut(&p, v, &w, None)?;
    }
    Ok(p)
}

/// A polygon whose edges are tangent to the unit circle at the rational
/// points `((1-t²)/(1+t²), 2t/(1+t²))`, for `sides` random angles spread
/// around the circle. Its rows are `x·u ≤ 1` for each tangent point `u`.
pub fn rational_polygon(sides: usize, rng: &mut impl Rng) -> Result<HPolytope> {
    if sides < 3 {
        return Err(Error::InvalidInput(
            "a polygon needs at least 3 sides".into(),
        ));
    }
    // stratified angles keep every gap below π
    let mut rows = Vec::with_capacity(sides);
    for i in 0..sides {
        let span = 2.0 * std::f64::consts::PI / sides as f64;
        let theta = span * (i as f64 + rng.gen_range(0.4..0.6)) - std::f64::consts::PI;
        // t = tan(θ/2), rounded to a rational with denominator 64
        let t_num = ((theta / 2.0).tan() * 64.0).round().clamp(-1e6, 1e6) as i64;
        let t = Scalar::new(t_num.into(), 64.into());
        let d = int(1) + &t * &t;
        rows.push(QVector::new(vec![
            (int(1) - &t * &t) / &d,
            (int(2) * &t) / &d,
        ]));
    }
    let b = QVector::new(vec![int(1); sides]);
    HPolytope::from_rows(QMatrix::new(rows, 2)?, b)
}

/// Cartesian product: block-diagonal rows.
pub fn product(a: &HPolytope, b: &HPolytope) -> Result<HPolytope> {
    let (n1, n2) = (a.dim(), b.dim());
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..a.num_facets() {
        let mut r = a.normal(i).entries().to_vec();
        r.extend(QVector::zeros(n2).into_entries());
        rows.push(QVector::new(r));
        rhs.push(a.rhs()[i].clone());
        labels.push(format!("L.{}", a.labels()[i]));
    }
    for i in 0..b.num_facets() {
        let mut r = QVector::zeros(n1).into_entries();
        r.extend(b.normal(i).entries().iter().cloned());
        rows.push(QVector::new(r));
        rhs.push(b.rhs()[i].clone());
        labels.push(format!("R.{}", b.labels()[i]));
    }
    HPolytope::new(QMatrix::new(rows, n1 + n2)?, QVector::new(rhs), labels)
}

fn random_vector(n: usize, rng: &mut impl Rng) -> QVector {
    (0..n).map(|_| random_small_rational(rng, false)).collect()
}

/// Random generic `(w, c)` for `p`, retried until both have unique
/// maximizers at distinct vertices.
pub fn random_objectives(p: &HPolytope, rng: &mut impl Rng) -> Result<(ShadowSpec, VertexBasis)> {
    let seed = find_vertex(p)?;
    for _ in 0..100 {
        let w = random_vector(p.dim(), rng);
        let c = random_vector(p.dim(), rng);
        let Ok(spec) = ShadowSpec::parametric(w, c) else {
            continue;
        };
        let (Ok(start), Ok(end)) = (maximize(p, &spec.w, &seed), maximize(p, &spec.c, &seed))
        else {
            continue;
        };
        if start.tight != end.tight {
            return Ok((spec, start));
        }
    }
    Err(Error::GenerationFailed(
        "no generic objective pair found".into(),
    ))
}

/// One draw from the mixed family: cut cubes (n = 2..5) and products of
/// polygons (with an interval for odd dimension).
pub fn random_instance(rng: &mut impl Rng) -> Result<RandomInstance> {
    let (kind, polytope) = if rng.gen_bool(0.5) {
        let n = rng.gen_range(2..=5);
        let cuts = rng.gen_range(1..=3);
        ("cut-cube", cut_cube(n, cuts, rng)?)
    } else {
        let a = rational_polygon(rng.gen_range(3..=6), rng)?;
        let b = rational_polygon(rng.gen_range(3..=6), rng)?;
        let mut p = product(&a, &b)?;
        if rng.gen_bool(0.5) {
            p = product(&p, &HPolytope::unit_cube(1))?;
        }
        ("polygon-product", p)
    };
    let (spec, start) = random_objectives(&polytope, rng)?;
    Ok(RandomInstance {
        kind,
        polytope,
        spec,
        start,
    })
}
