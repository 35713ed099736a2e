//! Combinatorial cubes with long shadow paths, and a Klee-Minty preset.

use num_traits::Signed;

use crate::analysis::{convex_hull, parametric_walk};
use crate::error::{Error, Result};
use crate::exact::{int, rat, QMatrix, QVector, Scalar};
use crate::pivot::ShadowSpec;
use crate::polytope::{enumerate_vertices, vertex_from_basis, HPolytope, VertexBasis};

/// Largest dimension the cube generator accepts.
pub const GOLDFARB_CAP: usize = 14;

/// Dimensions up to which the generator replays the parametric path.
const PATH_CHECK_LIMIT: usize = 10;

/// Deformation parameters of the cube family: `x_1 ∈ [0,1]`,
/// `x_2 ∈ [εx_1, 1 - εx_1]` and for `k ≥ 3`
/// `x_k ∈ [ε(x_{k-1} - δx_{k-2}), 1 - ε(x_{k-1} - δx_{k-2})]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldfarbParams {
    pub eps: Scalar,
    pub delta: Scalar,
}

impl GoldfarbParams {
    /// The search grid, in the order tried.
    pub fn grid() -> Vec<GoldfarbParams> {
        let mut out = Vec::new();
        for e in [3, 4, 5] {
            for d in [2, 4, 8, 16, 32, 64] {
                out.push(GoldfarbParams {
                    eps: rat(1, e),
                    delta: rat(1, d),
                });
            }
        }
        out
    }
}

/// A generated cube with its objective pair.
#[derive(Clone, Debug)]
pub struct GoldfarbInstance {
    pub polytope: HPolytope,
    /// Parametric convention: `start` maximizes `w`.
    pub spec: ShadowSpec,
    pub start: VertexBasis,
    pub params: GoldfarbParams,
}

/// The deformed product: for each coordinate a lower row then an upper
/// row.
pub fn deformed_cube(n: usize, params: &GoldfarbParams) -> HPolytope {
    let mut rows = Vec::with_capacity(2 * n);
    let mut b = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(2 * n);
    for k in 0..n {
        // coupling term ε(x_{k-1} - δ x_{k-2})
        let mut coupling = QVector::zeros(n).into_entries();
        if k >= 1 {
            coupling[k - 1] = params.eps.clone();
        }
        if k >= 2 {
            coupling[k - 2] = -(&params.eps * &params.delta);
        }
        let coupling = QVector::new(coupling);
        let e = QVector::unit(n, k);
        rows.push(coupling.sub(&e));
        b.push(int(0));
        labels.push(format!("x{}-lower", k + 1));
        rows.push(coupling.add(&e));
        b.push(int(1));
        labels.push(format!("x{}-upper", k + 1));
    }
    HPolytope::new(
        QMatrix::new(rows, n).expect("rows"),
        QVector::new(b),
        labels,
    )
    .expect("deformed cube is valid")
}

fn lift(n: usize, v2: &QVector) -> QVector {
    let mut x = QVector::zeros(n).into_entries();
    x[n - 2] = v2[0].clone();
    x[n - 1] = v2[1].clone();
    QVector::new(x)
}

/// Picks `(w, c)` in the last two coordinates so that the segment from `w`
/// to `c` sweeps every edge normal of the projected polygon but one, then
/// confirms with the parametric path when `check_path` is set.
fn objective_pair(p: &HPolytope, check_path: bool) -> Result<Option<(ShadowSpec, VertexBasis)>> {
    let n = p.dim();
    let origin: Vec<usize> = (0..n).map(|k| 2 * k).collect();
    let seed = vertex_from_basis(p, &origin)?;
    let vertices = enumerate_vertices(p, &seed, 1 << n)?;
    let pts: Vec<(Scalar, Scalar)> = vertices
        .iter()
        .map(|v| (v.point[n - 2].clone(), v.point[n - 1].clone()))
        .collect();
    let hull = convex_hull(&pts)?;
    let big_n = hull.len();
    if big_n != 1 << n {
        return Ok(None);
    }
    // outward normal of the edge from hull[i] to hull[i+1], scaled to unit
    // ℓ1 length since edge lengths shrink geometrically with n
    let normals: Vec<QVector> = (0..big_n)
        .map(|i| {
            let a = &pts[hull[i]];
            let b = &pts[hull[(i + 1) % big_n]];
            let v = QVector::new(vec![&b.1 - &a.1, &a.0 - &b.0]);
            v.scale(&v.l1_norm().recip())
        })
        .collect();
    let cross = |u: &QVector, v: &QVector| &u[0] * &v[1] - &u[1] * &v[0];
    for a in 0..big_n {
        let skip = (a + big_n - 1) % big_n;
        let before = (a + big_n - 2) % big_n;
        if !cross(&normals[a], &normals[before]).is_positive() {
            continue;
        }
        let mut t = rat(1, 8);
        for _ in 0..4 {
            let w2 = normals[a].axpy(&t, &normals[skip]);
            let c2 = normals[before].axpy(&t, &normals[skip]);
            t /= int(2);
            let Ok(spec) = ShadowSpec::parametric(lift(n, &w2), lift(n, &c2)) else {
                continue;
            };
            let start = vertices[hull[a]].clone();
            if !check_path {
                return Ok(Some((spec, start)));
            }
            match parametric_walk(p, &spec, Some(&start)) {
                Ok(path) if path.record.length + 1 == big_n => return Ok(Some((spec, start))),
                Ok(_) | Err(Error::NonGeneric(_)) | Err(Error::InvalidInput(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

/// A simple combinatorial `n`-cube (`2n` facets) with a parametric shadow
/// path through all `2^n` vertices. Tries `params` if given, otherwise the
/// grid of [`GoldfarbParams::grid`], and accepts the first choice that
/// passes the all-vertices check at `n` and every smaller dimension.
pub fn goldfarb_cube(n: usize, params: Option<GoldfarbParams>) -> Result<GoldfarbInstance> {
    if !(2..=GOLDFARB_CAP).contains(&n) {
        return Err(Error::GenerationFailed(format!(
            "dimension {n} is outside 2..={GOLDFARB_CAP}"
        )));
    }
    let candidates = match params {
        Some(p) => vec![p],
        None => GoldfarbParams::grid(),
    };
    'grid: for params in candidates {
        let mut found = None;
        for k in 2..=n {
            let p = deformed_cube(k, &params);
            match objective_pair(&p, k <= PATH_CHECK_LIMIT)? {
                Some((spec, start)) => found = Some((p, spec, start)),
                None => continue 'grid,
            }
        }
        let (polytope, spec, start) = found.expect("n >= 2");
        return Ok(GoldfarbInstance {
            polytope,
            spec,
            start,
            params,
        });
    }
    Err(Error::GenerationFailed(format!(
        "no parameter choice passed the all-vertices check at n = {n}"
    )))
}

/// The Klee-Minty cube `εx_{k-1} ≤ x_k ≤ 1 - εx_{k-1}` with `ε = 1/3`,
/// objective `e_n`, starting at the origin.
pub fn klee_minty(n: usize) -> Result<(HPolytope, QVector, VertexBasis)> {
    if n == 0 {
        return Err(Error::GenerationFailed("dimension must be positive".into()));
    }
    let p = deformed_cube(
        n,
        &GoldfarbParams {
            eps: rat(1, 3),
            delta: int(0),
        },
    );
    let start = vertex_from_basis(&p, &(0..n).map(|k| 2 * k).collect::<Vec<_>>())?;
    Ok((p, QVector::unit(n, n - 1), start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{check_ordering_coincide, parametric_path};
    use crate::polytope::is_simple;

    #[test]
    fn small_cubes_walk_all_vertices() {
        for n in 2..=5 {
            let g = goldfarb_cube(n, None).unwrap();
            assert_eq!(g.polytope.num_facets(), 2 * n);
            assert!(is_simple(&g.polytope));
            let path = parametric_path(&g.polytope, &g.spec).unwrap();
            assert_eq!(path.length, (1 << n) - 1);
            assert!(check_ordering_coincide(&g.polytope, &g.spec).unwrap());
        }
    }

    #[test]
    fn rejects_out_of_range_dimension() {
        assert!(matches!(
            goldfarb_cube(1, None),
            Err(Error::GenerationFailed(_))
        ));
        assert!(matches!(
            goldfarb_cube(40, None),
            Err(Error::GenerationFailed(_))
        ));
    }

    #[test]
    fn klee_minty_is_a_cube() {
        let (p, c, _) = klee_minty(4).unwrap();
        assert_eq!(p.validate(1 << 10).unwrap(), 16);
        assert_eq!(c, QVector::unit(4, 3));
    }
}
