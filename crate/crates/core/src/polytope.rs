//! Inequality-form polytopes `Ax ≤ b`, their vertex/edge graph and normal
//! cones.
//!
//! Vertices are identified by their sorted set of tight facet indices, never
//! by coordinates. On a simple polytope each vertex has exactly `n` tight
//! facets and exactly `n` incident edges; dropping tight facet `j` walks the
//! edge whose direction `d` satisfies `a_i·d = 0` for the other tight rows
//! and `a_j·d = -1`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    format_scalar, invert, solve_transposed_with_inverse, QMatrix, QVector, Scalar,
};

/// Default cap on the number of vertices any enumeration will visit.
pub const DEFAULT_VERTEX_CAP: usize = 1 << 20;

/// A bounded, full-dimensional polytope `{x : Ax ≤ b}` with one label per
/// facet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    a: QMatrix,
    b: QVector,
    labels: Vec<String>,
    trusted_bounded: bool,
    scaled: Arc<IntegerRows>,
}

/// Each inequality scaled by a positive integer so that it has integer
/// coefficients. Ratio tests run on these to avoid rational normalization.
#[derive(Clone, PartialEq, Eq)]
struct IntegerRows {
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
}

impl std::fmt::Debug for IntegerRows {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("IntegerRows")
    }
}

/// `x = X / d` with `X` integral and `d > 0`.
fn common_denominator(x: &[Scalar]) -> (Vec<BigInt>, BigInt) {
    let d = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let xs = x.iter().map(|v| v.numer() * (&d / v.denom())).collect();
    (xs, d)
}

impl IntegerRows {
    fn new(a: &QMatrix, b: &QVector) -> Self {
        let mut rows = Vec::with_capacity(a.nrows());
        let mut rhs = Vec::with_capacity(a.nrows());
        for i in 0..a.nrows() {
            let mut entries = a.row(i).entries().to_vec();
            entries.push(b[i].clone());
            let (mut xs, _) = common_denominator(&entries);
            rhs.push(xs.pop().expect("rhs entry"));
            rows.push(xs);
        }
        IntegerRows { rows, rhs }
    }

    /// Positive multiples of the slacks at `x`.
    fn slacks(&self, x: &QVector) -> Vec<BigInt> {
        let (xs, d) = common_denominator(x.entries());
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| b * &d - int_dot(r, &xs))
            .collect()
    }
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter()
        .zip(b)
        .fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

#[derive(Serialize, Deserialize)]
struct HPolytopeFile {
    dim: usize,
    #[serde(rename = "A")]
    a: Vec<QVector>,
    b: QVector,
    labels: Vec<String>,
    #[serde(default)]
    trusted_bounded: bool,
}

impl Serialize for HPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HPolytopeFile {
            dim: self.dim(),
            a: self.a.rows().to_vec(),
            b: self.b.clone(),
            labels: self.labels.clone(),
            trusted_bounded: self.trusted_bounded,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = HPolytopeFile::deserialize(d)?;
        let a = QMatrix::new(raw.a, raw.dim).map_err(serde::de::Error::custom)?;
        let mut p = HPolytope::new(a, raw.b, raw.labels).map_err(serde::de::Error::custom)?;
        p.trusted_bounded = raw.trusted_bounded;
        Ok(p)
    }
}

fn positive_multiple(u: &QVector, v: &QVector) -> bool {
    // u = t v with t > 0
    let Some(k) = (0..v.dim()).find(|&i| !v[i].is_zero()) else {
        return u.is_zero();
    };
    let t = &u[k] / &v[k];
    t.is_positive() && u.iter().zip(v.iter()).all(|(a, b)| *a == &t * b)
}

impl HPolytope {
    /// Builds a polytope from its inequality system. Checks shapes and that
    /// no two rows are positive multiples of each other; boundedness is
    /// checked separately by [`HPolytope::validate`].
    pub fn new(a: QMatrix, b: QVector, labels: Vec<String>) -> Result<Self> {
        if a.nrows() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.dim(),
            });
        }
        if labels.len() != a.nrows() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: labels.len(),
            });
        }
        if a.ncols() == 0 {
            return Err(Error::InvalidPolytope("dimension must be positive".into()));
        }
        for i in 0..a.nrows() {
            if a.row(i).is_zero() {
                return Err(Error::InvalidPolytope(format!("row {i} is zero")));
            }
            for j in 0..i {
                if positive_multiple(a.row(i), a.row(j)) {
                    return Err(Error::InvalidPolytope(format!(
                        "rows {j} and {i} are positive multiples of each other"
                    )));
                }
            }
        }
        let scaled = Arc::new(IntegerRows::new(&a, &b));
        Ok(HPolytope {
            a,
            b,
            labels,
            trusted_bounded: false,
            scaled,
        })
    }

    /// Polytope with default labels `f0, f1, ...`.
    pub fn from_rows(a: QMatrix, b: QVector) -> Result<Self> {
        let labels = (0..a.nrows()).map(|i| format!("f{i}")).collect();
        Self::new(a, b, labels)
    }

    /// The unit cube `[0,1]^n`: rows `-x_i ≤ 0` for `i < n`, then `x_i ≤ 1`.
    pub fn unit_cube(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        let mut labels = Vec::with_capacity(2 * n);
        let mut b = Vec::with_capacity(2 * n);
        for i in 0..n {
            rows.push(QVector::unit(n, i).neg());
            b.push(Scalar::zero());
            labels.push(format!("x{}>=0", i + 1));
        }
        for i in 0..n {
            rows.push(QVector::unit(n, i));
            b.push(crate::exact::int(1));
            labels.push(format!("x{}<=1", i + 1));
        }
        Self::new(
            QMatrix::new(rows, n).expect("cube rows"),
            QVector::new(b),
            labels,
        )
        .expect("unit cube is valid")
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn num_facets(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &QVector {
        &self.b
    }

    pub fn normal(&self, i: usize) -> &QVector {
        self.a.row(i)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn trusted_bounded(&self) -> bool {
        self.trusted_bounded
    }

    pub fn set_trusted_bounded(&mut self, trusted: bool) {
        self.trusted_bounded = trusted;
    }

    /// Slack `b_i - a_i·x` of row `i` at `x`.
    pub fn slack(&self, i: usize, x: &QVector) -> Scalar {
        &self.b[i] - self.a.row(i).dot(x)
    }

    pub fn contains(&self, x: &QVector) -> bool {
        (0..self.num_facets()).all(|i| !self.slack(i, x).is_negative())
    }

    /// Returns a copy with one more inequality `row·x ≤ rhs` appended.
    pub fn with_facet(&self, row: QVector, rhs: Scalar, label: String) -> Result<Self> {
        let mut rows = self.a.rows().to_vec();
        rows.push(row);
        let mut b = self.b.entries().to_vec();
        b.push(rhs);
        let mut labels = self.labels.clone();
        labels.push(label);
        let mut p = Self::new(QMatrix::new(rows, self.dim())?, QVector::new(b), labels)?;
        p.trusted_bounded = self.trusted_bounded;
        Ok(p)
    }

    /// Returns a copy without facet `i`. Remaining facets shift down.
    pub fn without_facet(&self, i: usize) -> Result<Self> {
        let keep: Vec<usize> = (0..self.num_facets()).filter(|&k| k != i).collect();
        let rows = self.a.select_rows(&keep);
        let b = keep.iter().map(|&k| self.b[k].clone()).collect();
        let labels = keep.iter().map(|&k| self.labels[k].clone()).collect();
        Self::new(rows, b, labels)
    }

    /// Applies `x ↦ y` where the new system is `rows·M ≤ b`; used by linear
    /// changes of coordinates (`M` is the inverse of the point map).
    pub fn map_rows(&self, m: &QMatrix) -> Result<Self> {
        let rows = self
            .a
            .rows()
            .iter()
            .map(|r| m.vec_mul(r))
            .collect::<Result<Vec<_>>>()?;
        let mut p = Self::new(
            QMatrix::new(rows, self.dim())?,
            self.b.clone(),
            self.labels.clone(),
        )?;
        p.trusted_bounded = self.trusted_bounded;
        Ok(p)
    }

    /// Checks boundedness and full-dimensionality by walking the whole edge
    /// graph: every vertex must have `n` bounded edges. Returns the vertex
    /// count. Instances above `cap` are accepted only when marked
    /// `trusted_bounded`.
    pub fn validate(&self, cap: usize) -> Result<usize> {
        let seed = find_vertex(self)?;
        match enumerate_vertices(self, &seed, cap) {
            Ok(vs) => Ok(vs.len()),
            Err(Error::LimitExceeded { .. }) if self.trusted_bounded => Ok(cap),
            Err(e) => Err(e),
        }
    }

    /// Bit-size statistics of the coefficients: (max entry bits in A, max in b).
    pub fn bit_sizes(&self) -> (u64, u64) {
        (self.a.max_bit_size(), self.b.max_bit_size())
    }
}

/// A vertex given by its point and its `n` tight facets. Equality and
/// hashing use the tight set only.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexBasis {
    pub point: QVector,
    pub tight: Vec<usize>,
}

impl PartialEq for VertexBasis {
    fn eq(&self, other: &Self) -> bool {
        self.tight == other.tight
    }
}

impl Eq for VertexBasis {}

impl Hash for VertexBasis {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tight.hash(state);
    }
}

impl PartialOrd for VertexBasis {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexBasis {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.tight.cmp(&other.tight)
    }
}

/// Inverse of the tight submatrix `A_T` (rows in sorted tight order).
pub(crate) fn basis_inverse(p: &HPolytope, tight: &[usize]) -> Result<QMatrix> {
    invert(&p.a.select_rows(tight))
}

fn sorted_tight(p: &HPolytope, tight: &[usize]) -> Result<Vec<usize>> {
    let n = p.dim();
    let set: BTreeSet<usize> = tight.iter().copied().collect();
    if set.len() != n || tight.len() != n {
        return Err(Error::InvalidInput(format!(
            "tight set {tight:?} must hold {n} distinct indices"
        )));
    }
    if let Some(&bad) = set.iter().find(|&&i| i >= p.num_facets()) {
        return Err(Error::InvalidInput(format!(
            "facet index {bad} out of range"
        )));
    }
    Ok(set.into_iter().collect())
}

/// Resolves a basis (set of `n` facet indices) to a vertex.
pub fn vertex_from_basis(p: &HPolytope, tight: &[usize]) -> Result<VertexBasis> {
    let tight = sorted_tight(p, tight)?;
    let inv = basis_inverse(p, &tight)?;
    vertex_with_inverse(p, tight, &inv)
}

fn vertex_with_inverse(p: &HPolytope, tight: Vec<usize>, inv: &QMatrix) -> Result<VertexBasis> {
    let b_t: QVector = tight.iter().map(|&i| p.b[i].clone()).collect();
    let point = inv.mul_vec(&b_t)?;
    let mut on_boundary = Vec::new();
    for i in 0..p.num_facets() {
        if tight.binary_search(&i).is_ok() {
            continue;
        }
        let s = p.slack(i, &point);
        if s.is_negative() {
            return Err(Error::Infeasible(tight));
        }
        if s.is_zero() {
            on_boundary.push(i);
        }
    }
    if !on_boundary.is_empty() {
        return Err(Error::Degenerate(format!(
            "basis {tight:?} gives a point also tight on facets {on_boundary:?}"
        )));
    }
    Ok(VertexBasis { point, tight })
}

/// One edge out of a vertex.
#[derive(Clone, Debug)]
pub struct Neighbor {
    /// Facet dropped from the tight set.
    pub leaving: usize,
    /// Facet that becomes tight at the far end of the edge.
    pub entering: usize,
    pub vertex: VertexBasis,
    /// Full edge vector `u - v`.
    pub edge: QVector,
    /// Edge direction normalized by `a_leaving·d = -1`.
    pub direction: QVector,
}

/// Walks the edge obtained by dropping the `pos`-th tight facet of `v`,
/// given the inverse of `v`'s tight submatrix.
pub(crate) fn neighbor_with_inverse(
    p: &HPolytope,
    v: &VertexBasis,
    inv: &QMatrix,
    pos: usize,
) -> Result<Neighbor> {
    neighbor_from_slacks(p, v, inv, pos, &p.scaled.slacks(&v.point))
}

fn neighbor_from_slacks(
    p: &HPolytope,
    v: &VertexBasis,
    inv: &QMatrix,
    pos: usize,
    slacks: &[BigInt],
) -> Result<Neighbor> {
    let leaving = v.tight[pos];
    let direction = inv.column(pos).neg();
    let (dir, _) = common_denominator(direction.entries());
    // minimize slack_i / rate_i over rows with positive rate, comparing by
    // cross-multiplication
    let mut best: Option<(usize, BigInt)> = None;
    let mut tied = false;
    for (i, row) in p.scaled.rows.iter().enumerate() {
        if v.tight.binary_search(&i).is_ok() {
            continue;
        }
        let rate = int_dot(row, &dir);
        if !rate.is_positive() {
            continue;
        }
        match &best {
            Some((j, best_rate)) => {
                let lhs = &slacks[i] * best_rate;
                let rhs = &slacks[*j] * &rate;
                if lhs < rhs {
                    best = Some((i, rate));
                    tied = false;
                } else if lhs == rhs {
                    tied = true;
                }
            }
            None => best = Some((i, rate)),
        }
    }
    let Some((entering, _)) = best else {
        return Err(Error::UnboundedEdge {
            vertex: v.tight.clone(),
            leaving,
        });
    };
    if tied {
        return Err(Error::Degenerate(format!(
            "ratio test tie leaving facet {leaving} at vertex {:?}",
            v.tight
        )));
    }
    let t = p.slack(entering, &v.point) / p.a.row(entering).dot(&direction);
    let edge = direction.scale(&t);
    let point = v.point.add(&edge);
    let mut tight: Vec<usize> = v.tight.iter().copied().filter(|&i| i != leaving).collect();
    tight.push(entering);
    tight.sort_unstable();
    Ok(Neighbor {
        leaving,
        entering,
        vertex: VertexBasis { point, tight },
        edge,
        direction,
    })
}

/// Inverse of the neighbor's tight submatrix from the inverse at `v`, by a
/// rank-one update: with `g = a_e A_T⁻¹`, column `pos` becomes
/// `col_pos / g_pos` and every other column `j` loses `g_j/g_pos` of it.
pub(crate) fn neighbor_inverse(
    p: &HPolytope,
    v: &VertexBasis,
    inv: &QMatrix,
    nb: &Neighbor,
) -> QMatrix {
    let pos = v
        .tight
        .iter()
        .position(|&i| i == nb.leaving)
        .expect("leaving facet is tight");
    let g = inv.vec_mul(p.a.row(nb.entering)).expect("dimensions agree");
    let pivot_col = inv.column(pos).scale(&g[pos].recip());
    let mut cols: Vec<(usize, QVector)> = v
        .tight
        .iter()
        .enumerate()
        .map(|(j, &i)| {
            if j == pos {
                (nb.entering, pivot_col.clone())
            } else {
                (i, inv.column(j).axpy(&-&g[j], &pivot_col))
            }
        })
        .collect();
    cols.sort_by_key(|(i, _)| *i);
    let n = p.dim();
    QMatrix::new(cols.into_iter().map(|(_, c)| c).collect(), n)
        .expect("square")
        .transpose()
}

/// All `n` neighbors of `v`, ordered by the position of the leaving facet in
/// `v`'s tight set.
pub fn neighbors(p: &HPolytope, v: &VertexBasis) -> Result<Vec<Neighbor>> {
    let inv = basis_inverse(p, &v.tight)?;
    neighbors_with_inverse(p, v, &inv)
}

pub(crate) fn neighbors_with_inverse(
    p: &HPolytope,
    v: &VertexBasis,
    inv: &QMatrix,
) -> Result<Vec<Neighbor>> {
    let slacks = p.scaled.slacks(&v.point);
    (0..v.tight.len())
        .map(|pos| neighbor_from_slacks(p, v, inv, pos, &slacks))
        .collect()
}

/// Breadth-first closure of `seed` under [`neighbors`]. The result is sorted
/// by tight set.
pub fn enumerate_vertices(
    p: &HPolytope,
    seed: &VertexBasis,
    cap: usize,
) -> Result<Vec<VertexBasis>> {
    let mut seen: BTreeMap<Vec<usize>, VertexBasis> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(seed.tight.clone(), seed.clone());
    queue.push_back((seed.clone(), basis_inverse(p, &seed.tight)?));
    while let Some((v, inv)) = queue.pop_front() {
        let slacks = p.scaled.slacks(&v.point);
        for pos in 0..v.tight.len() {
            let nb = neighbor_from_slacks(p, &v, &inv, pos, &slacks)?;
            if !seen.contains_key(&nb.vertex.tight) {
                if seen.len() >= cap {
                    return Err(Error::LimitExceeded {
                        what: "vertex enumeration",
                        cap,
                    });
                }
                let next = neighbor_inverse(p, &v, &inv, &nb);
                seen.insert(nb.vertex.tight.clone(), nb.vertex.clone());
                queue.push_back((nb.vertex, next));
            }
        }
    }
    Ok(seen.into_values().collect())
}

/// Depth-first search over sets of linearly independent rows, in
/// lexicographic order. `visit` is called with each independent `n`-set and
/// returns `true` to stop.
fn independent_bases(
    p: &HPolytope,
    cap: usize,
    mut visit: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<()> {
    fn reduce(row: &QVector, basis: &[(usize, QVector)]) -> QVector {
        let mut r = row.clone();
        for (col, b) in basis {
            if !r[*col].is_zero() {
                let f = r[*col].clone();
                r = r.axpy(&-f, b);
            }
        }
        r
    }

    struct Search<'a, F> {
        p: &'a HPolytope,
        chosen: Vec<usize>,
        basis: Vec<(usize, QVector)>,
        visited: usize,
        cap: usize,
        visit: F,
    }

    impl<F: FnMut(&[usize]) -> Result<bool>> Search<'_, F> {
        fn go(&mut self, start: usize) -> Result<bool> {
            let n = self.p.dim();
            if self.chosen.len() == n {
                self.visited += 1;
                if self.visited > self.cap {
                    return Err(Error::LimitExceeded {
                        what: "basis enumeration",
                        cap: self.cap,
                    });
                }
                return (self.visit)(&self.chosen);
            }
            let remaining = n - self.chosen.len();
            for i in start..=self.p.num_facets().saturating_sub(remaining) {
                let r = reduce(self.p.a.row(i), &self.basis);
                let Some(col) = (0..n).find(|&c| !r[c].is_zero()) else {
                    continue;
                };
                let r = r.scale(&r[col].recip());
                // keep the stored rows fully reduced against each other
                let saved = self.basis.clone();
                for (_, b) in self.basis.iter_mut() {
                    if !b[col].is_zero() {
                        let f = b[col].clone();
                        *b = b.axpy(&-f, &r);
                    }
                }
                self.basis.push((col, r));
                self.chosen.push(i);
                let stop = self.go(i + 1)?;
                self.chosen.pop();
                self.basis = saved;
                if stop {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }

    let mut s = Search {
        p,
        chosen: Vec::new(),
        basis: Vec::new(),
        visited: 0,
        cap,
        visit: &mut visit,
    };
    s.go(0)?;
    Ok(())
}

/// Some vertex of `p`, found by scanning independent row sets in
/// lexicographic order.
pub fn find_vertex(p: &HPolytope) -> Result<VertexBasis> {
    let mut found = None;
    independent_bases(p, usize::MAX, |tight| match vertex_from_basis(p, tight) {
        Ok(v) => {
            found = Some(v);
            Ok(true)
        }
        Err(Error::Infeasible(_)) => Ok(false),
        Err(e) => Err(e),
    })?;
    found.ok_or_else(|| Error::InvalidPolytope("no feasible basis (empty polytope)".into()))
}

/// All vertices by brute force: every `n`-subset of facets that resolves to a
/// feasible point. Independent of the edge graph; used as an oracle.
pub fn exhaustive_vertices(p: &HPolytope, cap: usize) -> Result<Vec<VertexBasis>> {
    let mut out = Vec::new();
    independent_bases(p, cap, |tight| {
        match vertex_from_basis(p, tight) {
            Ok(v) => out.push(v),
            Err(Error::Infeasible(_)) => {}
            Err(e) => return Err(e),
        }
        Ok(false)
    })?;
    out.sort();
    Ok(out)
}

/// `true` iff every vertex of `p` lies on exactly `n` facets.
pub fn is_simple(p: &HPolytope) -> bool {
    let Ok(seed) = find_vertex(p) else {
        return false;
    };
    enumerate_vertices(p, &seed, DEFAULT_VERTEX_CAP).is_ok()
}

/// A closed interval `[lo, hi]` of the segment parameter λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaInterval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl LambdaInterval {
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Scalar {
        (&self.lo + &self.hi) / crate::exact::int(2)
    }
}

/// A pointed cone with exactly `n` linearly independent generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialCone {
    rays: QMatrix,
    /// Inverse of the ray matrix (rays as rows). Column `j` is the facet
    /// normal `h_j` with `h_j·ray_i = δ_ij`.
    inv: QMatrix,
    origin: Option<Vec<usize>>,
}

impl SimplicialCone {
    pub fn new(rays: QMatrix) -> Result<Self> {
        let inv = invert(&rays)?;
        Ok(SimplicialCone {
            rays,
            inv,
            origin: None,
        })
    }

    pub fn rays(&self) -> &QMatrix {
        &self.rays
    }

    /// Tight set of the vertex this cone belongs to, if any.
    pub fn origin(&self) -> Option<&[usize]> {
        self.origin.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.rays.ncols()
    }

    /// Coefficients `μ` with `z = Σ μ_j ray_j`.
    pub fn coefficients(&self, z: &QVector) -> QVector {
        solve_transposed_with_inverse(&self.inv, z)
    }

    /// Facet normals `h_j`, one per ray, with `h_j·ray_i = δ_ij`.
    pub fn facet_normals(&self) -> Vec<QVector> {
        (0..self.dim()).map(|j| self.inv.column(j)).collect()
    }

    /// Largest `r` such that the ℓ∞ ball of radius `r` around `z` stays in
    /// the closed cone: `min_j (h_j·z)/‖h_j‖₁`. Non-positive when `z` is not
    /// interior.
    pub fn linf_inradius(&self, z: &QVector) -> Scalar {
        self.facet_normals()
            .iter()
            .map(|h| h.dot(z) / h.l1_norm())
            .min()
            .expect("cone has at least one facet")
    }
}

/// Normal cone of `v`: generated by the facet normals tight at `v`.
pub fn normal_cone(p: &HPolytope, v: &VertexBasis) -> Result<SimplicialCone> {
    let mut c = SimplicialCone::new(p.a.select_rows(&v.tight))?;
    c.origin = Some(v.tight.clone());
    Ok(c)
}

/// Membership of `z` in the cone; `strict` asks for the open interior.
pub fn cone_contains(c: &SimplicialCone, z: &QVector, strict: bool) -> bool {
    let mu = c.coefficients(z);
    if strict {
        mu.iter().all(Signed::is_positive)
    } else {
        mu.iter().all(|m| !m.is_negative())
    }
}

/// The λ ∈ [0,1] for which `λw + (1-λ)c` lies in the closed cone, if any.
pub fn segment_cone_interval(
    cone: &SimplicialCone,
    w: &QVector,
    c: &QVector,
) -> Option<LambdaInterval> {
    let mw = cone.coefficients(w);
    let mc = cone.coefficients(c);
    interval_from_coefficients(&mw, &mc)
}

/// Solves `mc_j + λ (mw_j - mc_j) ≥ 0` for all `j`, intersected with [0,1].
pub(crate) fn interval_from_coefficients(mw: &QVector, mc: &QVector) -> Option<LambdaInterval> {
    let mut lo = Scalar::zero();
    let mut hi = crate::exact::int(1);
    for (w, c) in mw.iter().zip(mc.iter()) {
        let slope = w - c;
        if slope.is_zero() {
            if c.is_negative() {
                return None;
            }
        } else {
            let root = -c / &slope;
            if slope.is_positive() {
                lo = lo.max(root);
            } else {
                hi = hi.min(root);
            }
        }
    }
    (lo <= hi).then_some(LambdaInterval { lo, hi })
}

/// All maximal cones of a polytope's normal fan, keyed by tight set.
#[derive(Clone, Debug, Default)]
pub struct NormalFan {
    pub cones: BTreeMap<Vec<usize>, SimplicialCone>,
}

impl NormalFan {
    pub fn from_vertices(p: &HPolytope, vertices: &[VertexBasis]) -> Result<Self> {
        let cones = vertices
            .iter()
            .map(|v| Ok((v.tight.clone(), normal_cone(p, v)?)))
            .collect::<Result<_>>()?;
        Ok(NormalFan { cones })
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    /// Cones containing `z` (closed membership).
    pub fn locate(&self, z: &QVector) -> Vec<&[usize]> {
        self.cones
            .iter()
            .filter(|(_, c)| cone_contains(c, z, false))
            .map(|(k, _)| k.as_slice())
            .collect()
    }
}

pub(crate) fn describe(v: &QVector) -> String {
    let parts: Vec<String> = v.iter().map(format_scalar).collect();
    format!("[{}]", parts.join(", "))
}
