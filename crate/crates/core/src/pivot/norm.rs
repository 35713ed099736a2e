//! Edge normalizations for steepest-edge rules.
//!
//! Rational-valued norms (ℓ1, ℓ∞, weighted ℓ1, polyhedral) and ℓ2 (through
//! its square) are compared exactly. General ℓp and user plugins are compared
//! with certified intervals whose endpoints are dyadic rationals, refined
//! until the two ratios separate.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{format_scalar, int, parse_scalar, rank, QMatrix, QVector, Scalar};

/// Starting precision of certified comparisons, in bits.
pub const START_BITS: u32 = 64;
/// Precision budget; comparisons still unresolved here are reported as
/// uncertifiable.
pub const MAX_BITS: u32 = 4096;

/// A closed interval with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Scalar) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    /// Multiplies by a non-negative scalar.
    pub fn scale(&self, k: &Scalar) -> Interval {
        debug_assert!(!k.is_negative());
        Interval {
            lo: &self.lo * k,
            hi: &self.hi * k,
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }

    /// `Some(ordering)` once the intervals are disjoint, or both are the
    /// same point.
    pub fn certain_cmp(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_scalar(&self.lo),
            format_scalar(&self.hi)
        )
    }
}

/// A positive, positively homogeneous function supplied by the caller.
/// `eval` must return an interval containing the true value whose width
/// shrinks as `bits` grows.
pub trait Normalization: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn eval(&self, x: &QVector, bits: u32) -> Interval;
}

#[derive(Clone, Debug)]
pub enum NormKind {
    L1,
    L2,
    Linf,
    /// ℓp for rational `p > 1`.
    Lp(Scalar),
    /// `Σ w_i |x_i|` with positive weights.
    WeightedL1(QVector),
    /// `max_i |g_i·x|` over generator rows of full column rank.
    Polyhedral(QMatrix),
    Plugin(Arc<dyn Normalization>),
}

impl PartialEq for NormKind {
    fn eq(&self, other: &Self) -> bool {
        use NormKind::*;
        match (self, other) {
            (L1, L1) | (L2, L2) | (Linf, Linf) => true,
            (Lp(a), Lp(b)) => a == b,
            (WeightedL1(a), WeightedL1(b)) => a == b,
            (Polyhedral(a), Polyhedral(b)) => a == b,
            (Plugin(a), Plugin(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// A normalization `η` plus whether regularity (`η(e_i) = 1`) is demanded.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    pub regular_required: bool,
}

/// Value of `η(x)`: exact, exact-squared (ℓ2), or a certified interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormValue {
    Exact(Scalar),
    Squared(Scalar),
    Interval(Interval),
}

impl NormValue {
    pub fn approx(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            NormValue::Exact(x) => x.to_f64().unwrap_or(f64::NAN),
            NormValue::Squared(x) => x.to_f64().unwrap_or(f64::NAN).sqrt(),
            NormValue::Interval(i) => {
                let mid = (&i.lo + &i.hi) / int(2);
                mid.to_f64().unwrap_or(f64::NAN)
            }
        }
    }
}

impl NormSpec {
    pub fn new(kind: NormKind) -> Result<Self> {
        match &kind {
            NormKind::Lp(p) if p <= &int(1) => {
                return Err(Error::InvalidNorm(format!(
                    "lp exponent must exceed 1, got {}",
                    format_scalar(p)
                )))
            }
            NormKind::WeightedL1(w) if w.iter().any(|x| !x.is_positive()) => {
                return Err(Error::InvalidNorm("weights must be positive".into()))
            }
            NormKind::Polyhedral(g) if g.nrows() == 0 || rank(g) < g.ncols() => {
                return Err(Error::InvalidNorm(
                    "polyhedral generators must have full column rank".into(),
                ))
            }
            _ => {}
        }
        Ok(NormSpec {
            kind,
            regular_required: false,
        })
    }

    pub fn l1() -> Self {
        NormSpec {
            kind: NormKind::L1,
            regular_required: false,
        }
    }

    pub fn l2() -> Self {
        NormSpec {
            kind: NormKind::L2,
            regular_required: false,
        }
    }

    pub fn linf() -> Self {
        NormSpec {
            kind: NormKind::Linf,
            regular_required: false,
        }
    }

    pub fn lp(p: Scalar) -> Result<Self> {
        Self::new(NormKind::Lp(p))
    }

    pub fn weighted_l1(w: QVector) -> Result<Self> {
        Self::new(NormKind::WeightedL1(w))
    }

    pub fn polyhedral(g: QMatrix) -> Result<Self> {
        Self::new(NormKind::Polyhedral(g))
    }

    /// Registers a plugin after spot-checking positivity and positive
    /// homogeneity on 100 random `(λ, x)` pairs in dimension `dim`.
    pub fn plugin(f: Arc<dyn Normalization>, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits = 256;
        for _ in 0..100 {
            let x: QVector = (0..dim)
                .map(|_| random_small_rational(&mut rng, true))
                .collect();
            if x.is_zero() {
                continue;
            }
            let lambda = random_small_rational(&mut rng, false).abs()
                + Scalar::new(BigInt::one(), BigInt::from(8));
            let fx = f.eval(&x, bits);
            if !fx.hi.is_positive() {
                return Err(Error::InvalidNorm(format!(
                    "{} is not positive at {x}",
                    f.name()
                )));
            }
            let flx = f.eval(&x.scale(&lambda), bits);
            if !flx.overlaps(&fx.scale(&lambda)) {
                return Err(Error::InvalidNorm(format!(
                    "{} is not positively homogeneous at {x} with factor {}",
                    f.name(),
                    format_scalar(&lambda)
                )));
            }
        }
        Ok(NormSpec {
            kind: NormKind::Plugin(f),
            regular_required: false,
        })
    }

    pub fn require_regular(mut self) -> Self {
        self.regular_required = true;
        self
    }

    /// Parses `l1 | l2 | linf | lp:<p> | wl1:<w1,...> | poly:<file>`. The
    /// polyhedral file holds a JSON array of generator rows.
    pub fn parse(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        match (head, arg) {
            ("l1", None) => Ok(Self::l1()),
            ("l2", None) => Ok(Self::l2()),
            ("linf", None) => Ok(Self::linf()),
            ("lp", Some(p)) => Self::lp(
                parse_scalar(p).map_err(|_| Error::InvalidNorm(format!("bad exponent {p:?}")))?,
            ),
            ("wl1", Some(w)) => Self::weighted_l1(
                QVector::parse_list(w)
                    .map_err(|_| Error::InvalidNorm(format!("bad weights {w:?}")))?,
            ),
            ("poly", Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidNorm(format!("cannot read {path}: {e}")))?;
                let rows: Vec<QVector> = serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidNorm(format!("{path}: {e}")))?;
                Self::polyhedral(QMatrix::from_rows(rows)?)
            }
            _ => Err(Error::InvalidNorm(format!("unrecognized norm {s:?}"))),
        }
    }

    /// Checks `η(e_i) = 1` for `i < n`.
    pub fn check_regular(&self, n: usize) -> Result<()> {
        let bad = |i: usize, v: String| {
            Err(Error::NotRegular(format!(
                "{self} has η(e_{}) = {v}",
                i + 1
            )))
        };
        match &self.kind {
            NormKind::L1 | NormKind::L2 | NormKind::Linf | NormKind::Lp(_) => Ok(()),
            NormKind::WeightedL1(w) => {
                check_dim(w.dim(), n)?;
                match w.iter().position(|x| !x.is_one()) {
                    Some(i) => bad(i, format_scalar(&w[i])),
                    None => Ok(()),
                }
            }
            NormKind::Polyhedral(g) => {
                check_dim(g.ncols(), n)?;
                for j in 0..n {
                    let m = g.column(j).linf_norm();
                    if !m.is_one() {
                        return bad(j, format_scalar(&m));
                    }
                }
                Ok(())
            }
            NormKind::Plugin(f) => {
                for i in 0..n {
                    let v = f.eval(&QVector::unit(n, i), 256);
                    if !v.contains(&int(1)) {
                        return bad(i, v.to_string());
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluates `η(x)`; for ℓp and plugins the interval is computed at
    /// `bits` of precision.
    pub fn eval(&self, x: &QVector, bits: u32) -> Result<NormValue> {
        self.check_input(x)?;
        Ok(match &self.kind {
            NormKind::L1 => NormValue::Exact(x.l1_norm()),
            NormKind::Linf => NormValue::Exact(x.linf_norm()),
            NormKind::L2 => NormValue::Squared(x.l2_norm_squared()),
            NormKind::WeightedL1(w) => NormValue::Exact(weighted_l1(w, x)),
            NormKind::Polyhedral(g) => NormValue::Exact(polyhedral(g, x)),
            NormKind::Lp(p) => NormValue::Interval(lp_norm_interval(p, x, bits)),
            NormKind::Plugin(f) => NormValue::Interval(f.eval(x, bits)),
        })
    }

    fn check_input(&self, x: &QVector) -> Result<()> {
        match &self.kind {
            NormKind::WeightedL1(w) => check_dim(w.dim(), x.dim()),
            NormKind::Polyhedral(g) => check_dim(g.ncols(), x.dim()),
            _ => Ok(()),
        }
    }

    /// Compares `n1/η(s1)` with `n2/η(s2)` for positive numerators `n1, n2`.
    pub fn compare_ratios(
        &self,
        n1: &Scalar,
        s1: &QVector,
        n2: &Scalar,
        s2: &QVector,
    ) -> Result<Ordering> {
        debug_assert!(n1.is_positive() && n2.is_positive());
        self.check_input(s1)?;
        self.check_input(s2)?;
        let exact = |e1: Scalar, e2: Scalar| (n1 * e2).cmp(&(n2 * e1));
        Ok(match &self.kind {
            NormKind::L1 => exact(s1.l1_norm(), s2.l1_norm()),
            NormKind::Linf => exact(s1.linf_norm(), s2.linf_norm()),
            NormKind::WeightedL1(w) => exact(weighted_l1(w, s1), weighted_l1(w, s2)),
            NormKind::Polyhedral(g) => exact(polyhedral(g, s1), polyhedral(g, s2)),
            NormKind::L2 => (n1 * n1 * s2.l2_norm_squared()).cmp(&(n2 * n2 * s1.l2_norm_squared())),
            // n1/‖s1‖ vs n2/‖s2‖  ⇔  ‖n1 s2‖ vs ‖n2 s1‖
            NormKind::Lp(p) => compare_lp(p, &s2.scale(n1), &s1.scale(n2))?,
            NormKind::Plugin(f) => compare_plugin(f.as_ref(), n1, s1, n2, s2)?,
        })
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn weighted_l1(w: &QVector, x: &QVector) -> Scalar {
    w.iter().zip(x.iter()).map(|(a, b)| a * b.abs()).sum()
}

fn polyhedral(g: &QMatrix, x: &QVector) -> Scalar {
    g.rows()
        .iter()
        .map(|r| r.dot(x).abs())
        .max()
        .unwrap_or_else(Scalar::zero)
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NormKind::L1 => write!(f, "l1"),
            NormKind::L2 => write!(f, "l2"),
            NormKind::Linf => write!(f, "linf"),
            NormKind::Lp(p) => write!(f, "lp:{}", format_scalar(p)),
            NormKind::WeightedL1(w) => {
                let parts: Vec<String> = w.iter().map(format_scalar).collect();
                write!(f, "wl1:{}", parts.join(","))
            }
            NormKind::Polyhedral(g) => write!(f, "poly:<{}x{} generators>", g.nrows(), g.ncols()),
            NormKind::Plugin(p) => write!(f, "plugin:{}", p.name()),
        }
    }
}

/// `t^{1/b}` for rational `t ≥ 0` when it is rational.
fn exact_root(t: &Scalar, b: u32) -> Option<Scalar> {
    let rn = t.numer().nth_root(b);
    let rd = t.denom().nth_root(b);
    (num_traits::pow(rn.clone(), b as usize) == *t.numer()
        && num_traits::pow(rd.clone(), b as usize) == *t.denom())
    .then(|| Scalar::new(rn, rd))
}

/// Dyadic enclosure of `t^{1/b}` with width `2^-bits`.
fn root_interval(t: &Scalar, b: u32, bits: u32) -> Interval {
    let shift = BigInt::one() << (bits as usize * b as usize);
    let n = (t.numer() * shift) / t.denom();
    let r = n.nth_root(b);
    let den = BigInt::one() << bits as usize;
    Interval::new(Scalar::new(r.clone(), den.clone()), Scalar::new(r + 1, den))
}

fn split_exponent(p: &Scalar) -> (usize, u32) {
    use num_traits::ToPrimitive;
    let a = p
        .numer()
        .to_usize()
        .expect("lp exponent numerator fits in usize");
    let b = p
        .denom()
        .to_u32()
        .expect("lp exponent denominator fits in u32");
    (a, b)
}

/// Terms `|x_i|^a` whose b-th roots are summed to form `‖x‖_p^p`.
fn lp_terms(a: usize, x: &QVector) -> Vec<Scalar> {
    x.iter()
        .filter(|v| !v.is_zero())
        .map(|v| num_traits::pow(v.abs(), a))
        .collect()
}

/// Enclosure of `Σ t_i^{1/b}`, exact when every root is rational.
fn power_sum(terms: &[Scalar], b: u32, bits: u32) -> Interval {
    terms
        .iter()
        .fold(Interval::point(Scalar::zero()), |acc, t| {
            let part = if b == 1 {
                Interval::point(t.clone())
            } else {
                exact_root(t, b)
                    .map(Interval::point)
                    .unwrap_or_else(|| root_interval(t, b, bits))
            };
            acc.add(&part)
        })
}

/// Certified comparison of `‖x‖_p` and `‖y‖_p`.
fn compare_lp(p: &Scalar, x: &QVector, y: &QVector) -> Result<Ordering> {
    let mut ax: Vec<Scalar> = x.iter().map(|v| v.abs()).filter(|v| !v.is_zero()).collect();
    let mut ay: Vec<Scalar> = y.iter().map(|v| v.abs()).filter(|v| !v.is_zero()).collect();
    ax.sort();
    ay.sort();
    if ax == ay {
        return Ok(Ordering::Equal);
    }
    let (a, b) = split_exponent(p);
    let tx = lp_terms(a, x);
    let ty = lp_terms(a, y);
    let mut bits = START_BITS;
    loop {
        let ix = power_sum(&tx, b, bits);
        let iy = power_sum(&ty, b, bits);
        if let Some(o) = ix.certain_cmp(&iy) {
            return Ok(o);
        }
        if bits >= MAX_BITS {
            return Err(Error::UncertifiableComparison { bits });
        }
        bits *= 2;
    }
}

/// Enclosure of `‖x‖_p = (Σ|x_i|^p)^{1/p}` with `p = a/b`.
fn lp_norm_interval(p: &Scalar, x: &QVector, bits: u32) -> Interval {
    let (a, b) = split_exponent(p);
    let s = power_sum(&lp_terms(a, x), b, bits);
    // s^{b/a}: raise to b exactly, then take a-th roots outward
    let lo = num_traits::pow(s.lo, b as usize);
    let hi = num_traits::pow(s.hi, b as usize);
    let a32 = a as u32;
    let lo = exact_root(&lo, a32).unwrap_or_else(|| root_interval(&lo, a32, bits).lo);
    let hi = exact_root(&hi, a32).unwrap_or_else(|| root_interval(&hi, a32, bits).hi);
    Interval::new(lo, hi)
}

fn compare_plugin(
    f: &dyn Normalization,
    n1: &Scalar,
    s1: &QVector,
    n2: &Scalar,
    s2: &QVector,
) -> Result<Ordering> {
    let mut bits = START_BITS;
    loop {
        let e1 = f.eval(s1, bits);
        let e2 = f.eval(s2, bits);
        if e1.lo.is_positive() && e2.lo.is_positive() {
            // compare n1·η(s2) with n2·η(s1)
            if let Some(o) = e2.scale(n1).certain_cmp(&e1.scale(n2)) {
                return Ok(o);
            }
        }
        if bits >= MAX_BITS {
            return Err(Error::UncertifiableComparison { bits });
        }
        bits *= 2;
    }
}

/// A random rational `p/q` with `|p| ≤ 20`, `1 ≤ q ≤ 10`.
pub(crate) fn random_small_rational(rng: &mut impl Rng, allow_zero: bool) -> Scalar {
    loop {
        let p: i64 = rng.gen_range(-20..=20);
        let q: i64 = rng.gen_range(1..=10);
        if allow_zero || p != 0 {
            return Scalar::new(p.into(), q.into());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn eval_examples() {
        assert_eq!(
            NormSpec::l2()
                .eval(&QVector::from_i64s(&[3, 4]), 64)
                .unwrap(),
            NormValue::Squared(int(25))
        );
        let x = QVector::new(vec![rat(1, 2), rat(-1, 3)]);
        assert_eq!(
            NormSpec::l1().eval(&x, 64).unwrap(),
            NormValue::Exact(rat(5, 6))
        );
        let y = QVector::new(vec![int(-2), rat(3, 2)]);
        assert_eq!(
            NormSpec::linf().eval(&y, 64).unwrap(),
            NormValue::Exact(int(2))
        );
    }

    #[test]
    fn lp_interval_contains_float_value() {
        let p = rat(3, 2);
        let x = QVector::from_i64s(&[1, 2, -3]);
        let i = lp_norm_interval(&p, &x, 64);
        let f: f64 = [1f64, 2., 3.]
            .iter()
            .map(|v| v.powf(1.5))
            .sum::<f64>()
            .powf(1.0 / 1.5);
        use num_traits::ToPrimitive;
        assert!(i.lo.to_f64().unwrap() <= f + 1e-12 && f - 1e-12 <= i.hi.to_f64().unwrap());
        assert!(i.width() < rat(1, 1 << 40));
    }

    #[test]
    fn lp_exact_ties() {
        let p = rat(3, 2);
        let x = QVector::from_i64s(&[1, -2]);
        let y = QVector::from_i64s(&[2, 1]);
        assert_eq!(compare_lp(&p, &x, &y).unwrap(), Ordering::Equal);
        // 1 + 8 against 8, all roots rational
        assert_eq!(
            compare_lp(&p, &QVector::from_i64s(&[1, 4]), &QVector::from_i64s(&[4])).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            compare_lp(
                &int(3),
                &QVector::from_i64s(&[3, 4, 5]),
                &QVector::from_i64s(&[6])
            )
            .unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn regularity() {
        assert!(NormSpec::l1().check_regular(3).is_ok());
        let w = NormSpec::weighted_l1(QVector::from_i64s(&[1, 4])).unwrap();
        assert!(matches!(w.check_regular(2), Err(Error::NotRegular(_))));
        let g = QMatrix::new(
            vec![
                QVector::from_i64s(&[1, 0]),
                QVector::from_i64s(&[0, 1]),
                QVector::new(vec![rat(1, 2), rat(-1, 2)]),
            ],
            2,
        )
        .unwrap();
        assert!(NormSpec::polyhedral(g).unwrap().check_regular(2).is_ok());
    }

    #[test]
    fn rejects_bad_norms() {
        assert!(NormSpec::lp(int(1)).is_err());
        assert!(NormSpec::weighted_l1(QVector::from_i64s(&[1, 0])).is_err());
        assert!(NormSpec::polyhedral(QMatrix::from_i64s(&[&[1, 1]])).is_err());
        assert!(NormSpec::parse("l3").is_err());
        assert_eq!(
            NormSpec::parse("lp:3/2").unwrap(),
            NormSpec::lp(rat(3, 2)).unwrap()
        );
        assert_eq!(NormSpec::parse("wl1:1,2").unwrap().to_string(), "wl1:1,2");
    }

    #[derive(Debug)]
    struct Euclid;

    impl Normalization for Euclid {
        fn name(&self) -> String {
            "euclid".into()
        }
        fn eval(&self, x: &QVector, bits: u32) -> Interval {
            lp_norm_interval(&int(2), x, bits)
        }
    }

    #[derive(Debug)]
    struct Squared;

    impl Normalization for Squared {
        fn name(&self) -> String {
            "squared".into()
        }
        fn eval(&self, x: &QVector, _bits: u32) -> Interval {
            Interval::point(x.l2_norm_squared())
        }
    }

    #[test]
    fn plugin_registration() {
        let e = NormSpec::plugin(Arc::new(Euclid), 3, 1).unwrap();
        let ord = e
            .compare_ratios(
                &int(1),
                &QVector::from_i64s(&[1, 1, 0]),
                &int(1),
                &QVector::from_i64s(&[1, 0, 0]),
            )
            .unwrap();
        assert_eq!(ord, Ordering::Less);
        assert!(matches!(
            NormSpec::plugin(Arc::new(Squared), 3, 1),
            Err(Error::InvalidNorm(_))
        ));
    }
}
