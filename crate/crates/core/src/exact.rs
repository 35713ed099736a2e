//! Exact rational scalars, vectors and matrices.
//!
//! Everything geometric in this crate is computed over arbitrary-precision
//! rationals. Rationals serialize as `"p/q"` strings (or `"p"` when `q = 1`).

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Scalar = BigRational;

/// `n / d` as a scalar. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as a scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapter for a single scalar stored as a rational string.
pub mod scalar_str {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

/// Nearest `f64`, for display only.
pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Number of bits needed to write `x` as numerator and denominator.
pub fn bit_size(x: &Scalar) -> u64 {
    x.numer().bits() + x.denom().bits()
}

/// Exact vector of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QVector(Vec<Scalar>);

impl QVector {
    pub fn new(entries: Vec<Scalar>) -> Self {
        QVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        QVector(vec![Scalar::zero(); n])
    }

    /// The `i`-th standard basis vector of dimension `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Scalar::one();
        v
    }

    pub fn from_i64s(xs: &[i64]) -> Self {
        QVector(xs.iter().map(|&x| int(x)).collect())
    }

    pub fn parse(items: &[&str]) -> Result<Self> {
        items
            .iter()
            .map(|s| parse_scalar(s))
            .collect::<Result<Vec<_>>>()
            .map(QVector)
    }

    /// Parses a comma separated list such as `"1,-1/2,3"`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let items: Vec<&str> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .collect();
        Self::parse(&items)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Scalar> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Inner product. Panics on a dimension mismatch; use [`dot`] for the
    /// checked form.
    pub fn dot(&self, other: &QVector) -> Scalar {
        assert_eq!(self.dim(), other.dim(), "dot product of mismatched vectors");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Scalar::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn add(&self, other: &QVector) -> QVector {
        assert_eq!(self.dim(), other.dim());
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        assert_eq!(self.dim(), other.dim());
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Scalar) -> QVector {
        QVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> QVector {
        QVector(self.0.iter().map(|a| -a).collect())
    }

    /// `self + k * other`
    pub fn axpy(&self, k: &Scalar, other: &QVector) -> QVector {
        assert_eq!(self.dim(), other.dim());
        QVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + k * b)
                .collect(),
        )
    }

    pub fn l1_norm(&self) -> Scalar {
        self.0.iter().fold(Scalar::zero(), |acc, a| acc + a.abs())
    }

    pub fn linf_norm(&self) -> Scalar {
        self.0
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn l2_norm_squared(&self) -> Scalar {
        self.dot(self)
    }

    /// Sum of a non-empty list of vectors.
    pub fn sum<'a>(vs: impl IntoIterator<Item = &'a QVector>) -> Option<QVector> {
        let mut it = vs.into_iter();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, v| acc.add(v)))
    }

    /// Largest bit size among the entries.
    pub fn max_bit_size(&self) -> u64 {
        self.0.iter().map(bit_size).max().unwrap_or(0)
    }
}

impl Index<usize> for QVector {
    type Output = Scalar;
    fn index(&self, i: usize) -> &Scalar {
        &self.0[i]
    }
}

impl FromIterator<Scalar> for QVector {
    fn from_iter<I: IntoIterator<Item = Scalar>>(iter: I) -> Self {
        QVector(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a QVector {
    type Item = &'a Scalar;
    type IntoIter = std::slice::Iter<'a, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_scalar(x))?;
        }
        write!(f, ")")
    }
}

impl Serialize for QVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = self.0.iter().map(format_scalar).collect();
        strs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_scalar(s))
            .collect::<Result<Vec<_>>>()
            .map(QVector)
            .map_err(serde::de::Error::custom)
    }
}

/// Exact dense matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: Vec<QVector>,
    cols: usize,
}

impl QMatrix {
    /// Builds a matrix from rows. `cols` fixes the width so that a matrix
    /// with zero rows still has a shape.
    pub fn new(rows: Vec<QVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.dim() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.dim(),
            });
        }
        Ok(QMatrix { rows, cols })
    }

    /// Builds a matrix from a non-empty list of equally sized rows.
    pub fn from_rows(rows: Vec<QVector>) -> Result<Self> {
        let cols = rows.first().map(QVector::dim).unwrap_or(0);
        Self::new(rows, cols)
    }

    pub fn from_i64s(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| QVector::from_i64s(r)).collect())
            .expect("ragged integer matrix")
    }

    pub fn identity(n: usize) -> Self {
        QMatrix {
            rows: (0..n).map(|i| QVector::unit(n, i)).collect(),
            cols: n,
        }
    }

    pub fn diagonal(d: &QVector) -> Self {
        let n = d.dim();
        let rows = (0..n)
            .map(|i| {
                let mut r = QVector::zeros(n);
                r.0[i] = d[i].clone();
                r
            })
            .collect();
        QMatrix { rows, cols: n }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.cols
    }

    pub fn row(&self, i: usize) -> &QVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[QVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<QVector> {
        self.rows
    }

    pub fn column(&self, j: usize) -> QVector {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    /// Submatrix formed by the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> QMatrix {
        QMatrix {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: self.cols,
        }
    }

    pub fn push_row(&mut self, row: QVector) -> Result<()> {
        if row.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.dim(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn transpose(&self) -> QMatrix {
        let rows = (0..self.cols).map(|j| self.column(j)).collect();
        QMatrix {
            rows,
            cols: self.nrows(),
        }
    }

    pub fn mul_vec(&self, x: &QVector) -> Result<QVector> {
        if x.dim() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.dim(),
            });
        }
        Ok(self.rows.iter().map(|r| r.dot(x)).collect())
    }

    /// `xᵀ M`, i.e. the row vector `x` multiplied from the left.
    pub fn vec_mul(&self, x: &QVector) -> Result<QVector> {
        if x.dim() != self.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows(),
                found: x.dim(),
            });
        }
        let mut out = QVector::zeros(self.cols);
        for (xi, r) in x.iter().zip(&self.rows) {
            if xi.is_zero() {
                continue;
            }
            for (o, a) in out.0.iter_mut().zip(r.iter()) {
                *o += xi * a;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.nrows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| other.vec_mul(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(QMatrix {
            rows,
            cols: other.cols,
        })
    }

    pub fn scale(&self, k: &Scalar) -> QMatrix {
        QMatrix {
            rows: self.rows.iter().map(|r| r.scale(k)).collect(),
            cols: self.cols,
        }
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows(),
                found: other.nrows(),
            });
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(QMatrix {
            rows,
            cols: self.cols,
        })
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: &QVector, v: &QVector) -> QMatrix {
        QMatrix {
            rows: u.iter().map(|ui| v.scale(ui)).collect(),
            cols: v.dim(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.cols).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn max_bit_size(&self) -> u64 {
        self.rows
            .iter()
            .map(QVector::max_bit_size)
            .max()
            .unwrap_or(0)
    }
}

impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<QVector>::deserialize(d)?;
        QMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

/// Reduces `m` (with `rhs` columns appended) to reduced row echelon form in
/// place. Pivots are chosen as the first nonzero entry in each column.
/// Returns the pivot columns.
fn rref(m: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        if !inv.is_one() {
            for x in m[r].iter_mut().skip(c) {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn augmented(m: &QMatrix, extra: impl Fn(usize) -> Vec<Scalar>) -> Vec<Vec<Scalar>> {
    m.rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.0.clone();
            row.extend(extra(i));
            row
        })
        .collect()
}

/// Solves `M x = rhs` exactly for square `M`.
pub fn solve(m: &QMatrix, rhs: &QVector) -> Result<QVector> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    if rhs.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.dim(),
        });
    }
    let mut aug = augmented(m, |i| vec![rhs[i].clone()]);
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return Err(Error::Singular);
    }
    Ok(aug
        .into_iter()
        .map(|mut row| row.pop().expect("augmented column"))
        .collect())
}

/// Exact inverse of a square matrix.
pub fn invert(m: &QMatrix) -> Result<QMatrix> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    let mut aug = augmented(m, |i| QVector::unit(n, i).0);
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return Err(Error::Singular);
    }
    let rows = aug
        .into_iter()
        .map(|row| QVector(row[n..].to_vec()))
        .collect();
    Ok(QMatrix { rows, cols: n })
}

/// Checked inner product.
pub fn dot(a: &QVector, b: &QVector) -> Result<Scalar> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(a.dot(b))
}

pub fn rank(m: &QMatrix) -> usize {
    let mut rows: Vec<Vec<Scalar>> = m.rows.iter().map(|r| r.0.clone()).collect();
    rref(&mut rows, m.cols).len()
}

/// Solves `Mᵀ y = rhs` given `M⁻¹`: `y = M⁻ᵀ rhs`.
pub(crate) fn solve_transposed_with_inverse(inv: &QMatrix, rhs: &QVector) -> QVector {
    inv.vec_mul(rhs).expect("inverse shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[(i64, i64)]) -> QVector {
        xs.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn solve_identity() {
        let x = solve(&QMatrix::identity(2), &v(&[(3, 1), (5, 2)])).unwrap();
        assert_eq!(x, v(&[(3, 1), (5, 2)]));
    }

    #[test]
    fn solve_two_by_two() {
        let m = QMatrix::from_i64s(&[&[1, 1], &[1, -1]]);
        let rhs = QVector::from_i64s(&[1, 0]);
        let x = solve(&m, &rhs).unwrap();
        assert_eq!(x, v(&[(1, 2), (1, 2)]));
        assert_eq!(m.mul_vec(&x).unwrap(), rhs);
    }

    #[test]
    fn solve_singular() {
        let m = QMatrix::from_i64s(&[&[1, 2], &[2, 4]]);
        assert_eq!(
            solve(&m, &QVector::from_i64s(&[1, 1])),
            Err(Error::Singular)
        );
    }

    #[test]
    fn solve_dimension_mismatch() {
        let err = solve(&QMatrix::identity(2), &QVector::from_i64s(&[1, 2, 3])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&QMatrix::identity(3)).unwrap(), QMatrix::identity(3));
        let d = QMatrix::diagonal(&v(&[(2, 1), (1, 3)]));
        assert_eq!(
            invert(&d).unwrap(),
            QMatrix::diagonal(&v(&[(1, 2), (3, 1)]))
        );
        let m = QMatrix::from_i64s(&[&[1, 1], &[0, 1]]);
        let inv = invert(&m).unwrap();
        assert_eq!(inv, QMatrix::from_i64s(&[&[1, -1], &[0, 1]]));
        assert_eq!(m.mul(&inv).unwrap(), QMatrix::identity(2));
    }

    #[test]
    fn invert_singular() {
        let m = QMatrix::from_i64s(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]]);
        assert_eq!(invert(&m), Err(Error::Singular));
    }

    #[test]
    fn dot_examples() {
        assert_eq!(
            dot(&QVector::from_i64s(&[1, 0]), &QVector::from_i64s(&[0, 1])).unwrap(),
            int(0)
        );
        assert_eq!(
            dot(&QVector::from_i64s(&[1, 2]), &QVector::from_i64s(&[3, 4])).unwrap(),
            int(11)
        );
        assert_eq!(
            dot(&v(&[(1, 2), (1, 3)]), &QVector::from_i64s(&[2, 3])).unwrap(),
            int(2)
        );
        assert!(dot(&QVector::zeros(2), &QVector::zeros(3)).is_err());
    }

    #[test]
    fn scalar_strings() {
        assert_eq!(format_scalar(&rat(-3, 7)), "-3/7");
        assert_eq!(format_scalar(&rat(6, 3)), "2");
        assert_eq!(parse_scalar("6/-4").unwrap(), rat(-3, 2));
        assert_eq!(parse_scalar(" 5 ").unwrap(), int(5));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert!(parse_scalar("1.5").is_err());
    }

    #[test]
    fn lowest_terms_after_arithmetic() {
        let x = rat(2, 4) + rat(1, 4);
        assert_eq!(x.numer(), &BigInt::from(3));
        assert_eq!(x.denom(), &BigInt::from(4));
        let y = rat(1, -3);
        assert!(y.denom() > &BigInt::from(0));
    }

    #[test]
    fn rank_counts_independent_rows() {
        assert_eq!(rank(&QMatrix::from_i64s(&[&[1, 2], &[2, 4], &[0, 1]])), 2);
        assert_eq!(rank(&QMatrix::from_i64s(&[&[0, 0], &[0, 0]])), 0);
    }

    #[test]
    fn vec_mul_is_left_multiplication() {
        let m = QMatrix::from_i64s(&[&[1, 2], &[3, 4]]);
        let x = QVector::from_i64s(&[1, 1]);
        assert_eq!(m.vec_mul(&x).unwrap(), QVector::from_i64s(&[4, 6]));
        assert_eq!(
            m.transpose().mul_vec(&x).unwrap(),
            QVector::from_i64s(&[4, 6])
        );
    }
}
