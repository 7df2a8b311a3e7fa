//! Exact rational linear algebra.
//!
//! Every geometric predicate in the crate reduces to the routines here:
//! rank and null space over the rationals, dimensions of subspace
//! intersections, and homogeneous strict feasibility. No floating point is
//! used anywhere in this module.

mod exact;
mod simplex;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use exact::{
    cone_nontrivial_big, cone_nontrivial_int, cross_int, det_int, next_combination, rank_int,
    ExactInt, RaySet, RayTester,
};
pub use simplex::{feasible_mixed, feasible_strict};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact binary value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Invalid(format!("non-finite number {x}")))
}

/// Rounds `x` to the dyadic grid with spacing `2^-bits`.
pub fn dyadic(x: f64, bits: u32) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Invalid(format!("non-finite number {x}")));
    }
    let scaled = (x * (1u64 << bits) as f64).round();
    let num = rational_from_f64(scaled)?.to_integer();
    Ok(Rational::new(num, BigInt::one() << bits))
}

/// Parses `"p/q"`, `"p"` or a decimal literal into an exact rational.
/// Decimal literals are read as the exact value of the nearest double.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    let x: f64 = s
        .parse()
        .map_err(|_| Error::Invalid(format!("not a number: {s:?}")))?;
    rational_from_f64(x)
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Dense rational matrix with immutable shape.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from row vectors. `cols` is needed so that a matrix
    /// with zero rows still has a well-defined width.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let nrows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_i64_rows(cols: usize, rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: Vec<Vec<Rational>>) -> Result<Self> {
        Ok(Self::from_rows(rows, columns)?.transpose())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Rational]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack width mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack height mismatch");
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.extend(other.row(i).iter().cloned());
        }
        Self {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        self.rows_iter().map(|r| dot(r, v)).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Rows scaled by positive factors to primitive integer vectors.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.rows_iter().map(integer_row).collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.rows_iter()
            .map(|r| r.iter().map(to_f64).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{}", self.rows, self.cols)?;
        for r in self.rows_iter() {
            let cells: Vec<String> = r.iter().map(|q| q.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Positive multiple of `row` with integer entries and content 1.
pub fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = row
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut RationalMatrix) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = m[(r, c)].recip();
        for j in c..cols {
            let v = &m[(r, j)] * &inv;
            m[(r, j)] = v;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let factor = m[(i, c)].clone();
            for j in c..cols {
                if m[(r, j)].is_zero() {
                    continue;
                }
                let v = &m[(i, j)] - &factor * &m[(r, j)];
                m[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank by rational Gaussian elimination.
pub fn rank(m: &RationalMatrix) -> usize {
    let mut work = m.clone();
    rref(&mut work).len()
}

/// Basis of the null space `{x : M x = 0}`, returned as the columns of a
/// `cols(M) x nullity` matrix.
pub fn kernel_basis(m: &RationalMatrix) -> RationalMatrix {
    let mut work = m.clone();
    let pivots = rref(&mut work);
    let n = m.cols;
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut basis = RationalMatrix::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis[(f, k)] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            basis[(p, k)] = -work[(r, f)].clone();
        }
    }
    basis
}

/// Dimension of `span(U) ∩ span(V)` for column bases `U`, `V`.
pub fn intersection_dim(u: &RationalMatrix, v: &RationalMatrix) -> usize {
    assert_eq!(u.nrows(), v.nrows(), "ambient dimension mismatch");
    rank(u) + rank(v) - rank(&u.hstack(v))
}

/// Orthogonal complement of the column span of `m`, as a column basis.
pub fn orthogonal_complement(m: &RationalMatrix) -> RationalMatrix {
    kernel_basis(&m.transpose())
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(cols: usize, rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(cols, rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&RationalMatrix::identity(2)), 2);
        assert_eq!(rank(&m(2, &[&[1, -1], &[-1, 1]])), 1);
        assert_eq!(rank(&m(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]])), 2);
        assert_eq!(rank(&RationalMatrix::zeros(0, 3)), 0);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(2, &[&[1, 1]]));
        assert_eq!(k.ncols(), 1);
        assert_eq!(k[(0, 0)], -k[(1, 0)].clone());
        assert!(!k.is_zero());

        assert_eq!(kernel_basis(&RationalMatrix::identity(2)).ncols(), 0);

        let k = kernel_basis(&m(3, &[&[1, 0, -1], &[0, 1, -1]]));
        assert_eq!(k.ncols(), 1);
        let c = k.column(0);
        assert!(c.iter().all(|x| *x == c[0]) && !c[0].is_zero());
    }

    #[test]
    fn intersection_examples() {
        let l1 = m(1, &[&[1], &[0]]);
        let l2 = m(1, &[&[1], &[1]]);
        assert_eq!(intersection_dim(&l1, &l2), 0);
        let p = m(2, &[&[1, 0], &[0, 1], &[0, 0]]);
        assert_eq!(intersection_dim(&p, &p), 2);
        let u = m(2, &[&[3, -1], &[1, 2], &[-2, 5]]);
        let v = m(2, &[&[1, 4], &[-3, 1], &[2, 2]]);
        // two generic planes in 3-space meet in a line
        assert_eq!(rank(&u.hstack(&v)), 3);
        assert_eq!(intersection_dim(&u, &v), 1);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), ratio(-3, 4));
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert_eq!(parse_rational("0.5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn dyadic_grid() {
        let q = dyadic(0.3, 4).unwrap();
        assert_eq!(q, ratio(5, 16));
    }

    fn small_matrix() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            (
                Just(c),
                prop::collection::vec(prop::collection::vec(-3i64..4, c), r),
            )
        })
    }

    fn build(cols: usize, rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant((cols, rows) in small_matrix()) {
            let a = build(cols, &rows);
            prop_assert_eq!(rank(&a), rank(&a.transpose()));
        }

        #[test]
        fn rank_nullity((cols, rows) in small_matrix()) {
            let a = build(cols, &rows);
            let k = kernel_basis(&a);
            prop_assert_eq!(k.ncols() + rank(&a), cols);
            prop_assert!(a.mul(&k).is_zero());
        }

        #[test]
        fn intersection_symmetric((cols, rows) in small_matrix(), (cols2, rows2) in small_matrix()) {
            // reuse the row vectors as columns of two subspaces of R^cols
            let u = build(cols, &rows).transpose();
            let v_rows: Vec<Vec<i64>> = rows2.iter().map(|r| {
                (0..cols).map(|i| r.get(i).copied().unwrap_or(i as i64 - 1)).collect()
            }).collect();
            let _ = cols2;
            let v = build(cols, &v_rows).transpose();
            prop_assert_eq!(intersection_dim(&u, &v), intersection_dim(&v, &u));
            let w = u.hstack(&v);
            prop_assert_eq!(intersection_dim(&u, &w), rank(&u));
        }
    }
}
