//! Fraction-free integer kernels used on the enumeration hot path.
//!
//! Rows are integer vectors (rational rows are brought to integers by a
//! positive per-row scaling, which does not change any cone). Every routine
//! is generic over [`ExactInt`] so the same code runs on `i128` with checked
//! arithmetic and on `BigInt`; a `None` result means the fixed-width attempt
//! overflowed and the caller should retry with `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

pub trait ExactInt: Clone + std::fmt::Debug {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn from_bigint(x: &BigInt) -> Option<Self>;
    fn vanishes(&self) -> bool;
    fn signum(&self) -> i8;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    /// Division known to be exact.
    fn div_exact(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;

    /// Signed maximal minors of `rows` (see [`cross_int`]).
    fn cross(rows: &[&[Self]], dim: usize) -> Option<Vec<Self>>
    where
        Self: Sized,
    {
        cross_generic(rows, dim)
    }
}

impl ExactInt for i128 {
    fn zero_value() -> Self {
        0
    }
    fn one_value() -> Self {
        1
    }
    fn from_bigint(x: &BigInt) -> Option<Self> {
        x.to_i128()
    }
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn signum(&self) -> i8 {
        i128::signum(*self) as i8
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        debug_assert_eq!(self % o, 0);
        self.checked_div(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }

    fn cross(rows: &[&[Self]], dim: usize) -> Option<Vec<Self>> {
        if dim > SMALL_DIM {
            return cross_generic(rows, dim);
        }
        let mut out = Vec::with_capacity(dim);
        let mut m = [[0i128; SMALL_DIM]; SMALL_DIM];
        for skip in 0..dim {
            for (dst, src) in m.iter_mut().zip(rows) {
                let mut c = 0;
                for (k, &x) in src.iter().enumerate() {
                    if k != skip {
                        dst[c] = x;
                        c += 1;
                    }
                }
            }
            let d = det_small(&mut m, dim - 1)?;
            out.push(if skip % 2 == 0 { d } else { d.checked_neg()? });
        }
        Some(out)
    }
}

const SMALL_DIM: usize = 8;

/// Bareiss determinant of the leading `n x n` block, on the stack.
fn det_small(m: &mut [[i128; SMALL_DIM]; SMALL_DIM], n: usize) -> Option<i128> {
    let mut prev = 1i128;
    let mut neg = false;
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| m[i][c] != 0) else {
            return Some(0);
        };
        if p != c {
            m.swap(p, c);
            neg = !neg;
        }
        for i in c + 1..n {
            for j in c + 1..n {
                let a = m[c][c].checked_mul(m[i][j])?;
                let b = m[i][c].checked_mul(m[c][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
        }
        prev = m[c][c];
    }
    let d = if n == 0 { 1 } else { m[n - 1][n - 1] };
    if neg {
        d.checked_neg()
    } else {
        Some(d)
    }
}

impl ExactInt for BigInt {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        num_traits::One::one()
    }
    fn from_bigint(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        debug_assert!(self.is_multiple_of(o));
        Some(self / o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
}

/// Bareiss elimination in place with column skipping. Returns the rank and
/// the sign flips from row swaps.
fn bareiss<T: ExactInt>(m: &mut [Vec<T>], cols: usize) -> Option<(usize, bool)> {
    let rows = m.len();
    let mut prev = T::one_value();
    let mut r = 0;
    let mut flipped = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].vanishes()) else {
            continue;
        };
        if p != r {
            m.swap(p, r);
            flipped = !flipped;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let a = m[r][c].mul(&m[i][j])?;
                let b = m[i][c].mul(&m[r][j])?;
                m[i][j] = a.sub(&b)?.div_exact(&prev)?;
            }
            m[i][c] = T::zero_value();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    Some((r, flipped))
}

pub fn rank_int<T: ExactInt>(rows: &[&[T]], cols: usize) -> Option<usize> {
    let mut m: Vec<Vec<T>> = rows.iter().map(|r| r.to_vec()).collect();
    bareiss(&mut m, cols).map(|(r, _)| r)
}

pub fn det_int<T: ExactInt>(rows: &[&[T]]) -> Option<T> {
    let n = rows.len();
    if n == 0 {
        return Some(T::one_value());
    }
    let mut m: Vec<Vec<T>> = rows.iter().map(|r| r.to_vec()).collect();
    let (rank, flipped) = bareiss(&mut m, n)?;
    if rank < n {
        return Some(T::zero_value());
    }
    let d = m[n - 1][n - 1].clone();
    if flipped {
        d.neg()
    } else {
        Some(d)
    }
}

/// Vector orthogonal to `dim - 1` rows of length `dim`: signed maximal
/// minors. It vanishes exactly when the rows are dependent.
pub fn cross_int<T: ExactInt>(rows: &[&[T]], dim: usize) -> Option<Vec<T>> {
    debug_assert_eq!(rows.len() + 1, dim);
    T::cross(rows, dim)
}

fn cross_generic<T: ExactInt>(rows: &[&[T]], dim: usize) -> Option<Vec<T>> {
    let mut out = Vec::with_capacity(dim);
    let mut minor: Vec<Vec<T>> = vec![Vec::with_capacity(dim - 1); rows.len()];
    for skip in 0..dim {
        for (dst, src) in minor.iter_mut().zip(rows) {
            dst.clear();
            dst.extend(
                src.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != skip)
                    .map(|(_, x)| x.clone()),
            );
        }
        let refs: Vec<&[T]> = minor.iter().map(|r| r.as_slice()).collect();
        let d = det_int(&refs)?;
        out.push(if skip % 2 == 0 { d } else { d.neg()? });
    }
    Some(out)
}

fn dot_sign<T: ExactInt>(a: &[T], b: &[T]) -> Option<i8> {
    let mut acc = T::zero_value();
    for (x, y) in a.iter().zip(b) {
        if x.vanishes() || y.vanishes() {
            continue;
        }
        acc = acc.add(&x.mul(y)?)?;
    }
    Some(acc.signum())
}

/// Cone `{v : E v = 0, S v <= 0}` with an independent basis of `E`
/// selected once, so that many inequality systems can share it.
///
/// A pointed nonzero cone has an extreme ray cut out by the equalities
/// together with some tight inequalities of total rank `dim - 1`; the ray
/// spans the common kernel of an independent selection of those rows. So
/// it suffices to complete the basis of `E` by every subset of `S` of the
/// missing size and check whether the resulting kernel direction (or its
/// negative) satisfies all of `S`. If no subset is independent the kernel
/// of all rows has dimension at least two and the cone is a nonzero
/// subspace. Both orientations are tried, so flipping every inequality
/// does not change whether the cone is trivial.
#[derive(Clone, Debug)]
pub struct RayTester<T> {
    basis: Vec<Vec<T>>,
    dim: usize,
}

/// Extreme rays of a cone, oriented into it. `lineality` is set when the
/// cone contains a line, in which case `rays` is not a generating set.
#[derive(Clone, Debug)]
pub struct RaySet<T> {
    pub rays: Vec<Vec<T>>,
    pub lineality: bool,
}

impl<T: ExactInt> RayTester<T> {
    pub fn new(eq: &[&[T]], dim: usize) -> Option<Self> {
        let mut basis: Vec<&[T]> = Vec::with_capacity(dim);
        for &row in eq {
            if basis.len() == dim {
                break;
            }
            basis.push(row);
            if rank_int(&basis, dim)? < basis.len() {
                basis.pop();
            }
        }
        Some(Self {
            basis: basis.into_iter().map(|r| r.to_vec()).collect(),
            dim,
        })
    }

    /// Rank of the equality system.
    pub fn eq_rank(&self) -> usize {
        self.basis.len()
    }

    fn for_each_direction(
        &self,
        ineq: &[&[T]],
        mut visit: impl FnMut(Vec<T>) -> Option<bool>,
    ) -> Option<bool> {
        let dim = self.dim;
        let t = dim - 1 - self.basis.len();
        let mut idx: Vec<usize> = (0..t).collect();
        let mut rows: Vec<&[T]> = self.basis.iter().map(|r| r.as_slice()).collect();
        let base = rows.len();
        let mut found = false;
        loop {
            rows.truncate(base);
            rows.extend(idx.iter().map(|&i| ineq[i]));
            let r = cross_int(&rows, dim)?;
            if r.iter().any(|x| !x.vanishes()) {
                found = true;
                if visit(r)? {
                    return Some(true);
                }
            }
            if !next_combination(&mut idx, ineq.len()) {
                return Some(found);
            }
        }
    }

    /// Whether the cone contains a nonzero vector.
    pub fn nontrivial(&self, ineq: &[&[T]]) -> Option<bool> {
        let dim = self.dim;
        if self.basis.len() == dim {
            return Some(false);
        }
        if dim - 1 - self.basis.len() > ineq.len() {
            return Some(true);
        }
        let mut hit = false;
        let found = self.for_each_direction(ineq, |r| {
            if orientation(ineq, &r)?.is_some() {
                hit = true;
            }
            Some(hit)
        })?;
        Some(hit || !found)
    }

    /// Extreme rays, deduplicated and oriented so that `S r <= 0`.
    pub fn extreme_rays(&self, ineq: &[&[T]]) -> Option<RaySet<T>> {
        let dim = self.dim;
        if self.basis.len() == dim {
            return Some(RaySet {
                rays: Vec::new(),
                lineality: false,
            });
        }
        if dim - 1 - self.basis.len() > ineq.len() {
            return Some(RaySet {
                rays: Vec::new(),
                lineality: true,
            });
        }
        let mut rays: Vec<Vec<T>> = Vec::new();
        let mut lineality = false;
        let found = self.for_each_direction(ineq, |r| {
            match orientation(ineq, &r)? {
                None => {}
                Some(Orient::Zero) => lineality = true,
                Some(o) => {
                    let r = if o == Orient::Flip {
                        r.iter().map(|x| x.neg()).collect::<Option<Vec<T>>>()?
                    } else {
                        r
                    };
                    let mut dup = false;
                    for q in &rays {
                        if same_direction(q, &r)? {
                            dup = true;
                            break;
                        }
                    }
                    if !dup {
                        rays.push(r);
                    }
                }
            }
            Some(false)
        })?;
        if !found {
            lineality = true;
        }
        Some(RaySet { rays, lineality })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Orient {
    Keep,
    Flip,
    Zero,
}

/// How to orient `r` so that every row of `S` is nonpositive on it, or
/// `None` if neither orientation works.
fn orientation<T: ExactInt>(ineq: &[&[T]], r: &[T]) -> Option<Option<Orient>> {
    let (mut pos, mut neg) = (false, false);
    for s in ineq {
        match dot_sign(s, r)? {
            1 => pos = true,
            -1 => neg = true,
            _ => {}
        }
        if pos && neg {
            return Some(None);
        }
    }
    Some(Some(match (pos, neg) {
        (false, false) => Orient::Zero,
        (true, _) => Orient::Flip,
        _ => Orient::Keep,
    }))
}

/// Positive proportionality of two nonzero vectors.
fn same_direction<T: ExactInt>(a: &[T], b: &[T]) -> Option<bool> {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !a[i].mul(&b[j])?.sub(&a[j].mul(&b[i])?)?.vanishes() {
                return Some(false);
            }
        }
    }
    Some(dot_sign(a, b)? > 0)
}

/// Decides whether `{v : E v = 0, S v <= 0}` contains a nonzero vector;
/// `None` signals fixed-width overflow.
pub fn cone_nontrivial_int<T: ExactInt>(eq: &[&[T]], ineq: &[&[T]], dim: usize) -> Option<bool> {
    if dim == 0 {
        return Some(false);
    }
    RayTester::new(eq, dim)?.nontrivial(ineq)
}

/// Advances `idx` to the next `idx.len()`-subset of `0..n` in lexicographic
/// order; returns false after the last one.
pub fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `cone_nontrivial_int` on big integers, trying `i128` first.
pub fn cone_nontrivial_big(eq: &[Vec<BigInt>], ineq: &[Vec<BigInt>], dim: usize) -> bool {
    let small = |rows: &[Vec<BigInt>]| -> Option<Vec<Vec<i128>>> {
        rows.iter()
            .map(|r| r.iter().map(|x| x.to_i128()).collect())
            .collect()
    };
    if let (Some(e), Some(s)) = (small(eq), small(ineq)) {
        let er: Vec<&[i128]> = e.iter().map(|r| r.as_slice()).collect();
        let sr: Vec<&[i128]> = s.iter().map(|r| r.as_slice()).collect();
        if let Some(ans) = cone_nontrivial_int(&er, &sr, dim) {
            return ans;
        }
    }
    let er: Vec<&[BigInt]> = eq.iter().map(|r| r.as_slice()).collect();
    let sr: Vec<&[BigInt]> = ineq.iter().map(|r| r.as_slice()).collect();
    cone_nontrivial_int(&er, &sr, dim).expect("big integer arithmetic cannot overflow")
}
