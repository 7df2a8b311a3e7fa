//! Weyl tessellations of types A and B generated by a point configuration:
//! the arrangement itself, two general-position checks, and exact
//! enumeration of cones and faces by their combinatorial representatives.
//!
//! Indices are 0-based throughout: `sigma` lists point indices `0..n`.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, stirling, Family, StirlingKind};
use crate::cone::{face_lattice, ConeH};
use crate::error::{Error, Result};
use crate::linalg::{
    det_int, dyadic, kernel_basis, orthogonal_complement, parse_rational, rank, rank_int,
    rational_from_f64, ExactInt, Rational, RationalMatrix, RayTester,
};

/// Random configurations are frozen to the dyadic grid `2^-24`.
pub const QUANT_BITS: u32 = 24;

/// No enumeration may visit more candidates than this.
pub const HARD_CAP: u64 = 10_000_000;

/// Limits on the size of an exact enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_n_a: usize,
    pub max_n_b: usize,
    pub max_candidates: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_n_a: 8,
            max_n_b: 6,
            max_candidates: HARD_CAP,
        }
    }
}

impl Budget {
    /// Lifts the per-family `n` caps and bounds the candidate count only.
    pub fn candidates(max: u64) -> Self {
        Self {
            max_n_a: usize::MAX,
            max_n_b: usize::MAX,
            max_candidates: max.min(HARD_CAP),
        }
    }

    pub fn admit(&self, family: Family, n: usize, candidates: &BigInt) -> Result<()> {
        let cap = match family {
            Family::A => self.max_n_a,
            _ => self.max_n_b,
        };
        if n > cap {
            return Err(Error::Budget(format!("n = {n} exceeds the type-{family} cap {cap}")));
        }
        let limit = self.max_candidates.min(HARD_CAP);
        if *candidates > BigInt::from(limit) {
            return Err(Error::Budget(format!("{candidates} candidates exceed the limit {limit}")));
        }
        Ok(())
    }
}

/// Points `y_1, ..., y_n` in `R^d` with a family tag, stored exactly.
#[derive(Clone, Debug)]
pub struct PointConfig {
    family: Family,
    d: usize,
    points: Vec<Vec<Rational>>,
    ints: IntPoints,
    /// Result of the chainwise check, computed on first use.
    gp: OnceLock<bool>,
}

impl PartialEq for PointConfig {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.d == other.d && self.points == other.points
    }
}

impl PartialEq for IntPoints {
    fn eq(&self, other: &Self) -> bool {
        self.big == other.big
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonNumber {
    Num(f64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    family: Family,
    d: usize,
    points: Vec<Vec<JsonNumber>>,
}

impl PointConfig {
    pub fn new(family: Family, d: usize, points: Vec<Vec<Rational>>) -> Result<Self> {
        if family == Family::Generic {
            return Err(Error::UnsupportedFamily {
                family,
                operation: "PointConfig",
            });
        }
        if d < 2 {
            return Err(Error::OutOfRange(format!("need d >= 2, got {d}")));
        }
        let n = points.len();
        let min_n = if family == Family::A { d + 1 } else { d };
        if n < min_n {
            return Err(Error::OutOfRange(format!(
                "type {family} needs n >= {min_n} for d = {d}, got n = {n}"
            )));
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.len(),
                });
            }
        }
        let ints = IntPoints::from_rational(&points, d);
        Ok(Self {
            family,
            d,
            points,
            ints,
            gp: OnceLock::new(),
        })
    }

    /// Freezes floating-point coordinates to the `2^-24` grid.
    pub fn from_f64(family: Family, d: usize, points: &[Vec<f64>]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|p| p.iter().map(|&x| dyadic(x, QUANT_BITS)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(family, d, pts)
    }

    /// Reads `{"family": "A"|"B", "d": int, "points": [[num or "p/q", ...], ...]}`.
    /// Decimal numbers are taken as the exact value of the parsed double.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ConfigJson = serde_json::from_str(text)?;
        let pts = raw
            .points
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|x| match x {
                        JsonNumber::Num(v) => rational_from_f64(v),
                        JsonNumber::Text(s) => parse_rational(&s),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(raw.family, raw.d, pts)
    }

    /// Exact JSON with every coordinate written as a rational string.
    pub fn to_json(&self) -> String {
        let raw = ConfigJson {
            family: self.family,
            d: self.d,
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|q| JsonNumber::Text(q.to_string())).collect())
                .collect(),
        };
        serde_json::to_string(&raw).expect("config serializes")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    /// The `n x d` matrix with the points as rows.
    pub fn matrix(&self) -> RationalMatrix {
        RationalMatrix::from_rows(self.d, self.points.clone()).expect("points have length d")
    }
}

/// Points scaled by a common positive denominator to integers, with an
/// `i128` copy when the entries are small enough for the fast path.
#[derive(Clone, Debug)]
pub(crate) struct IntPoints {
    big: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i128>>>,
    dim: usize,
}

impl IntPoints {
    fn from_rational(points: &[Vec<Rational>], dim: usize) -> Self {
        let lcm = points
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let big: Vec<Vec<BigInt>> = points
            .iter()
            .map(|p| p.iter().map(|q| q.numer() * (&lcm / q.denom())).collect())
            .collect();
        Self::from_big(big, dim)
    }

    fn from_big(big: Vec<Vec<BigInt>>, dim: usize) -> Self {
        let limit = BigInt::from(1i128 << 62);
        let small = if big.iter().flatten().all(|x| x.magnitude() < limit.magnitude()) {
            Some(
                big.iter()
                    .map(|p| p.iter().map(|x| x.to_i128().expect("bounded")).collect())
                    .collect(),
            )
        } else {
            None
        };
        Self { big, small, dim }
    }
}

/// `sa * y_a - sb * y_b`, or `sa * y_a` alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Lin {
    a: usize,
    sa: i8,
    b: Option<(usize, i8)>,
}

impl Lin {
    fn diff(a: usize, sa: i8, b: usize, sb: i8) -> Self {
        Self {
            a,
            sa,
            b: Some((b, sb)),
        }
    }

    fn single(a: usize, sa: i8) -> Self {
        Self { a, sa, b: None }
    }
}

fn signed<T: ExactInt>(x: &T, s: i8) -> Option<T> {
    if s > 0 {
        Some(x.clone())
    } else {
        x.neg()
    }
}

fn lin_row<T: ExactInt>(pts: &[Vec<T>], l: Lin) -> Option<Vec<T>> {
    match l.b {
        None => pts[l.a].iter().map(|x| signed(x, l.sa)).collect(),
        Some((b, sb)) => pts[l.a]
            .iter()
            .zip(&pts[b])
            .map(|(x, y)| signed(x, l.sa)?.sub(&signed(y, sb)?))
            .collect(),
    }
}

fn lin_rows<T: ExactInt>(pts: &[Vec<T>], ls: &[Lin]) -> Option<Vec<Vec<T>>> {
    ls.iter().map(|&l| lin_row(pts, l)).collect()
}

fn refs<T>(rows: &[Vec<T>]) -> Vec<&[T]> {
    rows.iter().map(|r| r.as_slice()).collect()
}

fn lin_rational(cfg_points: &[Vec<Rational>], l: Lin) -> Vec<Rational> {
    let s = |x: &Rational, sg: i8| if sg > 0 { x.clone() } else { -x.clone() };
    match l.b {
        None => cfg_points[l.a].iter().map(|x| s(x, l.sa)).collect(),
        Some((b, sb)) => cfg_points[l.a]
            .iter()
            .zip(&cfg_points[b])
            .map(|(x, y)| s(x, l.sa) - s(y, sb))
            .collect(),
    }
}

/// Nontriviality tests for cones sharing one equality system. The
/// equality basis is reduced once; `i128` is tried first and `BigInt`
/// takes over on overflow.
struct Tester<'a> {
    pts: &'a IntPoints,
    eq: Vec<Lin>,
    small: Option<RayTester<i128>>,
    big: OnceLock<RayTester<BigInt>>,
}

impl<'a> Tester<'a> {
    fn new(pts: &'a IntPoints, eq: Vec<Lin>) -> Self {
        let small = pts.small.as_ref().and_then(|p| {
            let rows = lin_rows(p, &eq)?;
            RayTester::new(&refs(&rows), pts.dim)
        });
        Self {
            pts,
            eq,
            small,
            big: OnceLock::new(),
        }
    }

    fn big(&self) -> &RayTester<BigInt> {
        self.big.get_or_init(|| {
            let rows = lin_rows(&self.pts.big, &self.eq).expect("big integers do not overflow");
            RayTester::new(&refs(&rows), self.pts.dim).expect("big integers do not overflow")
        })
    }

    fn nontrivial(&self, ineq: &[Lin]) -> bool {
        if let (Some(t), Some(p)) = (&self.small, &self.pts.small) {
            if let Some(rows) = lin_rows(p, ineq) {
                if let Some(ans) = t.nontrivial(&refs(&rows)) {
                    return ans;
                }
            }
        }
        let rows = lin_rows(&self.pts.big, ineq).expect("big integers do not overflow");
        self.big().nontrivial(&refs(&rows)).expect("big integers do not overflow")
    }
}

/// A subspace in the intersection lattice of the reflection arrangement:
/// coordinates are equal (up to the recorded relative signs) within each
/// block and vanish on the zero block. The first element of each block
/// carries sign `+1`; only type B has signs other than `+1` and a zero
/// block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSubspace {
    pub blocks: Vec<Vec<(usize, i8)>>,
    pub zero: Vec<usize>,
}

impl LatticeSubspace {
    pub fn dim(&self) -> usize {
        self.blocks.len()
    }

    /// One spanning vector per block, in `R^n`.
    pub fn basis(&self, n: usize) -> Vec<Vec<BigInt>> {
        self.blocks
            .iter()
            .map(|b| {
                let mut v = vec![BigInt::zero(); n];
                for &(a, s) in b {
                    v[a] = BigInt::from(s);
                }
                v
            })
            .collect()
    }
}

fn signs(family: Family) -> &'static [i8] {
    match family {
        Family::B => &[1, -1],
        _ => &[1],
    }
}

/// All lattice subspaces, or only those of dimension `blocks`.
pub fn lattice_subspaces(family: Family, n: usize, blocks: Option<usize>) -> Vec<LatticeSubspace> {
    fn rec(
        i: usize,
        n: usize,
        family: Family,
        target: Option<usize>,
        cur: &mut LatticeSubspace,
        out: &mut Vec<LatticeSubspace>,
    ) {
        if let Some(m) = target {
            if cur.blocks.len() + (n - i) < m {
                return;
            }
        }
        if i == n {
            if target.is_none_or(|m| cur.blocks.len() == m) {
                out.push(cur.clone());
            }
            return;
        }
        if family == Family::B {
            cur.zero.push(i);
            rec(i + 1, n, family, target, cur, out);
            cur.zero.pop();
        }
        for b in 0..cur.blocks.len() {
            for &s in signs(family) {
                cur.blocks[b].push((i, s));
                rec(i + 1, n, family, target, cur, out);
                cur.blocks[b].pop();
            }
        }
        if target.is_none_or(|m| cur.blocks.len() < m) {
            cur.blocks.push(vec![(i, 1)]);
            rec(i + 1, n, family, target, cur, out);
            cur.blocks.pop();
        }
    }
    let mut out = Vec::new();
    let mut cur = LatticeSubspace {
        blocks: Vec::new(),
        zero: Vec::new(),
    };
    rec(0, n, family, blocks, &mut cur, &mut out);
    out
}

/// Number of lattice subspaces of each dimension `0..=n`.
pub fn lattice_census(family: Family, n: usize) -> Vec<usize> {
    let mut counts = vec![0; n + 1];
    for s in lattice_subspaces(family, n, None) {
        counts[s.dim()] += 1;
    }
    counts
}

/// A signed ordering `(eps, sigma)`; for type A every sign is `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedOrdering {
    pub eps: Vec<i8>,
    pub sigma: Vec<usize>,
}

impl SignedOrdering {
    fn chain(&self, family: Family) -> Vec<Lin> {
        let n = self.sigma.len();
        let mut rows: Vec<Lin> = (0..n.saturating_sub(1))
            .map(|i| Lin::diff(self.sigma[i], self.eps[i], self.sigma[i + 1], self.eps[i + 1]))
            .collect();
        if family == Family::B && n > 0 {
            rows.push(Lin::single(self.sigma[n - 1], self.eps[n - 1]));
        }
        rows
    }
}

/// Canonical representative of a tessellation face: the ordering `sigma`
/// split into consecutive groups at `breaks`. Type A stores `n - d + k - 1`
/// breaks and no signs. Type B stores `n - d + k` breaks, the last one
/// ending the nonzero groups, and signs with the trailing zero group fixed
/// to `+1`. Elements are sorted within each group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FaceRep {
    pub family: Family,
    pub sigma: Vec<usize>,
    pub eps: Vec<i8>,
    pub breaks: Vec<usize>,
}

impl FaceRep {
    /// Normalizes an arbitrary `(sigma, eps, breaks)` triple.
    pub fn canonical(family: Family, sigma: Vec<usize>, eps: Vec<i8>, breaks: Vec<usize>) -> Result<Self> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(Error::Invalid("sigma is not a permutation".into()));
            }
            seen[s] = true;
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) || breaks.first() == Some(&0) {
            return Err(Error::Invalid("breaks must be strictly increasing and positive".into()));
        }
        let last_ok = match family {
            Family::A => breaks.last().is_none_or(|&l| l < n),
            _ => breaks.last().is_some_and(|&l| l <= n),
        };
        if !last_ok {
            return Err(Error::Invalid("break index out of range".into()));
        }
        let eps = match family {
            Family::A => vec![1; n],
            _ if eps.len() == n => eps,
            _ => return Err(Error::Invalid("type B needs one sign per point".into())),
        };
        let mut bounds = breaks.clone();
        if family == Family::A {
            bounds.push(n);
        }
        let mut out_sigma = Vec::with_capacity(n);
        let mut out_eps = Vec::with_capacity(n);
        let mut start = 0;
        for &end in &bounds {
            let mut group: Vec<(usize, i8)> = (start..end).map(|i| (sigma[i], eps[i])).collect();
            group.sort();
            for (a, s) in group {
                out_sigma.push(a);
                out_eps.push(s);
            }
            start = end;
        }
        let mut zero: Vec<usize> = sigma[start..].to_vec();
        zero.sort();
        out_sigma.extend(&zero);
        out_eps.extend(std::iter::repeat_n(1, zero.len()));
        if family == Family::A {
            out_eps.clear();
        }
        Ok(Self {
            family,
            sigma: out_sigma,
            eps: out_eps,
            breaks,
        })
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    fn bounds(&self) -> Vec<usize> {
        let mut b = self.breaks.clone();
        if self.family == Family::A {
            b.push(self.n());
        }
        b
    }

    fn sign(&self, i: usize) -> i8 {
        if self.family == Family::A {
            1
        } else {
            self.eps[i]
        }
    }

    /// Nonzero groups in order.
    pub fn groups(&self) -> Vec<&[usize]> {
        let mut start = 0;
        self.bounds()
            .into_iter()
            .map(|end| {
                let g = &self.sigma[start..end];
                start = end;
                g
            })
            .collect()
    }

    /// The group forced to zero (always empty for type A).
    pub fn zero_group(&self) -> &[usize] {
        let end = self.bounds().last().copied().unwrap_or(0);
        &self.sigma[end..]
    }

    /// Face dimension in a tessellation of `R^d`.
    pub fn dim(&self, d: usize) -> usize {
        self.groups().len() + d - self.n()
    }

    fn lins(&self) -> (Vec<Lin>, Vec<Lin>) {
        let mut eq = Vec::new();
        let mut ineq = Vec::new();
        let bounds = self.bounds();
        let end = *bounds.last().unwrap_or(&0);
        for i in 0..end.saturating_sub(1) {
            let row = Lin::diff(self.sigma[i], self.sign(i), self.sigma[i + 1], self.sign(i + 1));
            if bounds.contains(&(i + 1)) {
                ineq.push(row);
            } else {
                eq.push(row);
            }
        }
        if self.family == Family::B && end > 0 {
            ineq.push(Lin::single(self.sigma[end - 1], self.sign(end - 1)));
        }
        for &z in self.zero_group() {
            eq.push(Lin::single(z, 1));
        }
        (eq, ineq)
    }
}

/// Number of tessellation cones containing the face: the product of the
/// group-size factorials, times `2^z` for a type-B zero group of size `z`.
pub fn face_multiplicity(rep: &FaceRep, n: usize) -> BigInt {
    debug_assert_eq!(rep.n(), n);
    let mut m: BigInt = rep.groups().iter().map(|g| factorial(g.len())).product();
    let z = rep.zero_group().len();
    if rep.family == Family::B {
        m *= factorial(z) << z;
    }
    m
}

/// `{ eps_i <v, y_sigma(i)> } nondecreasing`, capped at 0 for type B.
pub fn cone_of(cfg: &PointConfig, ord: &SignedOrdering) -> ConeH {
    let rows: Vec<Vec<Rational>> = ord.chain(cfg.family).into_iter().map(|l| lin_rational(&cfg.points, l)).collect();
    ConeH::from_ineq(RationalMatrix::from_rows(cfg.d, rows).expect("rows have length d"))
}

/// The face as an H-cone: equal values within groups, nondecreasing
/// between groups, and (type B) the last group nonpositive and the zero
/// group vanishing.
pub fn face_cone(cfg: &PointConfig, rep: &FaceRep) -> ConeH {
    let (eq, ineq) = rep.lins();
    let to = |ls: Vec<Lin>| {
        RationalMatrix::from_rows(cfg.d, ls.into_iter().map(|l| lin_rational(&cfg.points, l)).collect())
            .expect("rows have length d")
    };
    ConeH::new(cfg.d, to(eq), to(ineq)).expect("consistent widths")
}

/// The face of the Weyl chamber in `R^n` with the same representative.
pub fn chamber_face_cone(rep: &FaceRep) -> ConeH {
    let n = rep.n();
    let unit: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| Rational::from_integer(BigInt::from((i == j) as i64))).collect())
        .collect();
    let (eq, ineq) = rep.lins();
    let to = |ls: Vec<Lin>| {
        RationalMatrix::from_rows(n, ls.into_iter().map(|l| lin_rational(&unit, l)).collect()).expect("rows have length n")
    };
    ConeH::new(n, to(eq), to(ineq)).expect("consistent widths")
}

/// The hyperplane normals: `y_i - y_j` for type A; additionally `y_i + y_j`
/// and `y_i` for type B. Fails on a zero normal or two proportional ones.
pub fn build_arrangement(cfg: &PointConfig) -> Result<Vec<Vec<Rational>>> {
    let n = cfg.n();
    let mut normals = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            normals.push(lin_rational(&cfg.points, Lin::diff(i, 1, j, 1)));
            if cfg.family == Family::B {
                normals.push(lin_rational(&cfg.points, Lin::diff(i, 1, j, -1)));
            }
        }
    }
    if cfg.family == Family::B {
        for i in 0..n {
            normals.push(cfg.points[i].clone());
        }
    }
    for (i, u) in normals.iter().enumerate() {
        if u.iter().all(Zero::is_zero) {
            return Err(Error::GeneralPosition(format!("normal {i} vanishes")));
        }
        for (j, v) in normals.iter().enumerate().skip(i + 1) {
            let m = RationalMatrix::from_rows(cfg.d, vec![u.clone(), v.clone()])?;
            if rank(&m) < 2 {
                return Err(Error::GeneralPosition(format!("normals {i} and {j} are proportional")));
            }
        }
    }
    Ok(normals)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Index of the line spanned by a chain vector; opposite vectors share it.
fn line_id(l: Lin, n: usize) -> usize {
    match l.b {
        None => 2 * n * n + l.a,
        Some((b, sb)) => {
            let (lo, hi) = (l.a.min(b), l.a.max(b));
            (lo * n + hi) * 2 + usize::from(l.sa != sb)
        }
    }
}

/// Sorted line indices of every `d`-subset of every chain starting at
/// `first`, or `None` when some chain is too short.
fn chain_line_sets(n: usize, family: Family, d: usize, first: usize) -> Option<HashSet<Vec<usize>>> {
    let mut sets = HashSet::new();
    let mut rest: Vec<usize> = (0..n).filter(|&x| x != first).collect();
    let mut idx: Vec<usize> = Vec::with_capacity(d);
    loop {
        let mut sigma = vec![first];
        sigma.extend(&rest);
        let skip = family == Family::A && sigma[0] > sigma[n - 1];
        if !skip {
            let sign_patterns = if family == Family::B { 1u64 << (n - 1) } else { 1 };
            for mask in 0..sign_patterns {
                let eps: Vec<i8> = (0..n)
                    .map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1 } else { 1 })
                    .collect();
                let chain = SignedOrdering { eps, sigma: sigma.clone() }.chain(family);
                if chain.len() < d {
                    return None;
                }
                idx.clear();
                idx.extend(0..d);
                loop {
                    let mut key: Vec<usize> = idx.iter().map(|&i| line_id(chain[i], n)).collect();
                    key.sort_unstable();
                    sets.insert(key);
                    if !crate::linalg::next_combination(&mut idx, chain.len()) {
                        break;
                    }
                }
            }
        }
        if !next_permutation(&mut rest) {
            return Some(sets);
        }
    }
}

/// The row spanning line `id` (see [`line_id`]).
fn line_row<T: ExactInt>(pts: &[Vec<T>], id: usize) -> Option<Vec<T>> {
    let n = pts.len();
    let l = if id >= 2 * n * n {
        Lin::single(id - 2 * n * n, 1)
    } else {
        let (pair, flip) = (id / 2, id % 2 == 1);
        Lin::diff(pair / n, 1, pair % n, if flip { -1 } else { 1 })
    };
    lin_row(pts, l)
}

/// Every `d` chain vectors along every signed ordering are independent.
/// Reversal (type A) and a global sign flip (type B) map chains to
/// negated chains, so one representative of each pair is checked. Chains
/// share most of their lines, so the distinct `d`-sets of lines are
/// collected first and each determinant is taken once. The answer is
/// cached in the configuration.
pub fn check_gp_chainwise(cfg: &PointConfig) -> bool {
    *cfg.gp.get_or_init(|| {
        let (n, d, family) = (cfg.n(), cfg.d, cfg.family);
        let per_first: Option<Vec<HashSet<Vec<usize>>>> = (0..n)
            .into_par_iter()
            .map(|first| chain_line_sets(n, family, d, first))
            .collect();
        let Some(per_first) = per_first else {
            return false;
        };
        let mut sets: Vec<Vec<usize>> = per_first.into_iter().flatten().collect();
        sets.sort_unstable();
        sets.dedup();
        let rows = |pts: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
            (0..2 * n * n + n).map(|id| line_row(pts, id).expect("no overflow")).collect()
        };
        let small: Option<Vec<Vec<i128>>> = cfg
            .ints
            .small
            .as_ref()
            .and_then(|p| (0..2 * n * n + n).map(|id| line_row(p, id)).collect());
        let big = OnceLock::new();
        sets.par_iter().all(|key| {
            if let Some(rows) = &small {
                let sel: Vec<&[i128]> = key.iter().map(|&id| rows[id].as_slice()).collect();
                if let Some(det) = det_int(&sel) {
                    return !det.vanishes();
                }
            }
            let rows = big.get_or_init(|| rows(&cfg.ints.big));
            let sel: Vec<&[BigInt]> = key.iter().map(|&id| rows[id].as_slice()).collect();
            !det_int(&sel).expect("no overflow").vanishes()
        })
    })
}

fn rank_big(rows: &[Vec<BigInt>], cols: usize) -> usize {
    let small: Option<Vec<Vec<i128>>> = rows.iter().map(|r| r.iter().map(|x| x.to_i128()).collect()).collect();
    if let Some(s) = small {
        if let Some(r) = rank_int(&refs(&s), cols) {
            return r;
        }
    }
    rank_int(&refs(rows), cols).expect("no overflow")
}

/// `L^⊥` has dimension `d` and meets every lattice subspace `K` of the
/// reflection arrangement in the generic dimension `max(0, dim K + d - n)`,
/// where `L = {beta : sum beta_i y_i = 0}`.
pub fn check_gp_lattice(cfg: &PointConfig) -> bool {
    let (n, d) = (cfg.n(), cfg.d);
    let l = kernel_basis(&cfg.matrix().transpose());
    let lperp = orthogonal_complement(&l);
    if lperp.ncols() != d {
        return false;
    }
    let lperp_rows = lperp.transpose().integer_rows();
    lattice_subspaces(cfg.family, n, None).par_iter().all(|k| {
        let mut rows = k.basis(n);
        rows.extend(lperp_rows.iter().cloned());
        let meet = k.dim() + d - rank_big(&rows, n);
        meet == (k.dim() + d).saturating_sub(n)
    })
}

fn candidate_count(family: Family, n: usize, m: usize) -> BigInt {
    match family {
        Family::A => stirling(StirlingKind::SecondA, n, m as i64) * factorial(m),
        _ => (stirling(StirlingKind::SecondB, n, m as i64) * factorial(m)) << m,
    }
}

struct Search<'a> {
    family: Family,
    sub: &'a LatticeSubspace,
    tester: Tester<'a>,
}

impl Search<'_> {
    fn block_lin(&self, j: usize, tau: i8) -> (usize, i8) {
        (self.sub.blocks[j][0].0, tau)
    }

    /// Blocks are placed from the last position backwards, so every new
    /// row only involves blocks already placed and a trivial partial cone
    /// prunes the whole subtree.
    fn dfs(&self, used: u64, placed: &mut Vec<(usize, i8)>, rows: &mut Vec<Lin>, out: &mut Vec<Vec<(usize, i8)>>) {
        let m = self.sub.blocks.len();
        if placed.len() == m {
            out.push(placed.clone());
            return;
        }
        let &(right, rtau) = placed.last().expect("dfs starts with one block placed");
        let (rb, rs) = self.block_lin(right, rtau);
        for j in 0..m {
            if used >> j & 1 == 1 {
                continue;
            }
            for &tau in signs(self.family) {
                let (a, s) = self.block_lin(j, tau);
                rows.push(Lin::diff(a, s, rb, rs));
                if self.tester.nontrivial(rows) {
                    placed.push((j, tau));
                    self.dfs(used | 1 << j, placed, rows, out);
                    placed.pop();
                }
                rows.pop();
            }
        }
    }

    fn run_from(&self, j: usize, tau: i8) -> Vec<Vec<(usize, i8)>> {
        let mut rows = Vec::new();
        if self.family == Family::B {
            let (a, s) = self.block_lin(j, tau);
            rows.push(Lin::single(a, s));
            if !self.tester.nontrivial(&rows) {
                return Vec::new();
            }
        } else if self.sub.blocks.len() == 1 && !self.tester.nontrivial(&[]) {
            return Vec::new();
        }
        let mut out = Vec::new();
        self.dfs(1 << j, &mut vec![(j, tau)], &mut rows, &mut out);
        out
    }

    fn rep(&self, placed: &[(usize, i8)]) -> FaceRep {
        let mut sigma = Vec::new();
        let mut eps = Vec::new();
        let mut breaks = Vec::new();
        for &(j, tau) in placed.iter().rev() {
            let mut block: Vec<(usize, i8)> = self.sub.blocks[j].iter().map(|&(a, s)| (a, s * tau)).collect();
            block.sort();
            for (a, s) in block {
                sigma.push(a);
                eps.push(s);
            }
            breaks.push(sigma.len());
        }
        let mut zero = self.sub.zero.clone();
        zero.sort();
        for z in zero {
            sigma.push(z);
            eps.push(1);
        }
        if self.family == Family::A {
            breaks.pop();
            eps.clear();
        }
        FaceRep {
            family: self.family,
            sigma,
            eps,
            breaks,
        }
    }
}

fn subspace_eq(sub: &LatticeSubspace) -> Vec<Lin> {
    let mut eq = Vec::new();
    for b in &sub.blocks {
        for w in b.windows(2) {
            eq.push(Lin::diff(w[0].0, w[0].1, w[1].0, w[1].1));
        }
    }
    for &z in &sub.zero {
        eq.push(Lin::single(z, 1));
    }
    eq
}

/// All representatives with `m` nonzero groups whose cone is not `{0}`,
/// in a deterministic order that does not depend on the thread count.
fn reps_with_groups(pts: &IntPoints, family: Family, m: usize) -> Vec<FaceRep> {
    let n = pts.big.len();
    if m == 0 || m > n {
        return Vec::new();
    }
    let subs = lattice_subspaces(family, n, Some(m));
    let tasks: Vec<(usize, usize, i8)> = (0..subs.len())
        .flat_map(|s| (0..m).flat_map(move |j| signs(family).iter().map(move |&t| (s, j, t))))
        .collect();
    let searches: Vec<Search> = subs
        .par_iter()
        .map(|sub| Search {
            family,
            sub,
            tester: Tester::new(pts, subspace_eq(sub)),
        })
        .collect();
    let chunks: Vec<Vec<FaceRep>> = tasks
        .par_iter()
        .map(|&(s, j, t)| {
            let search = &searches[s];
            search.run_from(j, t).iter().map(|p| search.rep(p)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// The signed orderings whose cones are not `{0}`; these are exactly the
/// cones of the tessellation. Sorted lexicographically by `(eps, sigma)`.
pub fn enumerate_cones(cfg: &PointConfig, budget: &Budget) -> Result<Vec<SignedOrdering>> {
    let n = cfg.n();
    budget.admit(cfg.family, n, &candidate_count(cfg.family, n, n))?;
    require_gp(cfg)?;
    let mut cones: Vec<SignedOrdering> = reps_with_groups(&cfg.ints, cfg.family, n)
        .into_iter()
        .map(|r| SignedOrdering {
            eps: if cfg.family == Family::A { vec![1; n] } else { r.eps },
            sigma: r.sigma,
        })
        .collect();
    cones.sort();
    Ok(cones)
}

fn require_gp(cfg: &PointConfig) -> Result<()> {
    if check_gp_chainwise(cfg) {
        Ok(())
    } else {
        Err(Error::GeneralPosition("chain vectors are not in general position".into()))
    }
}

/// Canonical representatives of all `k`-faces.
pub fn enumerate_faces(cfg: &PointConfig, k: usize, budget: &Budget) -> Result<Vec<FaceRep>> {
    let (n, d) = (cfg.n(), cfg.d);
    if !(1..=d).contains(&k) {
        return Err(Error::OutOfRange(format!("need 1 <= k <= d, got k = {k}")));
    }
    let m = n - d + k;
    budget.admit(cfg.family, n, &candidate_count(cfg.family, n, m))?;
    require_gp(cfg)?;
    let mut faces = reps_with_groups(&cfg.ints, cfg.family, m);
    faces.sort();
    Ok(faces)
}

/// Sum over `k`-faces of the number of cones containing each, from the
/// face list and the multiplicity formula.
pub fn incidence_sum(cfg: &PointConfig, k: usize, budget: &Budget) -> Result<BigInt> {
    Ok(enumerate_faces(cfg, k, budget)?
        .iter()
        .map(|r| face_multiplicity(r, cfg.n()))
        .sum())
}

/// For each `k` in `0..=d`, every face representative met while walking
/// the faces of every cone, with the number of cones it was met in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConeFaceTally {
    pub per_k: Vec<BTreeMap<FaceRep, u64>>,
}

impl ConeFaceTally {
    pub fn incidence(&self, k: usize) -> u64 {
        self.per_k[k].values().sum()
    }
}

fn faces_of_cone<T: ExactInt>(pts: &[Vec<T>], chain: &[Lin], d: usize) -> Option<Vec<(u32, usize)>> {
    let rows = lin_rows(pts, chain)?;
    let r = refs(&rows);
    let rays = RayTester::new(&[], d)?.extreme_rays(&r)?;
    assert!(!rays.lineality, "tessellation cones are pointed");
    face_lattice(&r, &rays.rays, d)
}

/// Turns the tight rows of a face of the cone `ord` into the face's
/// representative: tight chain rows glue neighbours into one group, and a
/// tight final row of type B sends the last group to zero.
fn rep_from_tight(family: Family, ord: &SignedOrdering, tight: u32) -> FaceRep {
    let n = ord.sigma.len();
    let mut breaks: Vec<usize> = (0..n - 1).filter(|&i| tight >> i & 1 == 0).map(|i| i + 1).collect();
    if family == Family::B && tight >> (n - 1) & 1 == 0 {
        breaks.push(n);
    }
    FaceRep::canonical(family, ord.sigma.clone(), ord.eps.clone(), breaks).expect("valid by construction")
}

/// Second, independent route to the incidences: compute the face lattice
/// of every cone from its extreme rays and name each face by its tight
/// rows.
pub fn tally_cone_faces(cfg: &PointConfig, budget: &Budget) -> Result<ConeFaceTally> {
    let d = cfg.d;
    let cones = enumerate_cones(cfg, budget)?;
    let per_cone: Vec<Vec<(usize, FaceRep)>> = cones
        .par_iter()
        .map(|ord| {
            let chain = ord.chain(cfg.family);
            let lattice = cfg
                .ints
                .small
                .as_ref()
                .and_then(|p| faces_of_cone(p, &chain, d))
                .unwrap_or_else(|| faces_of_cone(&cfg.ints.big, &chain, d).expect("no overflow"));
            lattice
                .into_iter()
                .filter(|&(_, k)| k >= 1)
                .map(|(mask, k)| (k, rep_from_tight(cfg.family, ord, mask)))
                .collect()
        })
        .collect();
    let mut tally = ConeFaceTally {
        per_k: vec![BTreeMap::new(); d + 1],
    };
    for faces in per_cone {
        for (k, rep) in faces {
            *tally.per_k[k].entry(rep).or_insert(0) += 1;
        }
    }
    Ok(tally)
}

/// Pairs (chamber, `k`-face of it) of the reflection arrangement in `R^n`
/// whose face meets `span(U)` in more than the origin. Each canonical
/// chamber-face representative is tested once, in the coordinates of `U`,
/// and weighted by the number of chambers containing it.
pub fn chamber_faces_meeting_subspace(family: Family, n: usize, k: usize, u: &RationalMatrix, budget: &Budget) -> Result<BigInt> {
    if family == Family::Generic {
        return Err(Error::UnsupportedFamily {
            family,
            operation: "chamber_faces_meeting_subspace",
        });
    }
    if u.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.nrows(),
        });
    }
    if !(1..=n).contains(&k) {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n, got k = {k}")));
    }
    let d = u.ncols();
    if d == 0 || rank(u) != d {
        return Err(Error::Invalid("U must have independent columns".into()));
    }
    budget.admit(family, n, &candidate_count(family, n, k))?;
    let rows: Vec<Vec<Rational>> = u.rows_iter().map(|r| r.to_vec()).collect();
    let pts = IntPoints::from_rational(&rows, d);
    Ok(reps_with_groups(&pts, family, k)
        .iter()
        .map(|r| face_multiplicity(r, n))
        .sum())
}

/// Cone count, face counts and incidence sums of one configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TessellationSummary {
    pub cone_count: usize,
    /// Indexed by `k - 1`.
    pub face_counts: Vec<usize>,
    /// Indexed by `k - 1`.
    pub incidence_sums: Vec<BigInt>,
}

pub fn summarize(cfg: &PointConfig, budget: &Budget) -> Result<TessellationSummary> {
    let cone_count = enumerate_cones(cfg, budget)?.len();
    let mut face_counts = Vec::new();
    let mut incidence_sums = Vec::new();
    for k in 1..=cfg.d {
        let faces = enumerate_faces(cfg, k, budget)?;
        face_counts.push(faces.len());
        incidence_sums.push(faces.iter().map(|r| face_multiplicity(r, cfg.n())).sum());
    }
    Ok(TessellationSummary {
        cone_count,
        face_counts,
        incidence_sums,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{region_count, total_face_count};
    use crate::cone::{cone_dim, contains_relint, is_zero_cone, lineality_dim};
    use crate::linalg::{feasible_strict, rat};
    use crate::rng::{PointDistribution, RngSpec};

    fn cfg_i(family: Family, d: usize, pts: &[&[i64]]) -> PointConfig {
        PointConfig::new(family, d, pts.iter().map(|p| p.iter().map(|&x| rat(x)).collect()).collect()).unwrap()
    }

    fn random_cfg(family: Family, n: usize, d: usize, seed: u64) -> PointConfig {
        let mut s = RngSpec::new(seed, 0).stream();
        let pts: Vec<Vec<f64>> = (0..n).map(|_| PointDistribution::Gaussian.draw(&mut s, d)).collect();
        PointConfig::from_f64(family, d, &pts).unwrap()
    }

    #[test]
    fn arrangement_examples() {
        let c = cfg_i(Family::A, 2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(build_arrangement(&c).unwrap().len(), 3);
        let b = cfg_i(Family::B, 2, &[&[1, 2], &[3, -1]]);
        assert_eq!(build_arrangement(&b).unwrap().len(), 4);
        let bad = cfg_i(Family::A, 2, &[&[1, 0], &[1, 0], &[1, 1]]);
        assert!(matches!(build_arrangement(&bad), Err(Error::GeneralPosition(_))));
    }

    #[test]
    fn gp_examples() {
        let good = cfg_i(Family::A, 2, &[&[1, 0], &[0, 1], &[1, 1]]);
        assert!(check_gp_chainwise(&good));
        assert!(check_gp_lattice(&good));
        let collinear = cfg_i(Family::A, 2, &[&[1, 0], &[0, 1], &[2, -1]]);
        assert!(!check_gp_chainwise(&collinear));
        assert!(!check_gp_lattice(&collinear));
        let antipodal = cfg_i(Family::B, 2, &[&[1, 0], &[-1, 0]]);
        assert!(!check_gp_chainwise(&antipodal));
        assert!(!check_gp_lattice(&antipodal));
    }

    #[test]
    fn lattice_census_matches_stirling() {
        let b = lattice_census(Family::B, 3);
        for (k, &c) in b.iter().enumerate() {
            assert_eq!(BigInt::from(c), stirling(StirlingKind::SecondB, 3, k as i64));
        }
        assert_eq!(lattice_census(Family::A, 4)[2], 7);
    }

    #[test]
    fn small_enumerations() {
        let budget = Budget::default();
        let a3 = random_cfg(Family::A, 3, 2, 1);
        assert_eq!(enumerate_cones(&a3, &budget).unwrap().len(), 6);
        assert_eq!(enumerate_faces(&a3, 1, &budget).unwrap().len(), 6);
        let a4 = random_cfg(Family::A, 4, 2, 2);
        assert_eq!(enumerate_cones(&a4, &budget).unwrap().len(), 12);
        let b2 = random_cfg(Family::B, 2, 2, 3);
        assert_eq!(enumerate_cones(&b2, &budget).unwrap().len(), 8);
        assert_eq!(enumerate_faces(&b2, 1, &budget).unwrap().len(), 8);
        let faces = enumerate_faces(&a3, 2, &budget).unwrap();
        let cones = enumerate_cones(&a3, &budget).unwrap();
        let as_reps: Vec<Vec<usize>> = cones.iter().map(|c| c.sigma.clone()).collect();
        let mut face_sigmas: Vec<Vec<usize>> = faces.iter().map(|f| f.sigma.clone()).collect();
        face_sigmas.sort();
        assert_eq!(face_sigmas, as_reps);
        assert_eq!(incidence_sum(&a3, 1, &budget).unwrap(), BigInt::from(12));
        assert_eq!(incidence_sum(&a3, 2, &budget).unwrap(), BigInt::from(6));
        assert_eq!(incidence_sum(&b2, 1, &budget).unwrap(), BigInt::from(16));
    }

    #[test]
    fn counts_match_formulas_on_a_small_grid() {
        let budget = Budget::default();
        for (family, n, d) in [(Family::A, 4, 3), (Family::A, 5, 2), (Family::B, 3, 2), (Family::B, 3, 3), (Family::B, 4, 3)] {
            for seed in 0..3 {
                let cfg = random_cfg(family, n, d, 100 + seed);
                let cones = enumerate_cones(&cfg, &budget).unwrap();
                assert_eq!(BigInt::from(cones.len()), region_count(family, n, d));
                for k in 1..=d {
                    let faces = enumerate_faces(&cfg, k, &budget).unwrap();
                    assert_eq!(BigInt::from(faces.len()), total_face_count(family, n, d, k).unwrap());
                }
            }
        }
    }

    #[test]
    fn simplex_oracle_agrees_on_cones() {
        let budget = Budget::default();
        for (family, n, d) in [(Family::A, 4, 2), (Family::B, 3, 2), (Family::A, 4, 3)] {
            let cfg = random_cfg(family, n, d, 7);
            let found = enumerate_cones(&cfg, &budget).unwrap();
            let mut oracle = Vec::new();
            let mut sigma: Vec<usize> = (0..n).collect();
            loop {
                let patterns = if family == Family::B { 1u32 << n } else { 1 };
                for mask in 0..patterns {
                    let eps: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
                    let ord = SignedOrdering { eps, sigma: sigma.clone() };
                    let cone = cone_of(&cfg, &ord);
                    // the cone is full-dimensional iff its open interior is nonempty
                    let s = cone.ineq_rows();
                    let mut neg = s.clone();
                    for i in 0..neg.nrows() {
                        for j in 0..neg.ncols() {
                            neg[(i, j)] = -s[(i, j)].clone();
                        }
                    }
                    if feasible_strict(&RationalMatrix::zeros(0, d), &neg) {
                        oracle.push(ord);
                    }
                }
                if !next_permutation(&mut sigma) {
                    break;
                }
            }
            oracle.sort();
            assert_eq!(found, oracle);
        }
    }

    #[test]
    fn cones_are_pointed_and_tile() {
        let budget = Budget::default();
        let cfg = random_cfg(Family::B, 3, 2, 11);
        let cones = enumerate_cones(&cfg, &budget).unwrap();
        for c in &cones {
            let h = cone_of(&cfg, c);
            assert_eq!(cone_dim(&h), 2);
            assert_eq!(lineality_dim(&h), 0);
        }
        let mut s = RngSpec::new(5, 0).stream();
        for _ in 0..20 {
            let p: Vec<Rational> = s.gaussian_vec(2).into_iter().map(|x| dyadic(x, 20).unwrap()).collect();
            let hits = cones.iter().filter(|c| contains_relint(&cone_of(&cfg, c), &p).unwrap()).count();
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn multiplicity_examples() {
        // groups of sizes 2, 1, 2 and a zero group of size 2
        let rep = FaceRep::canonical(Family::B, vec![0, 1, 2, 3, 4, 5, 6], vec![1; 7], vec![2, 3, 5]).unwrap();
        assert_eq!(face_multiplicity(&rep, 7), BigInt::from(32));
        let chamber = FaceRep::canonical(Family::A, vec![2, 0, 1], vec![], vec![1, 2]).unwrap();
        assert_eq!(face_multiplicity(&chamber, 3), BigInt::one());
        let ray = FaceRep::canonical(Family::B, vec![0, 1], vec![1, 1], vec![1]).unwrap();
        assert_eq!(face_multiplicity(&ray, 2), BigInt::from(2));
    }

    #[test]
    fn face_cone_shapes() {
        let cfg = random_cfg(Family::B, 7, 6, 3);
        let rep = FaceRep::canonical(Family::B, (0..7).collect(), vec![1; 7], vec![2, 3, 5]).unwrap();
        let c = face_cone(&cfg, &rep);
        assert_eq!(c.ineq_rows().nrows(), 3);
        assert_eq!(c.eq_rows().nrows(), 4);
        assert_eq!(c.ambient_dim(), 6);
        let a = random_cfg(Family::A, 4, 3, 3);
        let top = FaceRep::canonical(Family::A, (0..4).collect(), vec![], vec![1, 2, 3]).unwrap();
        let c = face_cone(&a, &top);
        assert_eq!((c.eq_rows().nrows(), c.ineq_rows().nrows()), (0, 3));
    }

    #[test]
    fn canonical_form_clears_zero_group_signs() {
        let r = FaceRep::canonical(Family::B, vec![2, 0, 1], vec![-1, 1, -1], vec![1]).unwrap();
        assert_eq!(r.sigma, vec![2, 0, 1]);
        assert_eq!(r.eps, vec![-1, 1, 1]);
        assert_eq!(r.zero_group(), &[0, 1]);
    }

    #[test]
    fn both_incidence_routes_agree() {
        let budget = Budget::default();
        for (family, n, d) in [(Family::A, 4, 3), (Family::B, 3, 2), (Family::B, 4, 3)] {
            let cfg = random_cfg(family, n, d, 21);
            let tally = tally_cone_faces(&cfg, &budget).unwrap();
            for k in 1..=d {
                let faces = enumerate_faces(&cfg, k, &budget).unwrap();
                let from_faces: BigInt = faces.iter().map(|r| face_multiplicity(r, n)).sum();
                assert_eq!(BigInt::from(tally.incidence(k)), from_faces);
                assert_eq!(tally.per_k[k].len(), faces.len());
                for f in &faces {
                    assert_eq!(BigInt::from(tally.per_k[k][f]), face_multiplicity(f, n));
                }
            }
        }
    }

    #[test]
    fn chamber_lemma_on_candidates() {
        for (family, n, d) in [(Family::A, 4, 2), (Family::B, 3, 2), (Family::A, 5, 3)] {
            let cfg = random_cfg(family, n, d, 33);
            let l = kernel_basis(&cfg.matrix().transpose());
            let lperp = orthogonal_complement(&l);
            for k in 1..=d {
                let m = n - d + k;
                for sub in lattice_subspaces(family, n, Some(m)).iter().take(6) {
                    let search = Search {
                        family,
                        sub,
                        tester: Tester::new(&cfg.ints, subspace_eq(sub)),
                    };
                    let placed: Vec<(usize, i8)> = (0..m).map(|j| (j, 1)).collect();
                    let rep = search.rep(&placed);
                    let zero = is_zero_cone(&face_cone(&cfg, &rep));
                    let meets = crate::cone::meets_subspace_nontrivially(&chamber_face_cone(&rep), &lperp).unwrap();
                    assert_eq!(zero, !meets, "{rep:?}");
                }
            }
        }
    }

    #[test]
    fn chamber_counts() {
        let budget = Budget::default();
        let mut s = RngSpec::new(9, 0).stream();
        let mut random_u = |n: usize, d: usize| {
            let cols: Vec<Vec<Rational>> = (0..d)
                .map(|_| s.gaussian_vec(n).into_iter().map(|x| dyadic(x, 16).unwrap()).collect())
                .collect();
            RationalMatrix::from_columns(n, cols).unwrap()
        };
        let u = random_u(3, 2);
        assert_eq!(chamber_faces_meeting_subspace(Family::B, 3, 2, &u, &budget).unwrap(), BigInt::from(36));
        assert_eq!(chamber_faces_meeting_subspace(Family::A, 3, 2, &u, &budget).unwrap(), BigInt::from(12));
        let full = RationalMatrix::identity(3);
        assert_eq!(chamber_faces_meeting_subspace(Family::B, 3, 3, &full, &budget).unwrap(), BigInt::from(48));
    }

    #[test]
    fn budget_and_preconditions() {
        let budget = Budget::default();
        let big = random_cfg(Family::B, 7, 2, 1);
        assert!(matches!(enumerate_cones(&big, &budget), Err(Error::Budget(_))));
        assert!(PointConfig::new(Family::A, 3, vec![vec![rat(0); 3]; 3]).is_err());
        assert!(PointConfig::new(Family::Generic, 2, vec![vec![rat(0); 2]; 3]).is_err());
        let dup = cfg_i(Family::A, 2, &[&[1, 0], &[1, 0], &[0, 1]]);
        assert!(matches!(enumerate_cones(&dup, &budget), Err(Error::GeneralPosition(_))));
    }

    #[test]
    fn json_round_trip() {
        let cfg = PointConfig::from_json(r#"{"family":"B","d":2,"points":[[0.5,"1/3"],[-2,"7"]]}"#).unwrap();
        assert_eq!(cfg.points()[0][1], Rational::new(BigInt::from(1), BigInt::from(3)));
        let again = PointConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
    }
}
