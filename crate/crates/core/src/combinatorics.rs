//! Stirling numbers, region and face counts, and the closed-form
//! expectations for Weyl random cones and their duals.
//!
//! Every value is exact. Formulas are evaluated formally for any
//! arguments that keep them well defined; only `n >= d + 1` (type A) and
//! `n >= d` (type B) are backed by the underlying theorems.

use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    /// Hyperplanes in general position, used as a baseline.
    Generic,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "A",
            Family::B => "B",
            Family::Generic => "Generic",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "Generic" | "generic" => Ok(Family::Generic),
            _ => Err(Error::Invalid(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StirlingKind {
    /// `[n,k]`: coefficients of `t(t+1)...(t+n-1)`.
    FirstA,
    /// `{n,k}`: partitions of an `n`-set into `k` blocks.
    SecondA,
    /// `B[n,k]`: coefficients of `(t+1)(t+3)...(t+2n-1)`.
    FirstB,
    /// `B{n,k} = sum_r C(n,r) {r,k} 2^(r-k)`.
    SecondB,
}

type Table = RwLock<Vec<Vec<BigInt>>>;

static FIRST_A: Table = RwLock::new(Vec::new());
static SECOND_A: Table = RwLock::new(Vec::new());
static FIRST_B: Table = RwLock::new(Vec::new());
static SECOND_B: Table = RwLock::new(Vec::new());

/// Reads `table[n][k]`, extending rows `0..=n` by `next_row` first if
/// needed. Rows are only ever appended, so a published row never changes.
fn lookup(table: &Table, n: usize, k: usize, next_row: impl Fn(&[Vec<BigInt>], usize) -> Vec<BigInt>) -> BigInt {
    {
        let t = table.read().expect("stirling table poisoned");
        if let Some(row) = t.get(n) {
            return row.get(k).cloned().unwrap_or_default();
        }
    }
    let mut t = table.write().expect("stirling table poisoned");
    while t.len() <= n {
        let m = t.len();
        let row = next_row(&t, m);
        t.push(row);
    }
    t[n].get(k).cloned().unwrap_or_default()
}

fn first_a_row(prev: &[Vec<BigInt>], n: usize) -> Vec<BigInt> {
    if n == 0 {
        return vec![BigInt::one()];
    }
    let p = &prev[n - 1];
    let get = |k: usize| p.get(k).cloned().unwrap_or_default();
    (0..=n)
        .map(|k| {
            let carry = if k == 0 { BigInt::zero() } else { get(k - 1) };
            carry + BigInt::from(n - 1) * get(k)
        })
        .collect()
}

fn first_b_row(prev: &[Vec<BigInt>], n: usize) -> Vec<BigInt> {
    if n == 0 {
        return vec![BigInt::one()];
    }
    let p = &prev[n - 1];
    let get = |k: usize| p.get(k).cloned().unwrap_or_default();
    (0..=n)
        .map(|k| {
            let carry = if k == 0 { BigInt::zero() } else { get(k - 1) };
            carry + BigInt::from(2 * n - 1) * get(k)
        })
        .collect()
}

fn second_a_row(prev: &[Vec<BigInt>], n: usize) -> Vec<BigInt> {
    if n == 0 {
        return vec![BigInt::one()];
    }
    let p = &prev[n - 1];
    let get = |k: usize| p.get(k).cloned().unwrap_or_default();
    (0..=n)
        .map(|k| {
            let carry = if k == 0 { BigInt::zero() } else { get(k - 1) };
            carry + BigInt::from(k) * get(k)
        })
        .collect()
}

fn second_b_row(_prev: &[Vec<BigInt>], n: usize) -> Vec<BigInt> {
    (0..=n)
        .map(|k| {
            (k..=n)
                .map(|r| {
                    binomial(n as i64, r as i64)
                        * stirling(StirlingKind::SecondA, r, k as i64)
                        * (BigInt::one() << (r - k))
                })
                .sum()
        })
        .collect()
}

/// Stirling numbers of both kinds and their B-analogues.
///
/// Values outside the coefficient range are zero; in particular
/// `[n,0] = 0` for `n >= 1`. The empty product gives `[0,0] = B[0,0] = 1`.
pub fn stirling(kind: StirlingKind, n: usize, k: i64) -> BigInt {
    if k < 0 || k as usize > n {
        return BigInt::zero();
    }
    let k = k as usize;
    match kind {
        StirlingKind::FirstA => lookup(&FIRST_A, n, k, first_a_row),
        StirlingKind::SecondA => lookup(&SECOND_A, n, k, second_a_row),
        StirlingKind::FirstB => lookup(&FIRST_B, n, k, first_b_row),
        StirlingKind::SecondB => lookup(&SECOND_B, n, k, second_b_row),
    }
}

/// `B{n,k}` by the recurrence `B{n,k} = B{n-1,k-1} + (2k+1) B{n-1,k}`,
/// kept separate from the explicit sum as an independent check.
pub fn stirling_second_b_recurrence(n: usize, k: i64) -> BigInt {
    if k < 0 || k as usize > n {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::one()];
    for m in 1..=n {
        let mut next = vec![BigInt::zero(); m + 1];
        for (j, slot) in next.iter_mut().enumerate() {
            let carry = if j == 0 { BigInt::zero() } else { row[j - 1].clone() };
            let stay = row.get(j).cloned().unwrap_or_default();
            *slot = carry + BigInt::from(2 * j + 1) * stay;
        }
        row = next;
    }
    row[k as usize].clone()
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn pow2(e: i64) -> BigInt {
    BigInt::one() << e.max(0) as usize
}

fn first_kind(family: Family) -> StirlingKind {
    match family {
        Family::B => StirlingKind::FirstB,
        _ => StirlingKind::FirstA,
    }
}

/// Number of cones, evaluated formally for any integers: nonpositive `n`
/// or `d` give zero.
pub(crate) fn cones_formal(family: Family, n: i64, d: i64) -> BigInt {
    if n < 0 || d <= 0 {
        return BigInt::zero();
    }
    match family {
        Family::Generic => {
            let two = BigInt::from(2);
            two * (0..d).map(|i| binomial(n - 1, i)).sum::<BigInt>()
        }
        Family::A | Family::B => {
            let kind = first_kind(family);
            let mut acc = BigInt::zero();
            let mut i = n - d + 1;
            while i <= n {
                if i >= 0 {
                    acc += stirling(kind, n as usize, i);
                }
                i += 2;
            }
            acc * 2
        }
    }
}

/// `2([n,n-d+1] + [n,n-d+3] + ...)` for type A, the B-analogue for type B,
/// and `2 sum_{i<d} C(n-1,i)` for hyperplanes in general position.
pub fn region_count(family: Family, n: usize, d: usize) -> BigInt {
    cones_formal(family, n as i64, d as i64)
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::OutOfRange(what()))
    }
}

fn weyl_only(family: Family, operation: &'static str) -> Result<()> {
    if family == Family::Generic {
        Err(Error::UnsupportedFamily { family, operation })
    } else {
        Ok(())
    }
}

fn frac(num: BigInt, den: BigInt) -> Result<Rational> {
    require(!den.is_zero(), || "formula denominator vanishes".into())?;
    Ok(Rational::new(num, den))
}

fn fact_i(n: i64) -> Result<BigInt> {
    require(n >= 0, || format!("factorial of negative argument {n}"))?;
    Ok(factorial(n as usize))
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    require(n >= 1 && d >= 1, || format!("need n >= 1 and d >= 1, got n={n}, d={d}"))
}

/// `C(n-1, m)` for type A and `2^m C(n, m)` for type B: the number of ways
/// the `m` merged chain links can be placed.
fn link_choices(family: Family, n: i64, m: i64) -> BigInt {
    match family {
        Family::A => binomial(n - 1, m),
        _ => pow2(m) * binomial(n, m),
    }
}

/// Total number of `k`-faces of the tessellation.
pub fn total_face_count(family: Family, n: usize, d: usize, k: usize) -> Result<BigInt> {
    weyl_only(family, "total_face_count")?;
    check_nd(n, d)?;
    require((1..=d).contains(&k), || format!("need 1 <= k <= d, got k={k}"))?;
    let m = n as i64 - d as i64 + k as i64;
    require(m >= 0, || format!("n - d + k = {m} is negative"))?;
    let second = match family {
        Family::A => StirlingKind::SecondA,
        _ => StirlingKind::SecondB,
    };
    Ok(stirling(second, n, m) * cones_formal(family, m, k as i64))
}

/// Sum over `k`-faces of the number of cones containing each.
pub fn incidence_count(family: Family, n: usize, d: usize, k: usize) -> Result<BigInt> {
    weyl_only(family, "incidence_count")?;
    check_nd(n, d)?;
    require((1..=d).contains(&k), || format!("need 1 <= k <= d, got k={k}"))?;
    let (n, d, k) = (n as i64, d as i64, k as i64);
    let m = n - d + k;
    Ok(link_choices(family, n, d - k) * fact_i(n)? / fact_i(m)? * cones_formal(family, m, k))
}

/// Expected number of `k`-faces of the random cone.
pub fn expected_face_count(family: Family, n: usize, d: usize, k: usize) -> Result<Rational> {
    check_nd(n, d)?;
    require((1..=d).contains(&k), || format!("need 1 <= k <= d, got k={k}"))?;
    let (ni, di, ki) = (n as i64, d as i64, k as i64);
    match family {
        Family::Generic => frac(
            pow2(di - ki) * binomial(ni, di - ki) * cones_formal(family, ni - di + ki, ki),
            cones_formal(family, ni, di),
        ),
        _ => frac(incidence_count(family, n, d, k)?, cones_formal(family, ni, di)),
    }
}

/// Expected size functional `Y_{d-k+j, d-k}`.
pub fn expected_size_functional(family: Family, n: usize, d: usize, k: usize, j: usize) -> Result<Rational> {
    check_nd(n, d)?;
    require(1 <= j && j <= k && k <= d, || {
        format!("need 1 <= j <= k <= d, got j={j}, k={k}, d={d}")
    })?;
    let (n, d, k, j) = (n as i64, d as i64, k as i64, j as i64);
    let m = n - k + j;
    match family {
        Family::Generic => {
            require(n > k - j, || format!("need n > k - j, got n={n}, k-j={}", k - j))?;
            frac(
                pow2(k - j) * binomial(n, k - j) * cones_formal(family, m, j),
                BigInt::from(2) * cones_formal(family, n, d),
            )
        }
        _ => frac(
            link_choices(family, n, k - j) * cones_formal(family, m, j) * fact_i(n)?,
            BigInt::from(2) * cones_formal(family, n, d) * fact_i(m)?,
        ),
    }
}

/// Expected `Y_{face_dim, index}`, the sum of `U_index` over the faces of
/// dimension `face_dim`; needs `index < face_dim <= d`.
pub fn expected_size_functional_at(family: Family, n: usize, d: usize, face_dim: usize, index: usize) -> Result<Rational> {
    require(index < face_dim && face_dim <= d, || {
        format!("need index < face_dim <= d, got face_dim={face_dim}, index={index}, d={d}")
    })?;
    expected_size_functional(family, n, d, d - index, face_dim - index)
}

/// Expected conic quermassintegral `U_j`.
pub fn expected_quermass(family: Family, n: usize, d: usize, j: usize) -> Result<Rational> {
    weyl_only(family, "expected_quermass")?;
    check_nd(n, d)?;
    require(j < d, || format!("need 0 <= j <= d-1, got j={j}"))?;
    let (n, d, j) = (n as i64, d as i64, j as i64);
    frac(cones_formal(family, n, d - j), BigInt::from(2) * cones_formal(family, n, d))
}

/// Expected conic intrinsic volume `v_j`.
pub fn expected_intrinsic_volume(family: Family, n: usize, d: usize, j: usize) -> Result<Rational> {
    weyl_only(family, "expected_intrinsic_volume")?;
    check_nd(n, d)?;
    require(j <= d, || format!("need 0 <= j <= d, got j={j}"))?;
    let (ni, di, ji) = (n as i64, d as i64, j as i64);
    let total = cones_formal(family, ni, di);
    if j == 0 {
        frac(total.clone() - cones_formal(family, ni, di - 1), BigInt::from(2) * total)
    } else {
        frac(stirling(first_kind(family), n, ni - di + ji), total)
    }
}

/// Expected sum of solid angles of the `k`-faces.
pub fn expected_angle_sum(family: Family, n: usize, d: usize, k: usize) -> Result<Rational> {
    weyl_only(family, "expected_angle_sum")?;
    check_nd(n, d)?;
    require((1..=d).contains(&k), || format!("need 1 <= k <= d, got k={k}"))?;
    let (n, d, k) = (n as i64, d as i64, k as i64);
    frac(
        link_choices(family, n, d - k) * fact_i(n)?,
        fact_i(n - d + k)? * cones_formal(family, n, d),
    )
}

/// Expected number of `k`-faces of the dual random cone.
pub fn expected_dual_face_count(family: Family, n: usize, d: usize, k: usize) -> Result<Rational> {
    weyl_only(family, "expected_dual_face_count")?;
    check_nd(n, d)?;
    require(k < d, || format!("need 0 <= k <= d-1, got k={k}"))?;
    let (n, d, k) = (n as i64, d as i64, k as i64);
    frac(
        link_choices(family, n, k) * cones_formal(family, n - k, d - k) * fact_i(n)?,
        cones_formal(family, n, d) * fact_i(n - k)?,
    )
}

/// Expected conic quermassintegral of the dual random cone.
pub fn expected_dual_quermass(family: Family, n: usize, d: usize, j: usize) -> Result<Rational> {
    weyl_only(family, "expected_dual_quermass")?;
    check_nd(n, d)?;
    require((1..=d).contains(&j), || format!("need 1 <= j <= d, got j={j}"))?;
    let (n, d, j) = (n as i64, d as i64, j as i64);
    let total = cones_formal(family, n, d);
    frac(total.clone() - cones_formal(family, n, j), BigInt::from(2) * total)
}

/// Expected conic intrinsic volume of the dual random cone.
pub fn expected_dual_intrinsic_volume(family: Family, n: usize, d: usize, j: usize) -> Result<Rational> {
    weyl_only(family, "expected_dual_intrinsic_volume")?;
    check_nd(n, d)?;
    require(j <= d, || format!("need 0 <= j <= d, got j={j}"))?;
    let (ni, di, ji) = (n as i64, d as i64, j as i64);
    let total = cones_formal(family, ni, di);
    if j == d {
        frac(total.clone() - cones_formal(family, ni, di - 1), BigInt::from(2) * total)
    } else {
        frac(stirling(first_kind(family), n, ni - ji), total)
    }
}

/// Probability that the cone cut out by the natural ordering of `n`
/// exchangeable points is nonzero.
pub fn acceptance_probability(family: Family, n: usize, d: usize) -> Result<Rational> {
    weyl_only(family, "acceptance_probability")?;
    check_nd(n, d)?;
    let orderings = match family {
        Family::A => factorial(n),
        _ => pow2(n as i64) * factorial(n),
    };
    frac(region_count(family, n, d), orderings)
}

/// Number of pairs (chamber, `k`-face of it) of the reflection arrangement
/// in `R^n` whose face meets a generic `d`-dimensional subspace nontrivially.
///
/// Type A uses the sum of Stirling numbers `2([k,n-d+1] + [k,n-d+3] + ...)`,
/// which is the formal type-A cone count at `(k, d-n+k)`.
pub fn chamber_subspace_count(family: Family, n: usize, d: usize, k: usize) -> Result<BigInt> {
    weyl_only(family, "chamber_subspace_count")?;
    require(n >= 1 && (1..=n).contains(&k) && d <= n, || {
        format!("need 1 <= k <= n and d <= n, got n={n}, d={d}, k={k}")
    })?;
    let (ni, di, ki) = (n as i64, d as i64, k as i64);
    let ratio = factorial(n) / factorial(k);
    Ok(match family {
        Family::A => {
            let kind = StirlingKind::FirstA;
            let mut sum = BigInt::zero();
            let mut i = ni - di + 1;
            while i <= ki {
                sum += stirling(kind, k, i);
                i += 2;
            }
            ratio * binomial(ni - 1, ki - 1) * 2 * sum
        }
        _ => pow2(ni - ki) * binomial(ni, ki) * ratio * cones_formal(family, ki, di - ni + ki),
    })
}
