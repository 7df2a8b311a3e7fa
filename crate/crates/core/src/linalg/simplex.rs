//! Homogeneous strict feasibility by an exact phase-1 simplex.

use num_traits::{One, Signed, Zero};

use super::{Rational, RationalMatrix};

/// Decides whether some `v` satisfies `E v = 0` and `S v > 0` row-wise.
///
/// Both systems are homogeneous, so strictness is traded for `S v >= 1`.
/// The free vector is split as `v = p - q` with `p, q >= 0`, every strict
/// row gets a surplus column, and one artificial per row starts the basis.
/// Bland's rule picks entering and leaving columns, so the method
/// terminates without any cycling safeguards.
pub fn feasible_strict(e: &RationalMatrix, s: &RationalMatrix) -> bool {
    if s.nrows() == 0 {
        return true;
    }
    let n = e.ncols().max(s.ncols());
    feasible_mixed(e, &RationalMatrix::zeros(0, n), s)
}

/// Like [`feasible_strict`] with extra weak rows `W v >= 0`.
pub fn feasible_mixed(e: &RationalMatrix, w: &RationalMatrix, s: &RationalMatrix) -> bool {
    let n = e.ncols().max(s.ncols()).max(w.ncols());
    for m in [e, w, s] {
        if m.nrows() > 0 {
            assert_eq!(m.ncols(), n, "column count mismatch");
        }
    }
    if s.nrows() == 0 {
        return true;
    }
    let me = e.nrows();
    let mw = w.nrows();
    let ms = mw + s.nrows();
    let m = me + ms;
    // columns: p (n), q (n), surplus (ms), artificial (m), rhs
    let art0 = 2 * n + ms;
    let width = art0 + m + 1;
    let rhs = width - 1;
    let mut t = vec![vec![Rational::zero(); width]; m + 1];

    for i in 0..m {
        let (row, surplus, b) = if i < me {
            (e.row(i), None, Rational::zero())
        } else if i < me + mw {
            (w.row(i - me), Some(i - me), Rational::zero())
        } else {
            (s.row(i - me - mw), Some(i - me), Rational::one())
        };
        for j in 0..n {
            t[i][j] = row[j].clone();
            t[i][n + j] = -row[j].clone();
        }
        if let Some(k) = surplus {
            t[i][2 * n + k] = -Rational::one();
        }
        t[i][art0 + i] = Rational::one();
        t[i][rhs] = b;
    }
    // objective row holds reduced costs of "minimize sum of artificials"
    for j in 0..width {
        if (art0..art0 + m).contains(&j) {
            continue;
        }
        let mut acc = Rational::zero();
        for row in t.iter().take(m) {
            acc -= &row[j];
        }
        t[m][j] = acc;
    }
    let mut basis: Vec<usize> = (art0..art0 + m).collect();

    loop {
        let Some(enter) = (0..rhs).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, _)) = leave else {
            // unbounded direction cannot occur for a sum of nonnegatives
            unreachable!("phase-1 objective is bounded below");
        };
        pivot(&mut t, r, enter);
        basis[r] = enter;
    }
    t[m][rhs].is_zero()
}

fn pivot(t: &mut [Vec<Rational>], r: usize, c: usize) {
    let inv = t[r][c].recip();
    for x in t[r].iter_mut() {
        if !x.is_zero() {
            *x *= &inv;
        }
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, p) in row.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
}
