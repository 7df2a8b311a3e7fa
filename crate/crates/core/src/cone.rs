//! Polyhedral cones in H-representation and the few V-side operations the
//! crate needs: extreme rays, face census, and nearest-point projection.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    dot, feasible_mixed, feasible_strict, integer_row, kernel_basis, next_combination, rank,
    rank_int, to_f64, ExactInt, Rational, RationalMatrix, RaySet, RayTester,
};

/// `{v : E v = 0, S v <= 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeH {
    dim: usize,
    eq: RationalMatrix,
    ineq: RationalMatrix,
}

impl ConeH {
    pub fn new(dim: usize, eq: RationalMatrix, ineq: RationalMatrix) -> Result<Self> {
        for m in [&eq, &ineq] {
            if m.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.ncols(),
                });
            }
        }
        Ok(Self { dim, eq, ineq })
    }

    pub fn from_ineq(ineq: RationalMatrix) -> Self {
        let dim = ineq.ncols();
        Self {
            dim,
            eq: RationalMatrix::zeros(0, dim),
            ineq,
        }
    }

    pub fn whole_space(dim: usize) -> Self {
        Self::from_ineq(RationalMatrix::zeros(0, dim))
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn eq_rows(&self) -> &RationalMatrix {
        &self.eq
    }

    pub fn ineq_rows(&self) -> &RationalMatrix {
        &self.ineq
    }

    /// The face where the listed inequality rows are tight.
    pub fn face(&self, tight: &[usize]) -> ConeH {
        let rest: Vec<usize> = (0..self.ineq.nrows()).filter(|i| !tight.contains(i)).collect();
        ConeH {
            dim: self.dim,
            eq: self.eq.vstack(&self.ineq.select_rows(tight)),
            ineq: self.ineq.select_rows(&rest),
        }
    }

    /// All rows, equalities first.
    pub fn all_rows(&self) -> RationalMatrix {
        self.eq.vstack(&self.ineq)
    }
}

/// `pos{x_1, ..., x_m}` with the generators stored as columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorCone {
    generators: RationalMatrix,
}

impl GeneratorCone {
    pub fn new(generators: RationalMatrix) -> Self {
        Self { generators }
    }

    pub fn from_vectors(dim: usize, vectors: Vec<Vec<Rational>>) -> Result<Self> {
        Ok(Self::new(RationalMatrix::from_columns(dim, vectors)?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.generators.nrows()
    }

    pub fn count(&self) -> usize {
        self.generators.ncols()
    }

    pub fn generators(&self) -> &RationalMatrix {
        &self.generators
    }
}

/// Inequality rows that vanish on the whole cone. One LP per row: row `r`
/// is implicit iff no point of the cone has `<r, v> < 0`.
pub fn implicit_equalities(c: &ConeH) -> Vec<usize> {
    let weak = negate(&c.ineq);
    (0..c.ineq.nrows())
        .filter(|&i| !feasible_mixed(&c.eq, &weak, &weak.select_rows(&[i])))
        .collect()
}

fn negate(m: &RationalMatrix) -> RationalMatrix {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = -m[(i, j)].clone();
        }
    }
    out
}

/// Dimension of the linear hull.
pub fn cone_dim(c: &ConeH) -> usize {
    let implicit = implicit_equalities(c);
    let eqs = c.eq.vstack(&c.ineq.select_rows(&implicit));
    c.dim - rank(&eqs)
}

pub fn is_zero_cone(c: &ConeH) -> bool {
    cone_dim(c) == 0
}

/// Dimension of `C ∩ (-C)`.
pub fn lineality_dim(c: &ConeH) -> usize {
    c.dim - rank(&c.all_rows())
}

/// `(pos X)° = {v : <x_i, v> <= 0}`.
pub fn dual_of_generators(g: &GeneratorCone) -> ConeH {
    ConeH::from_ineq(g.generators.transpose())
}

/// Columns of `u` reduced to a basis of their span.
fn independent_columns(u: &RationalMatrix) -> RationalMatrix {
    let mut keep: Vec<Vec<Rational>> = Vec::new();
    for j in 0..u.ncols() {
        keep.push(u.column(j));
        let cand = RationalMatrix::from_rows(u.nrows(), keep.clone()).expect("consistent widths");
        if rank(&cand) < keep.len() {
            keep.pop();
        }
    }
    RationalMatrix::from_columns(u.nrows(), keep).expect("consistent widths")
}

/// The cone pulled back along `v = U w` for a column basis `U`.
fn restrict(c: &ConeH, u: &RationalMatrix) -> Result<ConeH> {
    if u.nrows() != c.dim {
        return Err(Error::DimensionMismatch {
            expected: c.dim,
            found: u.nrows(),
        });
    }
    let basis = independent_columns(u);
    ConeH::new(basis.ncols(), c.eq.mul(&basis), c.ineq.mul(&basis))
}

/// `C ∩ span(U) != {0}`, decided by the exact ray test on the pulled-back
/// cone.
pub fn meets_subspace_nontrivially(c: &ConeH, u: &RationalMatrix) -> Result<bool> {
    let r = restrict(c, u)?;
    Ok(nontrivial_exact(&r))
}

/// Whether `{E v = 0, S v <= 0}` has a nonzero point, by the integer ray
/// test.
pub fn nontrivial_exact(c: &ConeH) -> bool {
    if c.dim == 0 {
        return false;
    }
    crate::linalg::cone_nontrivial_big(&c.eq.integer_rows(), &c.ineq.integer_rows(), c.dim)
}

/// `relint(C) ∩ span(U) != ∅`.
pub fn relint_meets_subspace(c: &ConeH, u: &RationalMatrix) -> Result<bool> {
    let implicit = implicit_equalities(c);
    let rest: Vec<usize> = (0..c.ineq.nrows()).filter(|i| !implicit.contains(i)).collect();
    let face = ConeH::new(c.dim, c.eq.vstack(&c.ineq.select_rows(&implicit)), c.ineq.select_rows(&rest))?;
    let r = restrict(&face, u)?;
    Ok(feasible_strict(&r.eq, &negate(&r.ineq)))
}

fn check_len(c: &ConeH, p: &[Rational]) -> Result<()> {
    if p.len() != c.dim {
        return Err(Error::DimensionMismatch {
            expected: c.dim,
            found: p.len(),
        });
    }
    Ok(())
}

pub fn contains(c: &ConeH, p: &[Rational]) -> Result<bool> {
    check_len(c, p)?;
    Ok(c.eq.rows_iter().all(|r| dot(r, p).is_zero())
        && c.ineq.rows_iter().all(|r| !dot(r, p).is_positive()))
}

/// Membership in the relative interior.
pub fn contains_relint(c: &ConeH, p: &[Rational]) -> Result<bool> {
    if !contains(c, p)? {
        return Ok(false);
    }
    let implicit = implicit_equalities(c);
    Ok((0..c.ineq.nrows())
        .filter(|i| !implicit.contains(i))
        .all(|i| dot(c.ineq.row(i), p).is_negative()))
}

/// Extreme rays of `c` as primitive integer vectors, plus a flag for a
/// nontrivial lineality space.
pub fn extreme_rays(c: &ConeH) -> RaySet<BigInt> {
    let eq = c.eq.integer_rows();
    let ineq = c.ineq.integer_rows();
    let small = |rows: &[Vec<BigInt>]| -> Option<Vec<Vec<i128>>> {
        rows.iter().map(|r| r.iter().map(|x| x.to_i128()).collect()).collect()
    };
    if let (Some(e), Some(s)) = (small(&eq), small(&ineq)) {
        let er: Vec<&[i128]> = e.iter().map(|r| r.as_slice()).collect();
        let sr: Vec<&[i128]> = s.iter().map(|r| r.as_slice()).collect();
        if let Some(rs) = RayTester::new(&er, c.dim).and_then(|t| t.extreme_rays(&sr)) {
            return RaySet {
                rays: rs
                    .rays
                    .into_iter()
                    .map(|r| r.into_iter().map(BigInt::from).collect())
                    .collect(),
                lineality: rs.lineality,
            };
        }
    }
    let er: Vec<&[BigInt]> = eq.iter().map(|r| r.as_slice()).collect();
    let sr: Vec<&[BigInt]> = ineq.iter().map(|r| r.as_slice()).collect();
    RayTester::new(&er, c.dim)
        .and_then(|t| t.extreme_rays(&sr))
        .expect("big integer arithmetic cannot overflow")
}

/// A face of a cone, named by the full set of inequality rows that vanish
/// on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConeFace {
    pub tight: Vec<usize>,
    pub dim: usize,
}

/// Faces of a pointed cone from its extreme rays, as pairs of (bitmask of
/// the rows tight on the face, face dimension), apex included. Every face
/// is the set of rays vanishing on some set of rows; `None` signals
/// fixed-width overflow.
pub fn face_lattice<T: ExactInt>(ineq: &[&[T]], rays: &[Vec<T>], dim: usize) -> Option<Vec<(u32, usize)>> {
    let m = ineq.len();
    assert!(m <= 24 && rays.len() <= 64, "face lattice is for small cones");
    let mut zero = Vec::with_capacity(rays.len());
    for r in rays {
        let mut mask = 0u32;
        for (i, row) in ineq.iter().enumerate() {
            let mut acc = T::zero_value();
            for (a, b) in row.iter().zip(r) {
                acc = acc.add(&a.mul(b)?)?;
            }
            if acc.vanishes() {
                mask |= 1 << i;
            }
        }
        zero.push(mask);
    }
    let mut seen = std::collections::BTreeSet::new();
    for t in 0u32..(1 << m) {
        let members = (0..zero.len())
            .filter(|&r| zero[r] & t == t)
            .fold(0u64, |acc, r| acc | (1 << r));
        seen.insert(members);
    }
    let all = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let mut out = Vec::with_capacity(seen.len());
    for members in seen {
        let idx: Vec<usize> = (0..zero.len()).filter(|&r| members >> r & 1 == 1).collect();
        let tight = idx.iter().fold(all, |acc, &r| acc & zero[r]);
        let face_dim = if idx.is_empty() {
            0
        } else {
            let rows: Vec<&[T]> = idx.iter().map(|&r| rays[r].as_slice()).collect();
            rank_int(&rows, dim)?
        };
        out.push((tight, face_dim));
    }
    Some(out)
}

/// Every face of a pointed cone, apex included, from its extreme rays.
pub fn face_census(c: &ConeH) -> Result<Vec<ConeFace>> {
    let rs = extreme_rays(c);
    if rs.lineality {
        return Err(Error::Invalid("face census needs a pointed cone".into()));
    }
    let rows = c.ineq.integer_rows();
    if rows.len() > 20 {
        return Err(Error::Budget(format!("face census over {} rows", rows.len())));
    }
    let refs: Vec<&[BigInt]> = rows.iter().map(|r| r.as_slice()).collect();
    let lattice = face_lattice(&refs, &rs.rays, c.dim).expect("big integer arithmetic cannot overflow");
    let mut faces: Vec<ConeFace> = lattice
        .into_iter()
        .map(|(mask, dim)| ConeFace {
            tight: (0..rows.len()).filter(|&i| mask >> i & 1 == 1).collect(),
            dim,
        })
        .collect();
    faces.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.tight.cmp(&b.tight)));
    Ok(faces)
}

/// f-vector `f_0, ..., f_d` from a face list.
pub fn f_vector(faces: &[ConeFace], dim: usize) -> Vec<usize> {
    let mut f = vec![0; dim + 1];
    for face in faces {
        f[face.dim] += 1;
    }
    f
}

/// Faces of `pos X`: a set `J` of generators is exactly the set lying on
/// some face iff a vector of the dual is orthogonal to `x_J` and strictly
/// negative on the rest. Returns the generator sets with face dimensions.
pub fn generator_face_census(g: &GeneratorCone) -> Result<Vec<(Vec<usize>, usize)>> {
    let m = g.count();
    if m > 20 {
        return Err(Error::Budget(format!("generator census over {m} generators")));
    }
    let rows = g.generators.transpose();
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let on: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let off: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 0).collect();
        let e = rows.select_rows(&on);
        if feasible_strict(&e, &negate(&rows.select_rows(&off))) {
            out.push((on, rank(&e)));
        }
    }
    Ok(out)
}

/// Orthonormal basis (as columns) of the null space of `m`, in floating
/// point.
pub fn orthonormal_kernel(m: &RationalMatrix) -> DMatrix<f64> {
    let k = kernel_basis(m);
    let (n, c) = (k.nrows(), k.ncols());
    if c == 0 {
        return DMatrix::zeros(n, 0);
    }
    let mut cols: Vec<DVector<f64>> = Vec::with_capacity(c);
    for j in 0..c {
        let mut v = DVector::from_iterator(n, k.column(j).iter().map(to_f64));
        // two passes of Gram-Schmidt keep the basis orthogonal to rounding
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dot(&v);
                v -= q * proj;
            }
        }
        let norm = v.norm();
        cols.push(v / norm);
    }
    DMatrix::from_columns(&cols)
}

fn unit_rows(m: &RationalMatrix) -> Vec<DVector<f64>> {
    m.rows_iter()
        .map(|r| {
            let ints = integer_row(r);
            let v = DVector::from_iterator(ints.len(), ints.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)));
            let norm = v.norm();
            v / norm
        })
        .collect()
}

struct FaceData {
    dim: usize,
    /// Orthonormal basis of the face's linear hull.
    hull: DMatrix<f64>,
    rest: Vec<usize>,
    /// For each independent selection of normals spanning the normal
    /// space: the left inverse, and which outputs must be nonnegative.
    certificates: Vec<(DMatrix<f64>, Vec<bool>)>,
}

/// Nearest-point projection onto a pointed cone given its complete face
/// list, by checking the optimality conditions face by face.
pub struct FaceProjector {
    dim: usize,
    rows: Vec<DVector<f64>>,
    faces: Vec<FaceData>,
    tol: f64,
}

pub const PROJECTION_TOL: f64 = 1e-9;

impl FaceProjector {
    pub fn new(c: &ConeH, faces: &[ConeFace]) -> Result<Self> {
        if lineality_dim(c) > 0 {
            return Err(Error::Invalid("projection needs a pointed cone".into()));
        }
        let rows = unit_rows(&c.ineq);
        let eq_rows = unit_rows(&c.eq);
        let eq_rank = rank(&c.eq);
        let mut data = Vec::with_capacity(faces.len());
        for f in faces {
            let face = c.face(&f.tight);
            let hull = orthonormal_kernel(&face.eq);
            let rest: Vec<usize> = (0..rows.len()).filter(|i| !f.tight.contains(i)).collect();
            let normal_rank = rank(&face.eq) - eq_rank;
            let mut certificates = Vec::new();
            let eq_idx: Vec<usize> = independent_rows(&c.eq);
            if normal_rank == 0 {
                certificates.push(left_inverse(c.dim, &eq_idx.iter().map(|&i| &eq_rows[i]).collect::<Vec<_>>(), vec![false; eq_idx.len()]));
            } else if normal_rank <= f.tight.len() {
                let mut idx: Vec<usize> = (0..normal_rank).collect();
                loop {
                    let pick: Vec<usize> = idx.iter().map(|&i| f.tight[i]).collect();
                    let sel = c.eq.select_rows(&eq_idx).vstack(&c.ineq.select_rows(&pick));
                    if rank(&sel) == eq_rank + normal_rank {
                        let mut vecs: Vec<&DVector<f64>> = eq_idx.iter().map(|&i| &eq_rows[i]).collect();
                        vecs.extend(pick.iter().map(|&i| &rows[i]));
                        let mut sign = vec![false; eq_idx.len()];
                        sign.extend(std::iter::repeat_n(true, pick.len()));
                        certificates.push(left_inverse(c.dim, &vecs, sign));
                    }
                    if !next_combination(&mut idx, f.tight.len()) {
                        break;
                    }
                }
            }
            data.push(FaceData {
                dim: f.dim,
                hull,
                rest,
                certificates,
            });
        }
        Ok(Self {
            dim: c.dim,
            rows,
            faces: data,
            tol: PROJECTION_TOL,
        })
    }

    /// Returns the projection of `p` and the dimension of the face whose
    /// relative interior contains it. Signals [`Error::ProjectionTie`] when
    /// not exactly one face passes the tolerance checks.
    pub fn project(&self, p: &[f64]) -> Result<(Vec<f64>, usize)> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        let p = DVector::from_column_slice(p);
        let mut hit: Option<(DVector<f64>, usize)> = None;
        for f in &self.faces {
            let x = &f.hull * (f.hull.transpose() * &p);
            if f.rest.iter().any(|&i| self.rows[i].dot(&x) >= -self.tol) {
                continue;
            }
            let resid = &p - &x;
            let certified = f.certificates.iter().any(|(inv, sign)| {
                let lam = inv * &resid;
                lam.iter().zip(sign).all(|(l, &s)| !s || *l >= -self.tol)
            });
            if certified {
                if hit.is_some() {
                    return Err(Error::ProjectionTie);
                }
                hit = Some((x, f.dim));
            }
        }
        hit.map(|(x, d)| (x.iter().copied().collect(), d))
            .ok_or(Error::ProjectionTie)
    }
}

fn independent_rows(m: &RationalMatrix) -> Vec<usize> {
    let mut keep = Vec::new();
    for i in 0..m.nrows() {
        keep.push(i);
        if rank(&m.select_rows(&keep)) < keep.len() {
            keep.pop();
        }
    }
    keep
}

/// `(B B^T)^{-1} B` for independent rows `B`, which recovers coefficients
/// of any vector in their span.
fn left_inverse(d: usize, vecs: &[&DVector<f64>], sign: Vec<bool>) -> (DMatrix<f64>, Vec<bool>) {
    if vecs.is_empty() {
        return (DMatrix::zeros(0, d), sign);
    }
    let b = DMatrix::from_rows(&vecs.iter().map(|v| v.transpose()).collect::<Vec<_>>());
    let gram = &b * b.transpose();
    let inv = gram.try_inverse().expect("independent rows have invertible Gram matrix");
    (inv * b, sign)
}

/// One-shot projection; see [`FaceProjector`].
pub fn project_onto_cone(c: &ConeH, faces: &[ConeFace], p: &[f64]) -> Result<(Vec<f64>, usize)> {
    FaceProjector::new(c, faces)?.project(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use proptest::prelude::*;

    fn m(cols: usize, rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_i64_rows(cols, rows).unwrap()
    }

    fn quadrant() -> ConeH {
        ConeH::from_ineq(m(2, &[&[-1, 0], &[0, -1]]))
    }

    fn col(v: &[i64]) -> RationalMatrix {
        RationalMatrix::from_columns(v.len(), vec![v.iter().map(|&x| rat(x)).collect()]).unwrap()
    }

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn dimensions() {
        assert_eq!(cone_dim(&quadrant()), 2);
        assert_eq!(cone_dim(&ConeH::from_ineq(m(2, &[&[1, 0], &[-1, 0]]))), 1);
        let origin = ConeH::from_ineq(m(2, &[&[1, 0], &[0, 1], &[-1, -1]]));
        assert_eq!(cone_dim(&origin), 0);
        assert!(is_zero_cone(&origin));
        assert!(!is_zero_cone(&quadrant()));
        assert_eq!(lineality_dim(&quadrant()), 0);
        assert_eq!(lineality_dim(&ConeH::from_ineq(m(2, &[&[1, 0]]))), 1);
        assert_eq!(lineality_dim(&ConeH::whole_space(3)), 3);
    }

    #[test]
    fn duals() {
        let g = GeneratorCone::from_vectors(2, vec![pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        assert_eq!(dual_of_generators(&g), ConeH::from_ineq(m(2, &[&[1, 0], &[0, 1]])));
        let empty = GeneratorCone::new(RationalMatrix::zeros(2, 0));
        assert_eq!(dual_of_generators(&empty), ConeH::whole_space(2));
        let ray = GeneratorCone::from_vectors(2, vec![pt(&[1, 0])]).unwrap();
        assert_eq!(dual_of_generators(&ray), ConeH::from_ineq(m(2, &[&[1, 0]])));
    }

    #[test]
    fn subspace_meeting() {
        let q = quadrant();
        assert!(meets_subspace_nontrivially(&q, &col(&[1, 1])).unwrap());
        assert!(!meets_subspace_nontrivially(&q, &col(&[1, -1])).unwrap());
        assert!(meets_subspace_nontrivially(&q, &col(&[1, 0])).unwrap());
        assert!(relint_meets_subspace(&q, &col(&[1, 1])).unwrap());
        assert!(!relint_meets_subspace(&q, &col(&[1, 0])).unwrap());
        let half = ConeH::from_ineq(m(2, &[&[1, 0]]));
        assert!(!relint_meets_subspace(&half, &col(&[0, 1])).unwrap());
        assert!(meets_subspace_nontrivially(&half, &col(&[0, 1])).unwrap());
    }

    #[test]
    fn membership() {
        let q = quadrant();
        assert!(contains(&q, &pt(&[1, 2])).unwrap());
        assert!(!contains(&q, &pt(&[-1, 2])).unwrap());
        assert!(contains(&q, &pt(&[0, 0])).unwrap());
        assert!(contains_relint(&q, &pt(&[1, 2])).unwrap());
        assert!(!contains_relint(&q, &pt(&[0, 2])).unwrap());
        assert!(contains(&q, &pt(&[1])).is_err());
    }

    #[test]
    fn quadrant_census_and_projection() {
        let q = quadrant();
        let faces = face_census(&q).unwrap();
        assert_eq!(f_vector(&faces, 2), vec![1, 2, 1]);
        let proj = FaceProjector::new(&q, &faces).unwrap();
        let (x, j) = proj.project(&[1.0, 1.0]).unwrap();
        assert_eq!(j, 2);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
        let (x, j) = proj.project(&[1.0, -1.0]).unwrap();
        assert_eq!(j, 1);
        assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-12);
        let (x, j) = proj.project(&[-1.0, -1.0]).unwrap();
        assert_eq!(j, 0);
        assert!(x.iter().all(|v| v.abs() < 1e-12));
        let (_, j) = proj.project(&[1.0, 0.0]).unwrap();
        assert_eq!(j, 1);
    }

    #[test]
    fn generator_census_of_quadrant() {
        let g = GeneratorCone::from_vectors(2, vec![pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        let mut dims: Vec<usize> = generator_face_census(&g).unwrap().into_iter().map(|(_, d)| d).collect();
        dims.sort();
        assert_eq!(dims, vec![0, 1, 1, 2]);
    }

    fn small_rows(dim: usize, max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-3i64..4, dim), 1..max)
    }

    fn to_matrix(dim: usize, rows: &[Vec<i64>]) -> RationalMatrix {
        RationalMatrix::from_rows(dim, rows.iter().map(|r| pt(r)).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn dim_bounds_lineality(rows in small_rows(3, 6)) {
            let c = ConeH::from_ineq(to_matrix(3, &rows));
            prop_assert!(cone_dim(&c) >= lineality_dim(&c));
            prop_assert_eq!(cone_dim(&c) == 0, !nontrivial_exact(&c));
        }

        #[test]
        fn relint_implies_meets(rows in small_rows(3, 5), u in prop::collection::vec(-3i64..4, 3)) {
            prop_assume!(u.iter().any(|&x| x != 0));
            let c = ConeH::from_ineq(to_matrix(3, &rows));
            let span = col(&u);
            let meets = meets_subspace_nontrivially(&c, &span).unwrap();
            // a cone that is a subspace has 0 in its relative interior
            let subspace = implicit_equalities(&c).len() == rows.len();
            if relint_meets_subspace(&c, &span).unwrap() && !subspace {
                prop_assert!(meets);
            }
            // oracle: the restricted cone has positive dimension
            let r = restrict(&c, &span).unwrap();
            prop_assert_eq!(meets, cone_dim(&r) > 0);
        }

        #[test]
        fn projection_is_nearest(
            rows in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 3..5),
            p in prop::collection::vec(-2.0f64..2.0, 3),
            qs in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 6), 200),
        ) {
            let c = ConeH::from_ineq(to_matrix(3, &rows));
            prop_assume!(lineality_dim(&c) == 0 && cone_dim(&c) == 3);
            let faces = face_census(&c).unwrap();
            let proj = FaceProjector::new(&c, &faces).unwrap();
            let Ok((x, _)) = proj.project(&p) else { return Ok(()); };
            let rows_f = c.ineq_rows().to_f64_rows();
            for r in &rows_f {
                let v: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
                prop_assert!(v <= 1e-7);
            }
            // random feasible points: nonnegative combinations of rays
            let rays = extreme_rays(&c).rays;
            let dist = |y: &[f64]| y.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            let best = dist(&x);
            for w in &qs {
                let mut q = [0.0; 3];
                for (r, wt) in rays.iter().zip(w) {
                    for k in 0..3 {
                        q[k] += wt * r[k].to_f64().unwrap();
                    }
                }
                prop_assert!(best <= dist(&q) + 1e-9);
            }
        }

        #[test]
        fn double_dual(gens in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 3..6)) {
            let g = GeneratorCone::from_vectors(3, gens.iter().map(|v| pt(v)).collect()).unwrap();
            let h = dual_of_generators(&g);
            prop_assume!(lineality_dim(&h) == 0 && cone_dim(&h) == 3);
            // facets of pos X are the extreme rays of its dual
            let rays = extreme_rays(&h).rays;
            let back = ConeH::from_ineq(RationalMatrix::from_rows(3, rays.iter().map(|r| r.iter().cloned().map(Rational::from_integer).collect()).collect()).unwrap());
            for v in &gens {
                prop_assert!(contains(&back, &pt(v)).unwrap());
            }
            for r in extreme_rays(&back).rays {
                let rq: Vec<Rational> = r.into_iter().map(Rational::from_integer).collect();
                let hit = gens.iter().any(|v| {
                    let vq = pt(v);
                    rank(&RationalMatrix::from_rows(3, vec![vq.clone(), rq.clone()]).unwrap()) == 1 && dot(&vq, &rq).is_positive()
                });
                prop_assert!(hit);
            }
        }
    }
}
