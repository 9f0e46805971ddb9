//! Extended formulations `{x : ∃y, Ay ≥ b, x = Ty + t}` over exact rationals,
//! and the operations the lifting construction is assembled from.

mod io;
mod lift;

pub use lift::{
    iterate_lift, iterate_lift_with, lift, lift_with, EmptinessSource, LiftOptions, LiftReport,
    NodeDecision,
};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Sparse vector as `(index, value)` pairs, sorted by index, no stored zeros.
pub type SparseVec = Vec<(usize, Rational)>;

pub(crate) fn sparse_dot(a: &SparseVec, y: &[Rational]) -> Rational {
    a.iter().map(|(j, v)| v * &y[*j]).sum()
}

fn shifted(a: &SparseVec, by: usize) -> SparseVec {
    a.iter().map(|(j, v)| (j + by, v.clone())).collect()
}

fn negated(a: &SparseVec) -> SparseVec {
    a.iter().map(|(j, v)| (*j, -v)).collect()
}

pub(crate) fn sparse_from_dense(v: &[Rational]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(j, x)| (j, x.clone()))
        .collect()
}

/// Merges two sparse vectors, `a + b`.
pub(crate) fn sparse_add(a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        if k == b.len() || (i < a.len() && a[i].0 < b[k].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[k].0 < a[i].0 {
            out.push(b[k].clone());
            k += 1;
        } else {
            let s = &a[i].1 + &b[k].1;
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            k += 1;
        }
    }
    out
}

/// A polytope given as the projection of `{y : Ay ≥ b}` under `x = Ty + t`.
///
/// The `empty` flag is an explicit marker for the empty set, so that unions can
/// drop empty arms without an infeasible row system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedFormulation {
    xdim: usize,
    ydim: usize,
    rows: Vec<SparseVec>,
    rhs: Vec<Rational>,
    proj: Vec<SparseVec>,
    offset: Vec<Rational>,
    empty: bool,
    /// The opposite system `{w : Aw ≤ b}` is known to be infeasible. When both
    /// arms of a union carry this, the bounds `0 ≤ λ ≤ 1` are implied.
    reverse_empty: bool,
}

impl ExtendedFormulation {
    /// Builds an EF from raw parts, checking shapes.
    pub fn from_parts(
        xdim: usize,
        ydim: usize,
        rows: Vec<(SparseVec, Rational)>,
        proj: Vec<SparseVec>,
        offset: Vec<Rational>,
    ) -> Result<ExtendedFormulation> {
        if proj.len() != xdim || offset.len() != xdim {
            return Err(Error::Dimension {
                expected: xdim,
                got: proj.len().min(offset.len()),
            });
        }
        for r in rows.iter().map(|r| &r.0).chain(&proj) {
            if r.iter().any(|(j, _)| *j >= ydim) {
                return Err(Error::Invalid("coefficient index beyond yvars".into()));
            }
            if r.windows(2).any(|w| w[0].0 >= w[1].0) || r.iter().any(|(_, v)| v.is_zero()) {
                return Err(Error::Invalid("sparse row must be sorted without zeros".into()));
            }
        }
        let empty = rows
            .iter()
            .any(|(a, beta)| a.is_empty() && beta.is_positive());
        let (rows, rhs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let mut ef = ExtendedFormulation {
            xdim,
            ydim,
            rows,
            rhs,
            proj,
            offset,
            empty: false,
            reverse_empty: false,
        };
        ef.reverse_empty = ef.has_contradictory_opposite_pair();
        if empty {
            return Ok(ExtendedFormulation::empty(xdim));
        }
        Ok(ef)
    }

    /// The empty-set marker in dimension `n`.
    pub fn empty(n: usize) -> ExtendedFormulation {
        ExtendedFormulation {
            xdim: n,
            ydim: 0,
            rows: Vec::new(),
            rhs: Vec::new(),
            proj: vec![Vec::new(); n],
            offset: vec![Rational::zero(); n],
            empty: true,
            reverse_empty: true,
        }
    }

    /// `[0,1]^n` with `y = x`: rows `x_i ≥ 0` and `-x_i ≥ -1`.
    pub fn cube(n: usize) -> ExtendedFormulation {
        let mut rows = Vec::with_capacity(2 * n);
        let mut rhs = Vec::with_capacity(2 * n);
        for i in 0..n {
            rows.push(vec![(i, int(1))]);
            rhs.push(int(0));
            rows.push(vec![(i, int(-1))]);
            rhs.push(int(-1));
        }
        ExtendedFormulation {
            xdim: n,
            ydim: n,
            rows,
            rhs,
            proj: (0..n).map(|i| vec![(i, int(1))]).collect(),
            offset: vec![Rational::zero(); n],
            empty: false,
            reverse_empty: true,
        }
    }

    /// `{x ∈ [0,1]^n : a·x ≥ β for each given row}` with `y = x`.
    pub fn from_hrep(n: usize, constraints: &[(Vec<Rational>, Rational)]) -> Result<ExtendedFormulation> {
        let mut ef = ExtendedFormulation::cube(n);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (a, beta) in constraints {
            if a.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: a.len(),
                });
            }
            rows.push(sparse_from_dense(a));
            rhs.push(beta.clone());
        }
        rows.append(&mut ef.rows);
        rhs.append(&mut ef.rhs);
        ef.rows = rows;
        ef.rhs = rhs;
        if ef.rows.iter().zip(&ef.rhs).any(|(a, b)| a.is_empty() && b.is_positive()) {
            return Ok(ExtendedFormulation::empty(n));
        }
        Ok(ef)
    }

    pub fn xdim(&self) -> usize {
        self.xdim
    }

    pub fn ydim(&self) -> usize {
        self.ydim
    }

    /// Number of inequality rows, the size measure of an EF.
    pub fn ef_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty_marker(&self) -> bool {
        self.empty
    }

    pub fn reverse_empty(&self) -> bool {
        self.reverse_empty
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn proj(&self) -> &[SparseVec] {
        &self.proj
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    /// `x = Ty + t`.
    pub fn project(&self, y: &[Rational]) -> Vec<Rational> {
        self.proj
            .iter()
            .zip(&self.offset)
            .map(|(row, t)| sparse_dot(row, y) + t)
            .collect()
    }

    /// Whether `y` satisfies every row exactly.
    pub fn satisfies(&self, y: &[Rational]) -> bool {
        !self.empty
            && y.len() == self.ydim
            && self.rows.iter().zip(&self.rhs).all(|(a, b)| &sparse_dot(a, y) >= b)
    }

    /// Some pair of rows `a·y ≥ β₁`, `-a·y ≥ β₂` with `β₁ + β₂ < 0`, which makes
    /// `{w : Aw ≤ b}` infeasible.
    fn has_contradictory_opposite_pair(&self) -> bool {
        use std::collections::HashMap;
        let mut seen: HashMap<&SparseVec, &Rational> = HashMap::new();
        for (a, b) in self.rows.iter().zip(&self.rhs) {
            seen.entry(a).and_modify(|old| *old = (*old).max(b)).or_insert(b);
        }
        self.rows.iter().zip(&self.rhs).any(|(a, b)| {
            let neg = negated(a);
            seen.get(&neg).is_some_and(|b2| (b + *b2).is_negative())
        })
    }

    /// Decides by LP whether `{w : Aw ≤ b}` is empty.
    pub(crate) fn check_reverse_empty(&self) -> bool {
        if self.empty {
            return false;
        }
        let rows = self
            .rows
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (negated(a), -b))
            .collect();
        match ExtendedFormulation::from_parts(0, self.ydim, rows, Vec::new(), Vec::new()) {
            Ok(rev) => crate::lp::is_empty(&rev).empty,
            Err(_) => false,
        }
    }

    /// Rows `a·x ≥ β` when this EF is an H-representation (`y = x`).
    pub fn as_hrep(&self) -> Option<Vec<(Vec<Rational>, Rational)>> {
        if self.empty || self.ydim != self.xdim {
            return None;
        }
        let identity = self.proj.iter().enumerate().all(|(i, row)| {
            row.len() == 1 && row[0].0 == i && row[0].1.is_one()
        }) && self.offset.iter().all(Zero::is_zero);
        if !identity {
            return None;
        }
        Some(
            self.rows
                .iter()
                .zip(&self.rhs)
                .map(|(a, b)| {
                    let mut dense = vec![Rational::zero(); self.xdim];
                    for (j, v) in a {
                        dense[*j] = v.clone();
                    }
                    (dense, b.clone())
                })
                .collect(),
        )
    }

    /// `{x ∈ Q : x_i = v}` for each fixing `(i, v)`, two rows per fixing.
    pub fn face_restrict_many(&self, fixings: &[(usize, bool)]) -> Result<ExtendedFormulation> {
        if let Some(&(i, _)) = fixings.iter().find(|(i, _)| *i >= self.xdim) {
            return Err(Error::VarOutOfRange {
                index: i + 1,
                n: self.xdim,
            });
        }
        if self.empty {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        for &(i, v) in fixings {
            let target = int(i64::from(v)) - &self.offset[i];
            if self.proj[i].is_empty() {
                // x_i is constant on Q
                if !target.is_zero() {
                    return Ok(ExtendedFormulation::empty(self.xdim));
                }
            }
            out.rows.push(self.proj[i].clone());
            out.rhs.push(target.clone());
            out.rows.push(negated(&self.proj[i]));
            out.rhs.push(-target);
        }
        Ok(out)
    }

    pub fn face_restrict(&self, i: usize, v: bool) -> Result<ExtendedFormulation> {
        self.face_restrict_many(&[(i, v)])
    }

    /// `P1 ∩ P2`: stacked variables, the two projections tied by paired rows.
    pub fn intersect(&self, other: &ExtendedFormulation) -> Result<ExtendedFormulation> {
        self.check_dim(other)?;
        if self.empty || other.empty {
            return Ok(ExtendedFormulation::empty(self.xdim));
        }
        let d1 = self.ydim;
        let mut rows = self.rows.clone();
        let mut rhs = self.rhs.clone();
        rows.extend(other.rows.iter().map(|r| shifted(r, d1)));
        rhs.extend(other.rhs.iter().cloned());
        for k in 0..self.xdim {
            let tie = sparse_add(&self.proj[k], &negated(&shifted(&other.proj[k], d1)));
            let gap = &other.offset[k] - &self.offset[k];
            rows.push(negated(&tie));
            rhs.push(-gap.clone());
            rows.push(tie);
            rhs.push(gap);
        }
        Ok(ExtendedFormulation {
            xdim: self.xdim,
            ydim: d1 + other.ydim,
            rows,
            rhs,
            proj: self.proj.clone(),
            offset: self.offset.clone(),
            empty: false,
            reverse_empty: self.reverse_empty || other.reverse_empty,
        })
    }

    /// `conv(P1 ∪ P2)` by the homogenized disjunctive construction with
    /// variables `(y1, y2, λ)`:
    /// `A1 y1 ≥ λ b1`, `A2 y2 ≥ (1-λ) b2`, `x = T1 y1 + λ t1 + T2 y2 + (1-λ) t2`.
    ///
    /// The rows `0 ≤ λ ≤ 1` are added unless both inputs are reverse-empty.
    /// Empty markers are dropped.
    pub fn balas_union(&self, other: &ExtendedFormulation) -> Result<ExtendedFormulation> {
        self.check_dim(other)?;
        if self.empty {
            return Ok(other.clone());
        }
        if other.empty {
            return Ok(self.clone());
        }
        let (d1, d2) = (self.ydim, other.ydim);
        let lambda = d1 + d2;
        let mut rows = Vec::with_capacity(self.rows.len() + other.rows.len() + 2);
        let mut rhs = Vec::with_capacity(rows.capacity());
        for (a, b) in self.rows.iter().zip(&self.rhs) {
            let mut r = a.clone();
            if !b.is_zero() {
                r.push((lambda, -b));
            }
            rows.push(r);
            rhs.push(Rational::zero());
        }
        for (a, b) in other.rows.iter().zip(&other.rhs) {
            let mut r = shifted(a, d1);
            if !b.is_zero() {
                r.push((lambda, b.clone()));
            }
            rows.push(r);
            rhs.push(b.clone());
        }
        let implied = self.reverse_empty && other.reverse_empty;
        if !implied {
            rows.push(vec![(lambda, int(1))]);
            rhs.push(int(0));
            rows.push(vec![(lambda, int(-1))]);
            rhs.push(int(-1));
        }
        let mut proj = Vec::with_capacity(self.xdim);
        for k in 0..self.xdim {
            let mut r = sparse_add(&self.proj[k], &shifted(&other.proj[k], d1));
            let dt = &self.offset[k] - &other.offset[k];
            if !dt.is_zero() {
                r.push((lambda, dt));
            }
            proj.push(r);
        }
        Ok(ExtendedFormulation {
            xdim: self.xdim,
            ydim: d1 + d2 + 1,
            rows,
            rhs,
            proj,
            offset: other.offset.clone(),
            empty: false,
            reverse_empty: true,
        })
    }

    fn check_dim(&self, other: &ExtendedFormulation) -> Result<()> {
        if self.xdim != other.xdim {
            return Err(Error::Dimension {
                expected: self.xdim,
                got: other.xdim,
            });
        }
        Ok(())
    }

    /// Test helper: the same EF with row `i` removed.
    pub fn without_row(&self, i: usize) -> ExtendedFormulation {
        let mut out = self.clone();
        out.rows.remove(i);
        out.rhs.remove(i);
        out.reverse_empty = out.has_contradictory_opposite_pair();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn cube_shape() {
        let c = ExtendedFormulation::cube(3);
        assert_eq!(c.ef_rows(), 6);
        assert_eq!(c.ydim(), 3);
        assert!(c.reverse_empty());
        assert!(c.as_hrep().is_some());
        let one = ExtendedFormulation::cube(1);
        assert!(one.satisfies(&[frac(1, 2)]));
        assert!(!one.satisfies(&[int(2)]));
    }

    #[test]
    fn from_hrep_appends_cube() {
        assert_eq!(
            ExtendedFormulation::from_hrep(2, &[]).unwrap(),
            ExtendedFormulation::cube(2)
        );
        let q = ExtendedFormulation::from_hrep(2, &[(vec![int(1), int(1)], int(1))]).unwrap();
        assert_eq!(q.ef_rows(), 5);
        assert!(!q.satisfies(&[int(0), int(0)]));
    }

    #[test]
    fn face_adds_two_rows() {
        let f = ExtendedFormulation::cube(2).face_restrict(0, true).unwrap();
        assert_eq!(f.ef_rows(), 6);
        assert!(f.satisfies(&[int(1), frac(1, 3)]));
        assert!(!f.satisfies(&[frac(1, 2), int(0)]));
    }

    #[test]
    fn intersect_ties_projections() {
        let c = ExtendedFormulation::cube(2);
        let a = c.face_restrict(0, true).unwrap();
        let b = c.face_restrict(1, true).unwrap();
        let p = a.intersect(&b).unwrap();
        assert_eq!(p.ydim(), 4);
        assert_eq!(p.ef_rows(), 6 + 6 + 4);
        assert!(p.satisfies(&[int(1), int(1), int(1), int(1)]));
        assert!(!p.satisfies(&[int(1), int(0), int(1), int(0)]));
        assert!(a.intersect(&ExtendedFormulation::cube(3)).is_err());
    }

    #[test]
    fn union_elides_lambda_rows_and_empty_arms() {
        let c = ExtendedFormulation::cube(2);
        let a = c.face_restrict(0, false).unwrap();
        let b = c.face_restrict(0, true).unwrap();
        let u = a.balas_union(&b).unwrap();
        assert_eq!(u.ydim(), 5);
        assert_eq!(u.ef_rows(), 12, "both arms reverse-empty: λ rows implied");
        // midpoint: λ = 1/2 with y1 = (0, 0)/2 ... x = (1/2, 1/2)
        let y = vec![int(0), frac(1, 2), frac(1, 2), int(0), frac(1, 2)];
        assert!(u.satisfies(&y));
        assert_eq!(u.project(&y), vec![frac(1, 2), frac(1, 2)]);
        let e = ExtendedFormulation::empty(2);
        assert_eq!(a.balas_union(&e).unwrap(), a);
        assert_eq!(e.balas_union(&a).unwrap(), a);
    }

    #[test]
    fn union_keeps_lambda_rows_without_certificate() {
        let p = ExtendedFormulation::from_parts(
            1,
            1,
            vec![(vec![(0, int(1))], int(0))],
            vec![vec![(0, int(1))]],
            vec![int(0)],
        )
        .unwrap();
        assert!(!p.reverse_empty());
        let u = p.balas_union(&ExtendedFormulation::cube(1)).unwrap();
        assert_eq!(u.ef_rows(), 1 + 2 + 2);
    }

    #[test]
    fn sparse_add_merges() {
        let a = vec![(0, int(1)), (2, int(3))];
        let b = vec![(1, int(1)), (2, int(-3))];
        assert_eq!(sparse_add(&a, &b), vec![(0, int(1)), (1, int(1))]);
    }
}
