//! Exact presolve for `min gᵀy s.t. Ay ≥ b`: pairs of opposite rows become
//! equalities and are eliminated by substitution; zero, duplicate and
//! dominated rows are dropped. Postsolve maps primal points and row
//! multipliers back to the original system.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use super::lu::Lu;
use super::RowLp;
use crate::polytope::SparseVec;
use crate::rational::Rational;

pub(crate) enum Presolve {
    Reduced(Box<Presolved>),
    /// Row with zero coefficients and positive right-hand side.
    ZeroRowConflict(usize),
    /// Elimination hit a contradiction; solve the original system instead.
    GiveUp,
}

pub(crate) struct Presolved {
    pub lp: RowLp,
    pub row_origin: Vec<usize>,
    pub free_vars: Vec<usize>,
    /// (pivot variable, equality row over original variables, right-hand side)
    elim: Vec<(usize, SparseVec, Rational)>,
    /// original row pairs `(a, β)` / `(-a, -β)`
    pairs: Vec<(usize, usize)>,
    /// equality index per elimination step
    elim_eq: Vec<usize>,
    pub constant: Rational,
    nvars: usize,
    nrows: usize,
}

fn scaled_sub(row: &SparseVec, f: &Rational, eq: &SparseVec) -> SparseVec {
    // row - f * eq
    let mut out = Vec::with_capacity(row.len() + eq.len());
    let (mut i, mut k) = (0, 0);
    while i < row.len() || k < eq.len() {
        if k == eq.len() || (i < row.len() && row[i].0 < eq[k].0) {
            out.push(row[i].clone());
            i += 1;
        } else if i == row.len() || eq[k].0 < row[i].0 {
            out.push((eq[k].0, -(f * &eq[k].1)));
            k += 1;
        } else {
            let v = &row[i].1 - f * &eq[k].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            k += 1;
        }
    }
    out
}

fn coeff(row: &SparseVec, var: usize) -> Option<&Rational> {
    row.binary_search_by_key(&var, |e| e.0).ok().map(|i| &row[i].1)
}

fn negate(row: &SparseVec) -> SparseVec {
    row.iter().map(|(j, v)| (*j, -v)).collect()
}

/// Keeps, for each coefficient row, only the strongest right-hand side.
fn merge_parallel(rows: Vec<(SparseVec, Rational, usize)>) -> Vec<(SparseVec, Rational, usize)> {
    let mut best: HashMap<SparseVec, usize> = HashMap::new();
    let mut out: Vec<(SparseVec, Rational, usize)> = Vec::new();
    for (a, b, o) in rows {
        match best.get(&a) {
            Some(&k) => {
                if out[k].1 < b {
                    out[k].1 = b;
                    out[k].2 = o;
                }
            }
            None => {
                best.insert(a.clone(), out.len());
                out.push((a, b, o));
            }
        }
    }
    out
}

pub(crate) fn presolve(lp: &RowLp) -> Presolve {
    let d = lp.nvars;
    for (i, (a, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        if a.is_empty() && b.is_positive() {
            return Presolve::ZeroRowConflict(i);
        }
    }
    // opposite pairs
    let mut index: HashMap<(&SparseVec, &Rational), Vec<usize>> = HashMap::new();
    for (i, key) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        if !key.0.is_empty() {
            index.entry(key).or_default().push(i);
        }
    }
    let mut used = vec![false; lp.rows.len()];
    let mut pairs = Vec::new();
    for i in 0..lp.rows.len() {
        if used[i] || lp.rows[i].is_empty() {
            continue;
        }
        let na = negate(&lp.rows[i]);
        let nb = -&lp.rhs[i];
        if let Some(list) = index.get(&(&na, &nb)) {
            if let Some(&j) = list.iter().find(|&&j| !used[j] && j != i) {
                used[i] = true;
                used[j] = true;
                pairs.push((i, j));
            }
        }
    }
    let mut ineq: Vec<Option<(SparseVec, Rational, usize)>> = merge_parallel(
        (0..lp.rows.len())
            .filter(|&i| !used[i] && !lp.rows[i].is_empty())
            .map(|i| (lp.rows[i].clone(), lp.rhs[i].clone(), i))
            .collect(),
    )
    .into_iter()
    .map(Some)
    .collect();
    let mut eqs: Vec<Option<(SparseVec, Rational)>> = pairs
        .iter()
        .map(|&(i, _)| Some((lp.rows[i].clone(), lp.rhs[i].clone())))
        .collect();
    let mut obj: Vec<Rational> = lp.obj.clone();
    let mut constant = Rational::zero();

    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (r, row) in ineq.iter().enumerate() {
        for (j, _) in &row.as_ref().unwrap().0 {
            occ[*j].push(r);
        }
    }
    let mut eq_occ: Vec<Vec<usize>> = vec![Vec::new(); d];
    for (e, row) in eqs.iter().enumerate() {
        for (j, _) in &row.as_ref().unwrap().0 {
            eq_occ[*j].push(e);
        }
    }
    let mut eliminated = vec![false; d];
    let mut elim = Vec::new();
    let mut elim_eq = Vec::new();

    loop {
        let mut pick: Option<usize> = None;
        for (e, row) in eqs.iter().enumerate() {
            if let Some((a, _)) = row {
                if pick.is_none_or(|p| a.len() < eqs[p].as_ref().unwrap().0.len()) {
                    pick = Some(e);
                }
            }
        }
        let Some(e) = pick else { break };
        let (a, beta) = eqs[e].take().unwrap();
        if a.is_empty() {
            if beta.is_zero() {
                continue;
            }
            return Presolve::GiveUp;
        }
        let (p, ap) = a
            .iter()
            .min_by_key(|(j, v)| (occ[*j].len(), !(v.abs().is_one()), *j))
            .map(|(j, v)| (*j, v.clone()))
            .unwrap();
        let rows_p = std::mem::take(&mut occ[p]);
        for r in rows_p {
            let Some((row, b, o)) = ineq[r].take() else { continue };
            let Some(c) = coeff(&row, p).cloned() else {
                ineq[r] = Some((row, b, o));
                continue;
            };
            let f = c / &ap;
            let new_row = scaled_sub(&row, &f, &a);
            let nb = b - &f * &beta;
            if new_row.is_empty() {
                if nb.is_positive() {
                    return Presolve::GiveUp;
                }
                continue;
            }
            for (j, _) in &new_row {
                if coeff(&row, *j).is_none() {
                    occ[*j].push(r);
                }
            }
            ineq[r] = Some((new_row, nb, o));
        }
        let eqs_p = std::mem::take(&mut eq_occ[p]);
        for k in eqs_p {
            let Some((row, b)) = eqs[k].take() else { continue };
            let Some(c) = coeff(&row, p).cloned() else {
                eqs[k] = Some((row, b));
                continue;
            };
            let f = c / &ap;
            let new_row = scaled_sub(&row, &f, &a);
            for (j, _) in &new_row {
                if coeff(&row, *j).is_none() {
                    eq_occ[*j].push(k);
                }
            }
            eqs[k] = Some((new_row, b - &f * &beta));
        }
        if !obj[p].is_zero() {
            let f = &obj[p] / &ap;
            for (j, v) in &a {
                obj[*j] -= &f * v;
            }
            constant += &f * &beta;
        }
        eliminated[p] = true;
        elim.push((p, a, beta));
        elim_eq.push(e);
    }

    let free_vars: Vec<usize> = (0..d).filter(|&j| !eliminated[j]).collect();
    let mut newidx = vec![usize::MAX; d];
    for (k, &j) in free_vars.iter().enumerate() {
        newidx[j] = k;
    }
    let kept = merge_parallel(
        ineq.into_iter()
            .flatten()
            .map(|(a, b, o)| {
                let a: SparseVec = a.into_iter().map(|(j, v)| (newidx[j], v)).collect();
                (a, b, o)
            })
            .collect(),
    );
    let mut rows = Vec::with_capacity(kept.len());
    let mut rhs = Vec::with_capacity(kept.len());
    let mut row_origin = Vec::with_capacity(kept.len());
    for (a, b, o) in kept {
        rows.push(a);
        rhs.push(b);
        row_origin.push(o);
    }
    let reduced_obj = free_vars.iter().map(|&j| obj[j].clone()).collect();
    Presolve::Reduced(Box::new(Presolved {
        lp: RowLp {
            nvars: free_vars.len(),
            rows,
            rhs,
            obj: reduced_obj,
        },
        row_origin,
        free_vars,
        elim,
        pairs,
        elim_eq,
        constant,
        nvars: d,
        nrows: lp.rows.len(),
    }))
}

impl Presolved {
    pub fn primal(&self, z: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.nvars];
        for (k, &j) in self.free_vars.iter().enumerate() {
            y[j] = z[k].clone();
        }
        for (p, a, beta) in self.elim.iter().rev() {
            let mut acc = beta.clone();
            let mut ap = Rational::one();
            for (j, v) in a {
                if j == p {
                    ap = v.clone();
                } else {
                    acc -= v * &y[*j];
                }
            }
            y[*p] = acc / ap;
        }
        y
    }

    /// Lifts multipliers `w` of the reduced rows to the original rows so that
    /// `Σ u_i a_i = g` holds in the original variables (`g = obj`, or zero for
    /// a Farkas ray).
    pub fn multipliers(&self, orig: &RowLp, w: &[Rational], g: &[Rational]) -> Vec<Rational> {
        let mut u = vec![Rational::zero(); self.nrows];
        for (k, &o) in self.row_origin.iter().enumerate() {
            u[o] += &w[k];
        }
        let mut residual = g.to_vec();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, v) in &orig.rows[i] {
                residual[*j] -= ui * v;
            }
        }
        let k = self.elim.len();
        if k == 0 {
            return u;
        }
        let mut slot = vec![usize::MAX; self.nvars];
        for (s, (p, _, _)) in self.elim.iter().enumerate() {
            slot[*p] = s;
        }
        let cols: Vec<Vec<(usize, Rational)>> = self
            .elim_eq
            .iter()
            .map(|&e| {
                let (i, _) = self.pairs[e];
                orig.rows[i]
                    .iter()
                    .filter(|(j, _)| slot[*j] != usize::MAX)
                    .map(|(j, v)| (slot[*j], v.clone()))
                    .collect()
            })
            .collect();
        let refs: Vec<&[(usize, Rational)]> = cols.iter().map(|c| c.as_slice()).collect();
        let lu = Lu::factor(k, &refs).expect("eliminated equalities are independent");
        let r: Vec<Rational> = self
            .elim
            .iter()
            .map(|(p, _, _)| residual[*p].clone())
            .collect();
        let mu = lu.solve(&r);
        for (s, &e) in self.elim_eq.iter().enumerate() {
            let (i, j) = self.pairs[e];
            if mu[s].is_positive() {
                u[i] += &mu[s];
            } else if mu[s].is_negative() {
                u[j] -= &mu[s];
            }
        }
        u
    }
}
