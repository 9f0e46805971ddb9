//! Sparse LU factorization of a square matrix given by columns, with
//! Markowitz-style pivot choice (shortest column, then shortest row).
//!
//! The factorization is stored as the sequence of elimination steps, which
//! supports both `B x = r` and `Bᵀ y = r`.

use super::scalar::Scalar;

#[derive(Debug, Clone)]
struct Step<F> {
    prow: usize,
    pcol: usize,
    pivot: F,
    /// (row, factor): row -= factor * pivot row
    lower: Vec<(usize, F)>,
    /// remaining entries of the pivot row, excluding the pivot column
    upper: Vec<(usize, F)>,
}

#[derive(Debug, Clone)]
pub struct Lu<F> {
    n: usize,
    steps: Vec<Step<F>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Singular {
    /// Column (basis position) that could not be pivoted.
    pub col: usize,
}

const NONE: usize = usize::MAX;

impl<F: Scalar> Lu<F> {
    /// Factors the `n × n` matrix whose column `k` is `cols[k]` (row, value) pairs.
    pub fn factor(n: usize, cols: &[&[(usize, F)]]) -> Result<Lu<F>, Singular> {
        assert_eq!(cols.len(), n);
        let mut rows: Vec<Vec<(usize, F)>> = vec![Vec::new(); n];
        for (k, col) in cols.iter().enumerate() {
            for (i, v) in col.iter() {
                if !v.is_zero() {
                    rows[*i].push((k, v.clone()));
                }
            }
        }
        let mut col_pat: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut col_cnt = vec![0usize; n];
        for (i, row) in rows.iter().enumerate() {
            for (k, _) in row {
                col_pat[*k].push(i);
                col_cnt[*k] += 1;
            }
        }
        let mut row_done = vec![false; n];
        let mut col_done = vec![false; n];
        let mut pos = vec![NONE; n];
        let mut steps = Vec::with_capacity(n);

        for _ in 0..n {
            // shortest active column
            let mut best = NONE;
            for c in 0..n {
                if !col_done[c] && (best == NONE || col_cnt[c] < col_cnt[best]) {
                    best = c;
                    if col_cnt[c] <= 1 {
                        break;
                    }
                }
            }
            let c = best;
            if col_cnt[c] == 0 {
                return Err(Singular { col: c });
            }
            // candidate rows in column c
            let mut cands: Vec<(usize, usize)> = Vec::new(); // (row, index in row)
            let mut max_mag = 0.0f64;
            col_pat[c].retain(|&i| !row_done[i]);
            col_pat[c].sort_unstable();
            col_pat[c].dedup();
            for &i in &col_pat[c] {
                if let Some(idx) = rows[i].iter().position(|(k, _)| *k == c) {
                    max_mag = max_mag.max(rows[i][idx].1.magnitude());
                    cands.push((i, idx));
                }
            }
            if cands.is_empty() || (!F::EXACT && max_mag < 1e-11) {
                return Err(Singular { col: c });
            }
            let threshold = if F::EXACT { 0.0 } else { 0.1 * max_mag };
            let &(p, pidx) = cands
                .iter()
                .filter(|(i, idx)| F::EXACT || rows[*i][*idx].1.magnitude() >= threshold)
                .min_by_key(|(i, _)| rows[*i].len())
                .unwrap();
            let mut prow = std::mem::take(&mut rows[p]);
            let (_, pivot) = prow.swap_remove(pidx);
            row_done[p] = true;
            col_done[c] = true;
            for (k, _) in &prow {
                col_cnt[*k] -= 1;
            }
            col_cnt[c] -= 1;

            let mut lower = Vec::new();
            for &(i, idx) in &cands {
                if i == p {
                    continue;
                }
                let mut row = std::mem::take(&mut rows[i]);
                let (_, v) = row.swap_remove(idx);
                col_cnt[c] -= 1;
                let f = v.div(&pivot);
                for (t, (k, _)) in row.iter().enumerate() {
                    pos[*k] = t;
                }
                for (k, vp) in &prow {
                    if pos[*k] != NONE {
                        row[pos[*k]].1.sub_mul(&f, vp);
                    } else {
                        let mut nv = F::zero();
                        nv.sub_mul(&f, vp);
                        if !nv.is_zero() {
                            pos[*k] = row.len();
                            row.push((*k, nv));
                            col_cnt[*k] += 1;
                            col_pat[*k].push(i);
                        }
                    }
                }
                for (k, _) in &row {
                    pos[*k] = NONE;
                }
                row.retain(|(k, v)| {
                    if v.is_zero() {
                        col_cnt[*k] -= 1;
                        false
                    } else {
                        true
                    }
                });
                rows[i] = row;
                lower.push((i, f));
            }
            steps.push(Step {
                prow: p,
                pcol: c,
                pivot,
                lower,
                upper: prow,
            });
        }
        Ok(Lu { n, steps })
    }

    /// Solves `B x = r`; `r` is indexed by rows, the result by columns.
    pub fn solve(&self, r: &[F]) -> Vec<F> {
        let mut w = r.to_vec();
        for s in &self.steps {
            if w[s.prow].is_zero() {
                continue;
            }
            let wp = w[s.prow].clone();
            for (i, f) in &s.lower {
                w[*i].sub_mul(f, &wp);
            }
        }
        let mut x = vec![F::zero(); self.n];
        for s in self.steps.iter().rev() {
            let mut acc = w[s.prow].clone();
            for (j, v) in &s.upper {
                acc.sub_mul(v, &x[*j]);
            }
            if !acc.is_zero() {
                x[s.pcol] = acc.div(&s.pivot);
            }
        }
        x
    }

    /// Solves `Bᵀ y = r`; `r` is indexed by columns, the result by rows.
    pub fn solve_transpose(&self, r: &[F]) -> Vec<F> {
        let mut w = r.to_vec();
        let mut y = vec![F::zero(); self.n];
        for s in &self.steps {
            if w[s.pcol].is_zero() {
                continue;
            }
            let z = w[s.pcol].div(&s.pivot);
            for (j, v) in &s.upper {
                w[*j].sub_mul(v, &z);
            }
            y[s.prow] = z;
        }
        for s in self.steps.iter().rev() {
            let mut acc = y[s.prow].clone();
            for (i, f) in &s.lower {
                acc.sub_mul(f, &y[*i]);
            }
            y[s.prow] = acc;
        }
        y
    }
}
