//! Double description: extreme rays of a pointed cone `{h : m_i·h ≥ 0}`.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{dot, primitive, Rational};

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(m: usize) -> Bits {
        Bits(vec![0; m.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn contains(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & b == *b)
    }
}

/// Solves `B X = I` by Gauss–Jordan; `B` must be invertible.
fn inverse(b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let d = b.len();
    let mut m: Vec<Vec<Rational>> = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|k| Rational::from_integer(i64::from(k == i).into())));
            r
        })
        .collect();
    for col in 0..d {
        let p = (col..d).find(|&r| !m[r][col].is_zero()).expect("invertible");
        m.swap(col, p);
        let pv = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v /= &pv;
        }
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pivot) {
                    *v -= &f * p;
                }
            }
        }
    }
    m.into_iter().map(|r| r[d..].to_vec()).collect()
}

/// Indices of a maximal linearly independent subset of `rows`, greedy in order.
pub(crate) fn independent_rows(rows: &[Vec<Rational>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new(); // (pivot col, reduced row)
    let mut picked = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut r = row.clone();
        for (pc, b) in &basis {
            if !r[*pc].is_zero() {
                let f = &r[*pc] / &b[*pc];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pc) = r.iter().position(|v| !v.is_zero()) {
            basis.push((pc, r));
            picked.push(i);
        }
    }
    picked
}

/// Extreme rays of `{h ∈ ℝ^dim : cons_i · h ≥ 0}` as primitive integer vectors,
/// sorted. The cone must be pointed (constraint rank `dim`).
pub(crate) fn extreme_rays(dim: usize, cons: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let m = cons.len();
    let base = independent_rows(cons);
    if base.len() < dim {
        return Err(Error::Invalid("cone is not pointed".into()));
    }
    let bmat: Vec<Vec<Rational>> = base.iter().map(|&i| cons[i].clone()).collect();
    let inv = inverse(&bmat);
    let mut rays: Vec<(Vec<Rational>, Bits)> = (0..dim)
        .map(|k| {
            let col: Vec<Rational> = (0..dim).map(|r| inv[r][k].clone()).collect();
            let mut z = Bits::new(m);
            for (t, &i) in base.iter().enumerate() {
                if t != k {
                    z.set(i);
                }
            }
            (primitive(&col), z)
        })
        .collect();
    let in_base: Vec<bool> = (0..m).map(|i| base.contains(&i)).collect();
    for i in 0..m {
        if in_base[i] {
            continue;
        }
        let vals: Vec<Rational> = rays.iter().map(|(r, _)| dot(&cons[i], r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut fresh = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].1.and(&rays[q].1);
                if (common.count() as usize) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(k, (_, z))| k == p || k == q || !z.contains(&common));
                if !adjacent {
                    continue;
                }
                let v: Vec<Rational> = rays[q]
                    .0
                    .iter()
                    .zip(&rays[p].0)
                    .map(|(a, b)| &vals[p] * a - &vals[q] * b)
                    .collect();
                let mut z = common;
                z.set(i);
                fresh.push((primitive(&v), z));
            }
        }
        let mut next = Vec::with_capacity(rays.len() + fresh.len());
        for (k, (r, mut z)) in rays.into_iter().enumerate() {
            if vals[k].is_zero() {
                z.set(i);
                next.push((r, z));
            } else if vals[k].is_positive() {
                next.push((r, z));
            }
        }
        next.extend(fresh);
        rays = next;
    }
    let mut out: Vec<Vec<Rational>> = rays.into_iter().map(|(r, _)| r).collect();
    out.sort();
    out.dedup();
    Ok(out)
}
