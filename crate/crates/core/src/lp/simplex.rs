//! Revised simplex over a standard form `max cᵀu  s.t.  M u = r, u ≥ 0`,
//! generic over the number type. Phase one uses one artificial column per
//! row; a dual simplex is available for repairing primal infeasibility of a
//! warm-started basis.

use super::lu::Lu;
use super::scalar::Scalar;

const NONE: usize = usize::MAX;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone)]
pub(crate) struct StdForm<F> {
    pub nrows: usize,
    pub cols: Vec<Vec<(usize, F)>>,
    pub cost: Vec<F>,
    pub rhs: Vec<F>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pricing {
    Dantzig,
    Bland,
}

#[derive(Debug, Clone)]
pub(crate) enum SfResult<F> {
    Optimal,
    /// Improving ray over structural columns.
    Unbounded(Vec<(usize, F)>),
    Infeasible,
    /// Iteration cap or numerical breakdown (float only in practice).
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Debug, Clone)]
struct Eta<F> {
    r: usize,
    alpha: Vec<(usize, F)>,
    piv: F,
}

pub(crate) struct Simplex<'a, F: Scalar> {
    sf: &'a StdForm<F>,
    m: usize,
    art: Vec<Vec<(usize, F)>>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    lu: Lu<F>,
    etas: Vec<Eta<F>>,
    xb: Vec<F>,
    tol: f64,
    pricing: Pricing,
    pub pivots: usize,
}

impl<'a, F: Scalar> Simplex<'a, F> {
    /// Starts from the all-artificial basis.
    pub fn new(sf: &'a StdForm<F>, pricing: Pricing) -> Simplex<'a, F> {
        let d = sf.nrows;
        let m = sf.cols.len();
        let art: Vec<Vec<(usize, F)>> = (0..d)
            .map(|r| {
                let s = if sf.rhs[r].sign(0.0) < 0 {
                    F::one().neg()
                } else {
                    F::one()
                };
                vec![(r, s)]
            })
            .collect();
        let basis: Vec<usize> = (m..m + d).collect();
        let mut s = Simplex {
            sf,
            m,
            art,
            basis,
            pos: Vec::new(),
            lu: Lu::factor(0, &[]).unwrap(),
            etas: Vec::new(),
            xb: Vec::new(),
            tol: if F::EXACT { 0.0 } else { 1e-9 },
            pricing,
            pivots: 0,
        };
        s.refactor().expect("artificial basis is nonsingular");
        s
    }

    /// Starts from a given basis; `None` if it is singular or malformed.
    pub fn with_basis(
        sf: &'a StdForm<F>,
        basis: &[usize],
        pricing: Pricing,
    ) -> Option<Simplex<'a, F>> {
        let mut s = Simplex::new(sf, pricing);
        if basis.len() != sf.nrows || basis.iter().any(|&j| j >= s.m + sf.nrows) {
            return None;
        }
        s.basis = basis.to_vec();
        s.refactor().ok()?;
        Some(s)
    }

    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    fn ncols(&self) -> usize {
        self.m + self.sf.nrows
    }

    fn col(&self, j: usize) -> &[(usize, F)] {
        if j < self.m {
            &self.sf.cols[j]
        } else {
            &self.art[j - self.m]
        }
    }

    fn cost(&self, j: usize, phase: Phase) -> F {
        match phase {
            Phase::One if j >= self.m => F::one().neg(),
            Phase::One => F::zero(),
            Phase::Two if j < self.m => self.sf.cost[j].clone(),
            Phase::Two => F::zero(),
        }
    }

    fn refactor(&mut self) -> Result<(), ()> {
        let d = self.sf.nrows;
        let cols: Vec<&[(usize, F)]> = self.basis.iter().map(|&j| self.col(j)).collect();
        self.lu = Lu::factor(d, &cols).map_err(|_| ())?;
        self.etas.clear();
        self.pos = vec![NONE; self.ncols()];
        for (p, &j) in self.basis.iter().enumerate() {
            if self.pos[j] != NONE {
                return Err(());
            }
            self.pos[j] = p;
        }
        self.xb = self.ftran_dense(self.sf.rhs.clone());
        if !F::EXACT {
            for v in &mut self.xb {
                if v.sign(self.tol) == 0 {
                    *v = F::zero();
                }
            }
        }
        Ok(())
    }

    fn ftran_dense(&self, v: Vec<F>) -> Vec<F> {
        let mut x = self.lu.solve(&v);
        for e in &self.etas {
            if x[e.r].is_zero() {
                continue;
            }
            let xr = x[e.r].div(&e.piv);
            for (i, a) in &e.alpha {
                if *i != e.r {
                    x[*i].sub_mul(a, &xr);
                }
            }
            x[e.r] = xr;
        }
        x
    }

    fn ftran(&self, col: &[(usize, F)]) -> Vec<F> {
        let mut v = vec![F::zero(); self.sf.nrows];
        for (i, a) in col {
            v[*i] = a.clone();
        }
        self.ftran_dense(v)
    }

    fn btran(&self, mut c: Vec<F>) -> Vec<F> {
        for e in self.etas.iter().rev() {
            let mut acc = c[e.r].clone();
            for (i, a) in &e.alpha {
                if *i != e.r {
                    acc.sub_mul(a, &c[*i]);
                }
            }
            c[e.r] = acc.div(&e.piv);
        }
        self.lu.solve_transpose(&c)
    }

    fn duals(&self, phase: Phase) -> Vec<F> {
        let cb: Vec<F> = self.basis.iter().map(|&j| self.cost(j, phase)).collect();
        self.btran(cb)
    }

    /// Row duals for the phase-two objective.
    pub fn row_duals(&self) -> Vec<F> {
        self.duals(Phase::Two)
    }

    fn dot_col(&self, y: &[F], j: usize) -> F {
        let mut acc = F::zero();
        for (i, a) in self.col(j) {
            if !y[*i].is_zero() {
                acc = acc.add(&a.mul(&y[*i]));
            }
        }
        acc
    }

    fn reduced_cost(&self, pi: &[F], j: usize, phase: Phase) -> F {
        self.cost(j, phase).sub(&self.dot_col(pi, j))
    }

    /// Values of the structural variables at the current basis.
    pub fn structural_values(&self) -> Vec<F> {
        let mut u = vec![F::zero(); self.m];
        for (p, &j) in self.basis.iter().enumerate() {
            if j < self.m {
                u[j] = self.xb[p].clone();
            }
        }
        u
    }

    fn artificial_infeasibility(&self) -> bool {
        self.basis
            .iter()
            .zip(&self.xb)
            .any(|(&j, v)| j >= self.m && v.sign(self.tol) != 0)
    }

    pub fn primal_feasible(&self) -> bool {
        self.xb.iter().all(|v| v.sign(self.tol) >= 0)
    }

    /// Every structural nonbasic column prices out for phase two.
    pub fn dual_feasible(&self) -> bool {
        let pi = self.duals(Phase::Two);
        (0..self.m)
            .filter(|&j| self.pos[j] == NONE)
            .all(|j| self.reduced_cost(&pi, j, Phase::Two).sign(self.tol) <= 0)
    }

    fn pivot(&mut self, q: usize, r: usize, alpha: Vec<F>, theta: F) {
        for (i, a) in alpha.iter().enumerate() {
            if i != r && !a.is_zero() {
                self.xb[i].sub_mul(a, &theta);
            }
        }
        self.xb[r] = theta;
        let piv = alpha[r].clone();
        let sparse: Vec<(usize, F)> = alpha
            .into_iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .collect();
        self.etas.push(Eta {
            r,
            alpha: sparse,
            piv,
        });
        let old = self.basis[r];
        self.pos[old] = NONE;
        self.basis[r] = q;
        self.pos[q] = r;
        self.pivots += 1;
        if self.etas.len() >= REFACTOR_EVERY {
            if self.refactor().is_err() {
                // keep the eta file; the caller notices through a stall
                self.etas.clear();
            }
        } else if !F::EXACT {
            for v in &mut self.xb {
                if v.sign(self.tol) == 0 {
                    *v = F::zero();
                }
            }
        }
    }

    fn iteration_cap(&self) -> usize {
        50 * (self.ncols() + 10)
    }

    fn primal(&mut self, phase: Phase) -> SfResult<F> {
        let mut bland = self.pricing == Pricing::Bland;
        let mut stale = 0usize;
        for _ in 0..self.iteration_cap() {
            let pi = self.duals(phase);
            let mut enter = NONE;
            let mut best = F::zero();
            for j in 0..self.m {
                if self.pos[j] != NONE {
                    continue;
                }
                let dj = self.reduced_cost(&pi, j, phase);
                if dj.sign(self.tol) > 0 {
                    if bland {
                        enter = j;
                        best = dj;
                        break;
                    }
                    if enter == NONE || best.lt(&dj) {
                        enter = j;
                        best = dj;
                    }
                }
            }
            if enter == NONE {
                return SfResult::Optimal;
            }
            let alpha = self.ftran(self.col(enter));
            let Some(r) = self.ratio_test(&alpha) else {
                let mut ray = vec![(enter, F::one())];
                for (p, a) in alpha.iter().enumerate() {
                    if a.sign(self.tol) != 0 {
                        let j = self.basis[p];
                        if j >= self.m {
                            return SfResult::Stalled;
                        }
                        ray.push((j, a.neg()));
                    }
                }
                ray.sort_by_key(|e| e.0);
                return SfResult::Unbounded(ray);
            };
            let theta = if self.xb[r].sign(self.tol) <= 0 {
                F::zero()
            } else {
                self.xb[r].div(&alpha[r])
            };
            if theta.is_zero() {
                stale += 1;
                if stale > 200 && !bland {
                    bland = true;
                }
            } else {
                stale = 0;
            }
            self.pivot(enter, r, alpha, theta);
        }
        SfResult::Stalled
    }

    fn ratio_test(&self, alpha: &[F]) -> Option<usize> {
        if F::EXACT {
            let mut best: Option<(usize, F)> = None;
            for (p, a) in alpha.iter().enumerate() {
                if a.sign(0.0) <= 0 {
                    continue;
                }
                let t = self.xb[p].div(a);
                best = match best {
                    None => Some((p, t)),
                    Some((bp, bt)) => {
                        if t.lt(&bt) || (!bt.lt(&t) && self.basis[p] < self.basis[bp]) {
                            Some((p, t))
                        } else {
                            Some((bp, bt))
                        }
                    }
                };
            }
            return best.map(|b| b.0);
        }
        let piv_tol = 1e-9;
        let feas_tol = 1e-9;
        let mut theta_max = f64::INFINITY;
        for (p, a) in alpha.iter().enumerate() {
            let am = a.sign(piv_tol);
            if am > 0 {
                let x = self.xb[p].magnitude() * f64::from(self.xb[p].sign(0.0));
                theta_max = theta_max.min((x.max(0.0) + feas_tol) / a.magnitude());
            }
        }
        if theta_max.is_infinite() {
            return None;
        }
        let mut best = NONE;
        let mut best_a = 0.0;
        for (p, a) in alpha.iter().enumerate() {
            if a.sign(piv_tol) > 0 {
                let x = self.xb[p].magnitude() * f64::from(self.xb[p].sign(0.0));
                if x.max(0.0) / a.magnitude() <= theta_max && a.magnitude() > best_a {
                    best = p;
                    best_a = a.magnitude();
                }
            }
        }
        Some(best)
    }

    /// Dual simplex on the phase-two objective; needs a dual feasible basis.
    fn dual(&mut self) -> SfResult<F> {
        for _ in 0..self.iteration_cap() {
            let mut leave = NONE;
            for (p, v) in self.xb.iter().enumerate() {
                if v.sign(self.tol) < 0 {
                    let better = match self.pricing {
                        Pricing::Bland => leave == NONE || self.basis[p] < self.basis[leave],
                        Pricing::Dantzig => leave == NONE || v.lt(&self.xb[leave]),
                    };
                    if better {
                        leave = p;
                    }
                }
            }
            if leave == NONE {
                return SfResult::Optimal;
            }
            let mut e = vec![F::zero(); self.sf.nrows];
            e[leave] = F::one();
            let rho = self.btran(e);
            let pi = self.duals(Phase::Two);
            let mut enter = NONE;
            let mut best: Option<F> = None;
            for j in 0..self.m {
                if self.pos[j] != NONE {
                    continue;
                }
                let arj = self.dot_col(&rho, j);
                if arj.sign(self.tol) >= 0 {
                    continue;
                }
                let ratio = self.reduced_cost(&pi, j, Phase::Two).div(&arj);
                if best.as_ref().is_none_or(|b| ratio.lt(b)) {
                    best = Some(ratio);
                    enter = j;
                }
            }
            if enter == NONE {
                return SfResult::Infeasible;
            }
            let alpha = self.ftran(self.col(enter));
            if alpha[leave].sign(self.tol) >= 0 {
                return SfResult::Stalled;
            }
            let theta = self.xb[leave].div(&alpha[leave]);
            self.pivot(enter, leave, alpha, theta);
        }
        SfResult::Stalled
    }

    /// Replaces basic artificial columns by structural ones where possible.
    /// Artificials left in the basis sit on redundant rows.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.sf.nrows {
            if self.basis[r] < self.m {
                continue;
            }
            let mut e = vec![F::zero(); self.sf.nrows];
            e[r] = F::one();
            let rho = self.btran(e);
            let mut enter = NONE;
            let mut best = 0.0;
            for j in 0..self.m {
                if self.pos[j] != NONE {
                    continue;
                }
                let v = self.dot_col(&rho, j);
                if v.sign(if F::EXACT { 0.0 } else { 1e-7 }) != 0 {
                    if F::EXACT {
                        enter = j;
                        break;
                    }
                    if v.magnitude() > best {
                        best = v.magnitude();
                        enter = j;
                    }
                }
            }
            if enter != NONE {
                let alpha = self.ftran(self.col(enter));
                if alpha[r].sign(self.tol) == 0 {
                    continue;
                }
                let theta = self.xb[r].div(&alpha[r]);
                self.pivot(enter, r, alpha, theta);
            }
        }
    }

    /// Runs to completion from the current basis.
    pub fn solve(&mut self) -> SfResult<F> {
        if !self.primal_feasible() {
            if self.dual_feasible() {
                match self.dual() {
                    SfResult::Optimal => {}
                    other => return other,
                }
            } else {
                let fresh = Simplex::new(self.sf, self.pricing);
                let pivots = self.pivots;
                *self = fresh;
                self.pivots = pivots;
            }
        }
        if self.artificial_infeasibility() {
            match self.primal(Phase::One) {
                SfResult::Optimal => {}
                SfResult::Unbounded(_) | SfResult::Stalled => return SfResult::Stalled,
                SfResult::Infeasible => return SfResult::Infeasible,
            }
            if self.artificial_infeasibility() {
                return SfResult::Infeasible;
            }
        }
        self.drive_out_artificials();
        self.primal(Phase::Two)
    }
}
