//! Exact linear programming over extended formulations.
//!
//! Every LP `min gᵀy s.t. Ay ≥ b` is solved through its dual standard form
//! `max bᵀu s.t. Aᵀu = g, u ≥ 0`. By default a floating-point simplex pass
//! proposes a basis and the exact rational simplex finishes from it; the
//! returned optimum, witness and multipliers are always exact and checked
//! by rational arithmetic before they are handed out.

mod lu;
mod presolve;
mod scalar;
mod simplex;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::{sparse_dot, ExtendedFormulation, SparseVec};
use crate::rational::{dot, Rational};
use presolve::{presolve, Presolve};

use simplex::{Pricing, SfResult, Simplex, StdForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Min,
    Max,
}

/// How the simplex is driven. Both strategies return exact, certified answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Float pass chooses a basis, exact pass repairs and certifies it.
    #[default]
    Guided,
    /// Exact arithmetic with Bland's rule from the first pivot.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// Result of [`optimize`]. `multipliers` holds one entry per EF row: the
/// optimal dual solution when optimal, a Farkas ray when infeasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: Option<Rational>,
    pub y: Option<Vec<Rational>>,
    pub x: Option<Vec<Rational>>,
    pub multipliers: Vec<Rational>,
}

/// Row system `min obj·y s.t. rows·y ≥ rhs` over `nvars` variables.
#[derive(Debug, Clone)]
pub(crate) struct RowLp {
    pub nvars: usize,
    pub rows: Vec<SparseVec>,
    pub rhs: Vec<Rational>,
    pub obj: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub(crate) enum RowSolution {
    Optimal {
        y: Vec<Rational>,
        u: Vec<Rational>,
        value: Rational,
    },
    Infeasible {
        ray: Vec<Rational>,
    },
    Unbounded,
}

fn std_form<F: scalar::Scalar>(lp: &RowLp, obj_zero: bool) -> StdForm<F> {
    let mut cols: Vec<Vec<(usize, F)>> = Vec::with_capacity(lp.rows.len());
    for r in &lp.rows {
        cols.push(r.iter().map(|(j, v)| (*j, F::from_rational(v))).collect());
    }
    StdForm {
        nrows: lp.nvars,
        cols,
        cost: lp.rhs.iter().map(F::from_rational).collect(),
        rhs: if obj_zero {
            vec![F::zero(); lp.nvars]
        } else {
            lp.obj.iter().map(F::from_rational).collect()
        },
    }
}

enum Exact {
    Optimal { y: Vec<Rational>, u: Vec<Rational> },
    Ray(Vec<Rational>),
    Infeasible,
}

fn run_exact(sf: &StdForm<Rational>, warm: Option<&[usize]>) -> Exact {
    let mut s = warm
        .and_then(|b| Simplex::with_basis(sf, b, Pricing::Bland))
        .unwrap_or_else(|| Simplex::new(sf, Pricing::Bland));
    match s.solve() {
        SfResult::Optimal => Exact::Optimal {
            y: s.row_duals(),
            u: s.structural_values(),
        },
        SfResult::Unbounded(ray) => {
            let mut r = vec![Rational::zero(); sf.cols.len()];
            for (j, v) in ray {
                r[j] = v;
            }
            Exact::Ray(r)
        }
        SfResult::Infeasible => Exact::Infeasible,
        SfResult::Stalled => {
            // exact Bland cannot cycle; only a warm start can leave us here
            if warm.is_some() {
                run_exact(sf, None)
            } else {
                unreachable!("exact simplex stalled")
            }
        }
    }
}

fn run(lp: &RowLp, obj_zero: bool, strategy: Strategy) -> Exact {
    let sf: StdForm<Rational> = std_form(lp, obj_zero);
    let warm = match strategy {
        Strategy::Exact => None,
        Strategy::Guided => {
            let sff: StdForm<f64> = std_form(lp, obj_zero);
            let mut s = Simplex::new(&sff, Pricing::Dantzig);
            match s.solve() {
                SfResult::Stalled => None,
                _ => Some(s.basis().to_vec()),
            }
        }
    };
    run_exact(&sf, warm.as_deref())
}

fn solve_core(lp: &RowLp, strategy: Strategy) -> RowSolution {
    match run(lp, false, strategy) {
        Exact::Optimal { y, u } => {
            let value = dot(&lp.obj, &y);
            RowSolution::Optimal { y, u, value }
        }
        Exact::Ray(ray) => RowSolution::Infeasible { ray },
        Exact::Infeasible => match run(lp, true, strategy) {
            Exact::Ray(ray) => RowSolution::Infeasible { ray },
            _ => RowSolution::Unbounded,
        },
    }
}

fn certify(lp: &RowLp, sol: &RowSolution) -> bool {
    match sol {
        RowSolution::Optimal { y, u, value } => {
            if y.len() != lp.nvars || u.len() != lp.rows.len() {
                return false;
            }
            let primal = lp
                .rows
                .iter()
                .zip(&lp.rhs)
                .all(|(a, b)| sparse_dot(a, y) >= *b);
            let mut g = vec![Rational::zero(); lp.nvars];
            for (a, ui) in lp.rows.iter().zip(u) {
                for (j, v) in a {
                    g[*j] += ui * v;
                }
            }
            let dual_value: Rational = lp.rhs.iter().zip(u).map(|(b, ui)| b * ui).sum();
            primal
                && u.iter().all(|v| !v.is_negative())
                && g == lp.obj
                && dual_value == *value
                && dot(&lp.obj, y) == *value
        }
        RowSolution::Infeasible { ray } => farkas_ok(&lp.rows, &lp.rhs, lp.nvars, ray),
        RowSolution::Unbounded => true,
    }
}

/// `r ≥ 0`, `Σ r_i a_i = 0` and `Σ r_i b_i > 0`.
pub(crate) fn farkas_ok(rows: &[SparseVec], rhs: &[Rational], nvars: usize, r: &[Rational]) -> bool {
    if r.len() != rows.len() || r.iter().any(|v| v.is_negative()) {
        return false;
    }
    let mut g = vec![Rational::zero(); nvars];
    for (a, ri) in rows.iter().zip(r) {
        if ri.is_zero() {
            continue;
        }
        for (j, v) in a {
            g[*j] += ri * v;
        }
    }
    let val: Rational = rhs.iter().zip(r).map(|(b, ri)| b * ri).sum();
    g.iter().all(Zero::is_zero) && val.is_positive()
}

pub(crate) fn solve_rows(lp: &RowLp, strategy: Strategy) -> RowSolution {
    let sol = match presolve(lp) {
        Presolve::ZeroRowConflict(i) => {
            let mut ray = vec![Rational::zero(); lp.rows.len()];
            ray[i] = Rational::from_integer(1.into());
            RowSolution::Infeasible { ray }
        }
        Presolve::GiveUp => solve_core(lp, strategy),
        Presolve::Reduced(p) => match solve_core(&p.lp, strategy) {
            RowSolution::Optimal { y, u, value } => RowSolution::Optimal {
                y: p.primal(&y),
                u: p.multipliers(lp, &u, &lp.obj),
                value: value + &p.constant,
            },
            RowSolution::Infeasible { ray } => RowSolution::Infeasible {
                ray: p.multipliers(lp, &ray, &vec![Rational::zero(); lp.nvars]),
            },
            RowSolution::Unbounded => RowSolution::Unbounded,
        },
    };
    if certify(lp, &sol) {
        return sol;
    }
    let fallback = solve_core(lp, Strategy::Exact);
    assert!(certify(lp, &fallback), "exact simplex produced an uncertified answer");
    fallback
}

fn objective_in_y(ef: &ExtendedFormulation, c: &[Rational]) -> Vec<Rational> {
    let mut g = vec![Rational::zero(); ef.ydim()];
    for (k, ck) in c.iter().enumerate() {
        if ck.is_zero() {
            continue;
        }
        for (j, v) in &ef.proj()[k] {
            g[*j] += ck * v;
        }
    }
    g
}

fn row_lp(ef: &ExtendedFormulation, obj: Vec<Rational>) -> RowLp {
    RowLp {
        nvars: ef.ydim(),
        rows: ef.rows().to_vec(),
        rhs: ef.rhs().to_vec(),
        obj,
    }
}

/// Exact optimum of `c·x` over the projected set of `ef`.
pub fn optimize(ef: &ExtendedFormulation, c: &[Rational], sense: Sense) -> Result<LpOutcome> {
    optimize_with(ef, c, sense, Strategy::default())
}

pub fn optimize_with(
    ef: &ExtendedFormulation,
    c: &[Rational],
    sense: Sense,
    strategy: Strategy,
) -> Result<LpOutcome> {
    if c.len() != ef.xdim() {
        return Err(Error::Dimension {
            expected: ef.xdim(),
            got: c.len(),
        });
    }
    if ef.is_empty_marker() {
        return Err(Error::EmptyInput);
    }
    let signed: Vec<Rational> = match sense {
        Sense::Min => c.to_vec(),
        Sense::Max => c.iter().map(|v| -v).collect(),
    };
    let lp = row_lp(ef, objective_in_y(ef, &signed));
    match solve_rows(&lp, strategy) {
        RowSolution::Optimal { y, u, value } => {
            let min_value = value + dot(&signed, ef.offset());
            let value = match sense {
                Sense::Min => min_value,
                Sense::Max => -min_value,
            };
            let x = ef.project(&y);
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                value: Some(value),
                y: Some(y),
                x: Some(x),
                multipliers: u,
            })
        }
        RowSolution::Infeasible { ray } => Ok(LpOutcome {
            status: LpStatus::Infeasible,
            value: None,
            y: None,
            x: None,
            multipliers: ray,
        }),
        RowSolution::Unbounded => Err(Error::Unbounded),
    }
}

impl LpOutcome {
    /// Re-checks the outcome against `ef` by rational arithmetic: witness
    /// feasibility plus strong duality, or the Farkas ray.
    pub fn verify(&self, ef: &ExtendedFormulation, c: &[Rational], sense: Sense) -> bool {
        match self.status {
            LpStatus::Infeasible => {
                farkas_ok(ef.rows(), ef.rhs(), ef.ydim(), &self.multipliers)
            }
            LpStatus::Optimal => {
                let (Some(y), Some(x), Some(value)) = (&self.y, &self.x, &self.value) else {
                    return false;
                };
                let signed: Vec<Rational> = match sense {
                    Sense::Min => c.to_vec(),
                    Sense::Max => c.iter().map(|v| -v).collect(),
                };
                let lp = row_lp(ef, objective_in_y(ef, &signed));
                let shift = dot(&signed, ef.offset());
                let min_value = match sense {
                    Sense::Min => value.clone(),
                    Sense::Max => -value.clone(),
                };
                ef.satisfies(y)
                    && ef.project(y) == *x
                    && dot(c, x) == *value
                    && certify(
                        &lp,
                        &RowSolution::Optimal {
                            y: y.clone(),
                            u: self.multipliers.clone(),
                            value: min_value - shift,
                        },
                    )
            }
        }
    }
}

/// Emptiness of the projected set, with evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emptiness {
    pub empty: bool,
    /// Farkas ray over the EF rows (absent for the empty marker).
    pub certificate: Option<Vec<Rational>>,
    /// A feasible `y` when nonempty.
    pub witness: Option<Vec<Rational>>,
}

pub fn is_empty(ef: &ExtendedFormulation) -> Emptiness {
    is_empty_with(ef, Strategy::default())
}

pub fn is_empty_with(ef: &ExtendedFormulation, strategy: Strategy) -> Emptiness {
    if ef.is_empty_marker() {
        return Emptiness {
            empty: true,
            certificate: None,
            witness: None,
        };
    }
    let lp = row_lp(ef, vec![Rational::zero(); ef.ydim()]);
    match solve_rows(&lp, strategy) {
        RowSolution::Optimal { y, .. } => Emptiness {
            empty: false,
            certificate: None,
            witness: Some(y),
        },
        RowSolution::Infeasible { ray } => Emptiness {
            empty: true,
            certificate: Some(ray),
            witness: None,
        },
        RowSolution::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Membership of `x` with evidence: a `y` with `Ay ≥ b, Ty + t = x`, or a
/// Farkas ray over the EF rows followed by the `2n` rows `±(Ty) ≥ ±(x - t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub contained: bool,
    pub witness: Option<Vec<Rational>>,
    pub certificate: Option<Vec<Rational>>,
}

fn membership_lp(ef: &ExtendedFormulation, x: &[Rational]) -> RowLp {
    let mut lp = row_lp(ef, vec![Rational::zero(); ef.ydim()]);
    for (k, xk) in x.iter().enumerate().take(ef.xdim()) {
        let target = xk - &ef.offset()[k];
        lp.rows.push(ef.proj()[k].clone());
        lp.rhs.push(target.clone());
        lp.rows
            .push(ef.proj()[k].iter().map(|(j, v)| (*j, -v)).collect());
        lp.rhs.push(-target);
    }
    lp
}

pub fn membership(ef: &ExtendedFormulation, x: &[Rational]) -> Result<Membership> {
    if x.len() != ef.xdim() {
        return Err(Error::Dimension {
            expected: ef.xdim(),
            got: x.len(),
        });
    }
    if ef.is_empty_marker() {
        return Ok(Membership {
            contained: false,
            witness: None,
            certificate: None,
        });
    }
    let lp = membership_lp(ef, x);
    Ok(match solve_rows(&lp, Strategy::default()) {
        RowSolution::Optimal { y, .. } => Membership {
            contained: true,
            witness: Some(y),
            certificate: None,
        },
        RowSolution::Infeasible { ray } => Membership {
            contained: false,
            witness: None,
            certificate: Some(ray),
        },
        RowSolution::Unbounded => unreachable!("zero objective cannot be unbounded"),
    })
}

pub fn contains_point(ef: &ExtendedFormulation, x: &[Rational]) -> Result<bool> {
    Ok(membership(ef, x)?.contained)
}

impl Membership {
    pub fn verify(&self, ef: &ExtendedFormulation, x: &[Rational]) -> bool {
        if ef.is_empty_marker() {
            return !self.contained;
        }
        match (&self.witness, &self.certificate) {
            (Some(y), None) => self.contained && ef.satisfies(y) && ef.project(y) == x,
            (None, Some(r)) => {
                let lp = membership_lp(ef, x);
                !self.contained && farkas_ok(&lp.rows, &lp.rhs, lp.nvars, r)
            }
            _ => false,
        }
    }
}
