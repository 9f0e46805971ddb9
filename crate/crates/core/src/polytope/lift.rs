//! The lifted relaxation `φ(Q)`: literals become faces of `Q`, conjunctions
//! intersections and disjunctions convex hulls of unions.

use std::collections::HashMap;

use serde::Serialize;

use super::ExtendedFormulation;
use crate::error::{Error, Result};
use crate::formula::{Formula, Node};
use crate::lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftOptions {
    /// Compile each maximal subtree of `∧` and literals into one face of `Q`.
    pub collapse: bool,
    /// Replace an empty result by the empty marker (one extra LP).
    pub decide_root: bool,
}

impl Default for LiftOptions {
    fn default() -> Self {
        LiftOptions {
            collapse: true,
            decide_root: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EmptinessSource {
    Lp,
    Memo,
    /// Known without an LP: empty marker, conflicting literals, or a union
    /// whose arms were already decided.
    Structural,
}

/// Emptiness of one union arm (or of the root), by preorder node index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeDecision {
    pub node: usize,
    pub empty: bool,
    pub source: EmptinessSource,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LiftReport {
    pub n: usize,
    pub rows_in: usize,
    pub size: usize,
    pub rows_out: usize,
    /// Number of maximal subtrees built from `∧` and literals only.
    pub tau: usize,
    pub or_count: usize,
    pub and_count: usize,
    pub lp_calls: usize,
    pub decisions: Vec<NodeDecision>,
}

impl LiftReport {
    /// `|φ|·(rows(Q)+2) + 2n·#∧`.
    pub fn constructive_bound(&self) -> usize {
        self.size * (self.rows_in + 2) + 2 * self.n * self.and_count
    }

    /// `|φ|·rows(Q)`, the facet-count style bound; reported only.
    pub fn product_bound(&self) -> usize {
        self.size * self.rows_in
    }
}

fn is_pure(node: &Node) -> bool {
    match node {
        Node::Const(_) | Node::Lit { .. } => true,
        Node::And(a, b) => is_pure(a) && is_pure(b),
        Node::Or(..) | Node::Not(_) => false,
    }
}

fn count_tau(node: &Node) -> usize {
    if is_pure(node) {
        return 1;
    }
    match node {
        Node::And(a, b) | Node::Or(a, b) => count_tau(a) + count_tau(b),
        _ => 0,
    }
}

/// Literal fixings of a pure subtree; `None` if they conflict or hit `0`.
fn fixings(node: &Node, out: &mut Vec<(usize, bool)>) -> bool {
    match node {
        Node::Const(v) => *v,
        Node::Lit { var, negated } => {
            let v = !negated;
            if out.iter().any(|&(i, w)| i == *var && w != v) {
                return false;
            }
            if !out.contains(&(*var, v)) {
                out.push((*var, v));
            }
            true
        }
        Node::And(a, b) => fixings(a, out) && fixings(b, out),
        _ => unreachable!("fixings on a subtree containing ∨"),
    }
}

fn node_count(node: &Node) -> usize {
    match node {
        Node::And(a, b) | Node::Or(a, b) => 1 + node_count(a) + node_count(b),
        Node::Not(a) => 1 + node_count(a),
        _ => 1,
    }
}

struct Lifter<'a> {
    q: &'a ExtendedFormulation,
    opts: LiftOptions,
    memo: HashMap<&'a Node, bool>,
    decisions: Vec<NodeDecision>,
    lp_calls: usize,
}

/// Built EF of a subtree plus whether its emptiness is already settled.
struct Built {
    ef: ExtendedFormulation,
    known_empty: Option<bool>,
}

impl<'a> Lifter<'a> {
    fn build(&mut self, node: &'a Node, index: usize) -> Result<Built> {
        let n = self.q.xdim();
        if self.opts.collapse && is_pure(node) {
            let mut fix = Vec::new();
            if !fixings(node, &mut fix) {
                return Ok(Built {
                    ef: ExtendedFormulation::empty(n),
                    known_empty: Some(true),
                });
            }
            let ef = self.q.face_restrict_many(&fix)?;
            let known = ef.is_empty_marker().then_some(true);
            return Ok(Built {
                ef,
                known_empty: known,
            });
        }
        match node {
            Node::Const(true) => Ok(Built {
                ef: self.q.clone(),
                known_empty: None,
            }),
            Node::Const(false) => Ok(Built {
                ef: ExtendedFormulation::empty(n),
                known_empty: Some(true),
            }),
            Node::Lit { var, negated } => {
                let ef = self.q.face_restrict(*var, !negated)?;
                let known = ef.is_empty_marker().then_some(true);
                Ok(Built {
                    ef,
                    known_empty: known,
                })
            }
            Node::Not(_) => Err(Error::NotReduced),
            Node::And(a, b) => {
                let ia = index + 1;
                let ib = ia + node_count(a);
                let ba = self.build(a, ia)?;
                let bb = self.build(b, ib)?;
                let ef = ba.ef.intersect(&bb.ef)?;
                let known = ef.is_empty_marker().then_some(true);
                Ok(Built {
                    ef,
                    known_empty: known,
                })
            }
            Node::Or(a, b) => {
                let ia = index + 1;
                let ib = ia + node_count(a);
                let ba = self.build(a, ia)?;
                let ea = self.decide(a, ia, ba)?;
                let bb = self.build(b, ib)?;
                let eb = self.decide(b, ib, bb)?;
                let both_empty = ea.is_empty_marker() && eb.is_empty_marker();
                Ok(Built {
                    ef: ea.balas_union(&eb)?,
                    known_empty: Some(both_empty),
                })
            }
        }
    }

    /// Settles emptiness of a union arm; empty arms become the marker.
    fn decide(&mut self, node: &'a Node, index: usize, built: Built) -> Result<ExtendedFormulation> {
        let n = self.q.xdim();
        let (empty, source) = if let Some(e) = built.known_empty {
            (e, EmptinessSource::Structural)
        } else if let Some(&e) = self.memo.get(node) {
            (e, EmptinessSource::Memo)
        } else {
            self.lp_calls += 1;
            let e = lp::is_empty(&built.ef).empty;
            self.memo.insert(node, e);
            (e, EmptinessSource::Lp)
        };
        self.decisions.push(NodeDecision {
            node: index,
            empty,
            source,
        });
        Ok(if empty {
            ExtendedFormulation::empty(n)
        } else {
            built.ef
        })
    }
}

/// `φ(Q)` with default options.
pub fn lift(phi: &Formula, q: &ExtendedFormulation) -> Result<(ExtendedFormulation, LiftReport)> {
    lift_with(phi, q, LiftOptions::default())
}

pub fn lift_with(
    phi: &Formula,
    q: &ExtendedFormulation,
    opts: LiftOptions,
) -> Result<(ExtendedFormulation, LiftReport)> {
    if !phi.is_reduced() {
        return Err(Error::NotReduced);
    }
    if phi.n() != q.xdim() {
        return Err(Error::Dimension {
            expected: phi.n(),
            got: q.xdim(),
        });
    }
    let flagged;
    let q = if !q.reverse_empty() && !q.is_empty_marker() {
        let mut c = q.clone();
        c.reverse_empty = c.check_reverse_empty();
        flagged = c;
        &flagged
    } else {
        q
    };
    let mut lifter = Lifter {
        q,
        opts,
        memo: HashMap::new(),
        decisions: Vec::new(),
        lp_calls: 0,
    };
    let root = phi.root();
    let built = lifter.build(root, 0)?;
    let ef = if opts.decide_root && !q.is_empty_marker() {
        lifter.decide(root, 0, built)?
    } else {
        built.ef
    };
    let report = LiftReport {
        n: q.xdim(),
        rows_in: q.ef_rows(),
        size: phi.size(),
        rows_out: ef.ef_rows(),
        tau: count_tau(root),
        or_count: phi.or_count(),
        and_count: phi.and_count(),
        lp_calls: lifter.lp_calls,
        decisions: lifter.decisions,
    };
    Ok((ef, report))
}

/// `φ^k(Q)`; `k = 0` returns `Q`.
pub fn iterate_lift(phi: &Formula, q: &ExtendedFormulation, k: usize) -> Result<ExtendedFormulation> {
    Ok(iterate_lift_with(phi, q, k, LiftOptions::default())?.0)
}

pub fn iterate_lift_with(
    phi: &Formula,
    q: &ExtendedFormulation,
    k: usize,
    opts: LiftOptions,
) -> Result<(ExtendedFormulation, Vec<LiftReport>)> {
    if phi.n() != q.xdim() {
        return Err(Error::Dimension {
            expected: phi.n(),
            got: q.xdim(),
        });
    }
    let mut cur = q.clone();
    let mut reports = Vec::with_capacity(k);
    for _ in 0..k {
        let (next, rep) = lift_with(phi, &cur, opts)?;
        cur = next;
        reports.push(rep);
    }
    Ok((cur, reports))
}
