//! Boolean formulas over `x1..xn` built from `∧`, `∨`, `¬`, literals and constants.
//!
//! Variables are 0-based internally and 1-based in text. A formula is *reduced*
//! when negation only occurs on literals; its *size* is the number of literal
//! leaves.

mod build;
mod parse;

use std::fmt;

pub use build::{covering_cnf, minterm_dnf, random_reduced, substitute, threshold_formula};

use crate::error::{Error, Result};
use crate::points::PointSet01;

/// Default cap for exhaustive enumeration over `{0,1}^n`.
pub const ENUMERATION_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(bool),
    Lit { var: usize, negated: bool },
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

impl Node {
    pub fn lit(var: usize) -> Node {
        Node::Lit { var, negated: false }
    }

    pub fn neg_lit(var: usize) -> Node {
        Node::Lit { var, negated: true }
    }

    pub fn and(a: Node, b: Node) -> Node {
        Node::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Node, b: Node) -> Node {
        Node::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Node) -> Node {
        Node::Not(Box::new(a))
    }

    /// Left-associated conjunction; `Const(true)` for an empty list.
    pub fn and_all(items: impl IntoIterator<Item = Node>) -> Node {
        items
            .into_iter()
            .reduce(Node::and)
            .unwrap_or(Node::Const(true))
    }

    /// Left-associated disjunction; `Const(false)` for an empty list.
    pub fn or_all(items: impl IntoIterator<Item = Node>) -> Node {
        items
            .into_iter()
            .reduce(Node::or)
            .unwrap_or(Node::Const(false))
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        match self {
            Node::Const(c) => *c,
            Node::Lit { var, negated } => x[*var] != *negated,
            Node::Not(a) => !a.eval(x),
            Node::And(a, b) => a.eval(x) && b.eval(x),
            Node::Or(a, b) => a.eval(x) || b.eval(x),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Const(_) => 0,
            Node::Lit { .. } => 1,
            Node::Not(a) => a.size(),
            Node::And(a, b) | Node::Or(a, b) => a.size() + b.size(),
        }
    }

    fn count(&self, pred: &impl Fn(&Node) -> bool) -> usize {
        let own = usize::from(pred(self));
        own + match self {
            Node::Const(_) | Node::Lit { .. } => 0,
            Node::Not(a) => a.count(pred),
            Node::And(a, b) | Node::Or(a, b) => a.count(pred) + b.count(pred),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Node::Const(_) => None,
            Node::Lit { var, .. } => Some(*var),
            Node::Not(a) => a.max_var(),
            Node::And(a, b) | Node::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// Pushes negations down to the literals (De Morgan), keeping the tree shape.
    fn push_negation(&self, negate: bool) -> Node {
        match self {
            Node::Const(c) => Node::Const(*c != negate),
            Node::Lit { var, negated } => Node::Lit {
                var: *var,
                negated: *negated != negate,
            },
            Node::Not(a) => a.push_negation(!negate),
            Node::And(a, b) => {
                let (a, b) = (a.push_negation(negate), b.push_negation(negate));
                if negate {
                    Node::or(a, b)
                } else {
                    Node::and(a, b)
                }
            }
            Node::Or(a, b) => {
                let (a, b) = (a.push_negation(negate), b.push_negation(negate));
                if negate {
                    Node::and(a, b)
                } else {
                    Node::or(a, b)
                }
            }
        }
    }

    pub(crate) fn map_vars(&self, f: &impl Fn(usize) -> usize) -> Node {
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Lit { var, negated } => Node::Lit {
                var: f(*var),
                negated: *negated,
            },
            Node::Not(a) => Node::not(a.map_vars(f)),
            Node::And(a, b) => Node::and(a.map_vars(f), b.map_vars(f)),
            Node::Or(a, b) => Node::or(a.map_vars(f), b.map_vars(f)),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec: 0 = expr, 1 = term, 2 = factor
        match self {
            Node::Const(c) => write!(f, "{}", u8::from(*c)),
            Node::Lit { var, negated } => {
                write!(f, "{}x{}", if *negated { "!" } else { "" }, var + 1)
            }
            Node::Not(a) => {
                write!(f, "!")?;
                a.fmt_prec(f, 2)
            }
            Node::Or(a, b) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 0)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 1)?;
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Node::And(a, b) => {
                if prec > 1 {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, 1)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 2)?;
                if prec > 1 {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// A formula together with its ambient dimension `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula {
    n: usize,
    root: Node,
}

impl Formula {
    pub fn new(n: usize, root: Node) -> Result<Formula> {
        if let Some(v) = root.max_var() {
            if v >= n {
                return Err(Error::VarOutOfRange { index: v + 1, n });
            }
        }
        Ok(Formula { n, root })
    }

    /// Parses the text grammar (see [`parse`]); all indices must be `<= n`.
    pub fn parse(text: &str, n: usize) -> Result<Formula> {
        let root = parse::parse(text, Some(n))?;
        Ok(Formula { n, root })
    }

    /// Parses and takes `n` as the largest variable index that occurs.
    pub fn parse_infer(text: &str) -> Result<Formula> {
        let root = parse::parse(text, None)?;
        let n = root.max_var().map_or(0, |v| v + 1);
        Ok(Formula { n, root })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }

    pub fn and_count(&self) -> usize {
        self.root.count(&|x| matches!(x, Node::And(..)))
    }

    pub fn or_count(&self) -> usize {
        self.root.count(&|x| matches!(x, Node::Or(..)))
    }

    pub fn is_reduced(&self) -> bool {
        self.root.count(&|x| matches!(x, Node::Not(_))) == 0
    }

    pub fn is_monotone(&self) -> bool {
        self.root.count(&|x| {
            matches!(
                x,
                Node::Not(_) | Node::Lit { negated: true, .. } | Node::Const(false)
            )
        }) == 0
    }

    pub fn reduce(&self) -> Formula {
        Formula {
            n: self.n,
            root: self.root.push_negation(false),
        }
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.root.eval(x))
    }

    /// All points of `{0,1}^n` where the formula is true.
    pub fn enumerate_set(&self) -> Result<PointSet01> {
        self.enumerate_set_with_limit(ENUMERATION_LIMIT)
    }

    pub fn enumerate_set_with_limit(&self, limit: usize) -> Result<PointSet01> {
        if self.n > limit {
            return Err(Error::LimitExceeded { n: self.n, limit });
        }
        let points = PointSet01::cube_points(self.n)
            .filter(|x| self.root.eval(x))
            .collect();
        PointSet01::new(self.n, points)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    const PHI1: &str = "!((x1 & !x2) | !(x1 | x3))";
    const PHI2: &str = "(!x1 | x2) & (x1 | x3)";

    #[test]
    fn sizes() {
        assert_eq!(Formula::parse(PHI2, 3).unwrap().size(), 4);
        assert_eq!(Formula::parse(PHI1, 3).unwrap().size(), 4);
        assert_eq!(Formula::parse("x1", 1).unwrap().size(), 1);
        assert_eq!(Formula::parse("!(x1 & !x2)", 2).unwrap().size(), 2);
        assert_eq!(Formula::parse("1", 2).unwrap().size(), 0);
        assert_eq!(
            covering_cnf(&bz_matrix(5)).unwrap().size(),
            20,
            "n(n-1) ones"
        );
    }

    fn bz_matrix(n: usize) -> Vec<Vec<u8>> {
        (0..n)
            .map(|j| (0..n).map(|i| u8::from(i != j)).collect())
            .collect()
    }

    #[test]
    fn reduce_de_morgan() {
        let phi1 = Formula::parse(PHI1, 3).unwrap();
        assert!(!phi1.is_reduced());
        let r = phi1.reduce();
        assert!(r.is_reduced());
        assert_eq!(r, Formula::parse(PHI2, 3).unwrap());
        assert_eq!(r.size(), 4);
    }

    #[test]
    fn reduce_idempotent_and_double_negation() {
        let phi2 = Formula::parse(PHI2, 3).unwrap();
        assert_eq!(phi2.reduce(), phi2);
        let nn = Formula::parse("!!x1", 1).unwrap().reduce();
        assert_eq!(nn.root(), &Node::lit(0));
    }

    #[test]
    fn evaluate_examples() {
        let phi2 = Formula::parse(PHI2, 3).unwrap();
        assert!(phi2.evaluate(&bits("110")).unwrap());
        assert!(!phi2.evaluate(&bits("101")).unwrap());
        assert!(Formula::parse("1", 2).unwrap().evaluate(&bits("00")).unwrap());
        assert!(phi2.evaluate(&bits("11")).is_err());
    }

    #[test]
    fn enumerate_examples() {
        let phi2 = Formula::parse(PHI2, 3).unwrap();
        let s: Vec<String> = phi2
            .enumerate_set()
            .unwrap()
            .points()
            .iter()
            .map(|p| p.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect();
        assert_eq!(s, ["001", "011", "110", "111"]);
        assert_eq!(Formula::parse("1", 2).unwrap().enumerate_set().unwrap().len(), 4);
        assert!(Formula::parse("x1 & !x1", 1)
            .unwrap()
            .enumerate_set()
            .unwrap()
            .is_empty());
        let big = Formula::parse("x1", 21).unwrap();
        assert!(matches!(big.enumerate_set(), Err(Error::LimitExceeded { .. })));
    }

    #[test]
    fn display_roundtrip_keeps_tree() {
        for text in [PHI1, PHI2, "x1 & (x2 & x3)", "(x1 | x2) & x3 | !x4", "!(!x1)"] {
            let f = Formula::parse_infer(text).unwrap();
            let again = Formula::parse(&f.to_string(), f.n()).unwrap();
            assert_eq!(f, again, "{text} -> {f}");
        }
    }

    #[test]
    fn monotone_flags() {
        assert!(Formula::parse("x1 | x2 & x3", 3).unwrap().is_monotone());
        assert!(!Formula::parse("x1 | !x2", 2).unwrap().is_monotone());
        assert!(!Formula::parse("!(x1 | x2)", 2).unwrap().is_monotone());
    }

    #[test]
    fn node_counts() {
        let f = Formula::parse(PHI2, 3).unwrap();
        assert_eq!(f.and_count(), 1);
        assert_eq!(f.or_count(), 2);
    }
}
