//! Formula generators: covering CNFs, threshold formulas, variable substitution,
//! minterm DNFs and seeded random reduced formulas.

use rand::Rng;

use super::{Formula, Node};
use crate::error::{Error, Result};
use crate::points::PointSet01;

/// `⋀_i ⋁_{j : A_ij = 1} x_j` for a 0/1 matrix with no zero row.
pub fn covering_cnf(a: &[Vec<u8>]) -> Result<Formula> {
    let n = a.first().map_or(0, Vec::len);
    let mut clauses = Vec::with_capacity(a.len());
    for (i, row) in a.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: row.len(),
            });
        }
        let lits: Vec<Node> = row
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(j, _)| Node::lit(j))
            .collect();
        if lits.is_empty() {
            return Err(Error::ZeroRow(i));
        }
        clauses.push(Node::or_all(lits));
    }
    Formula::new(n, Node::and_all(clauses))
}

/// Monotone formula over `y_1..y_m` that is true iff at least `k` inputs are true.
///
/// Divide and conquer on the halves `y_1..y_⌈m/2⌉` and the rest; `k = 1` and
/// `k = m` are the plain disjunction and conjunction chains.
pub fn threshold_formula(k: i64, m: usize) -> Formula {
    let vars: Vec<usize> = (0..m).collect();
    Formula {
        n: m,
        root: threshold_node(k, &vars),
    }
}

fn threshold_node(k: i64, vars: &[usize]) -> Node {
    let m = vars.len() as i64;
    if k <= 0 {
        return Node::Const(true);
    }
    if k > m {
        return Node::Const(false);
    }
    if k == 1 {
        return Node::or_all(vars.iter().map(|&v| Node::lit(v)));
    }
    if k == m {
        return Node::and_all(vars.iter().map(|&v| Node::lit(v)));
    }
    let (first, rest) = vars.split_at(vars.len().div_ceil(2));
    let lo = (k - rest.len() as i64).max(0);
    let hi = k.min(first.len() as i64);
    let terms = (lo..=hi).map(|j| {
        conj_absorb(threshold_node(j, first), threshold_node(k - j, rest))
    });
    Node::or_all(terms)
}

fn conj_absorb(a: Node, b: Node) -> Node {
    match (a, b) {
        (Node::Const(true), x) | (x, Node::Const(true)) => x,
        (Node::Const(false), _) | (_, Node::Const(false)) => Node::Const(false),
        (a, b) => Node::and(a, b),
    }
}

/// Replaces every `y_k` by `x_{h(k)}`; `h` is 0-based and total on the formula's variables.
pub fn substitute(phi: &Formula, h: &[usize], n: usize) -> Result<Formula> {
    if h.len() != phi.n() {
        return Err(Error::Dimension {
            expected: phi.n(),
            got: h.len(),
        });
    }
    if let Some(&bad) = h.iter().find(|&&j| j >= n) {
        return Err(Error::VarOutOfRange { index: bad + 1, n });
    }
    Ok(Formula {
        n,
        root: phi.root().map_vars(&|k| h[k]),
    })
}

/// Disjunction over the points of `s` of the conjunction fixing every coordinate.
pub fn minterm_dnf(s: &PointSet01) -> Formula {
    let terms = s.points().iter().map(|p| {
        Node::and_all(p.iter().enumerate().map(|(i, &b)| {
            if b {
                Node::lit(i)
            } else {
                Node::neg_lit(i)
            }
        }))
    });
    Formula {
        n: s.dim(),
        root: Node::or_all(terms),
    }
}

/// Random reduced formula with exactly `size` literals (`size >= 1`).
/// Each literal is negated with probability `neg_prob`.
pub fn random_reduced<R: Rng>(n: usize, size: usize, neg_prob: f64, rng: &mut R) -> Formula {
    assert!(n >= 1 && size >= 1);
    fn go<R: Rng>(n: usize, size: usize, p: f64, rng: &mut R) -> Node {
        if size == 1 {
            let var = rng.gen_range(0..n);
            return Node::Lit {
                var,
                negated: rng.gen_bool(p),
            };
        }
        let left = rng.gen_range(1..size);
        let a = go(n, left, p, rng);
        let b = go(n, size - left, p, rng);
        if rng.gen_bool(0.5) {
            Node::and(a, b)
        } else {
            Node::or(a, b)
        }
    }
    Formula {
        n,
        root: go(n, size, neg_prob, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn weight(x: &[bool]) -> i64 {
        x.iter().filter(|&&b| b).count() as i64
    }

    #[test]
    fn covering_examples() {
        let f = covering_cnf(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(f.to_string(), "x1 & x2");
        assert_eq!(f.size(), 2);
        let f = covering_cnf(&[vec![1, 1, 1]]).unwrap();
        assert_eq!(f.to_string(), "x1 | x2 | x3");
        let bz: Vec<Vec<u8>> = (0..3)
            .map(|j| (0..3).map(|i| u8::from(i != j)).collect())
            .collect();
        let f = covering_cnf(&bz).unwrap();
        assert_eq!(f.to_string(), "(x2 | x3) & (x1 | x3) & (x1 | x2)");
        assert_eq!(f.size(), 6);
        assert!(f.is_monotone() && f.is_reduced());
        assert_eq!(covering_cnf(&[vec![0, 0]]), Err(Error::ZeroRow(0)));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_formula(1, 4).to_string(), "x1 | x2 | x3 | x4");
        assert_eq!(threshold_formula(3, 3).to_string(), "x1 & x2 & x3");
        let t = threshold_formula(2, 3);
        assert_eq!(t.to_string(), "(x1 | x2) & x3 | x1 & x2");
        assert_eq!(t.size(), 5);
        assert_eq!(threshold_formula(0, 3).root(), &Node::Const(true));
        assert_eq!(threshold_formula(4, 3).root(), &Node::Const(false));
    }

    #[test]
    fn threshold_matches_counting_exhaustively() {
        for m in 1..=10usize {
            for k in 1..=m as i64 {
                let t = threshold_formula(k, m);
                assert!(t.is_monotone());
                for x in PointSet01::cube_points(m) {
                    assert_eq!(t.evaluate(&x).unwrap(), weight(&x) >= k, "k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn substitution_examples() {
        let t = threshold_formula(2, 3);
        let s = substitute(&t, &[0, 0, 1], 2).unwrap();
        let set = s.enumerate_set().unwrap();
        assert_eq!(set.points(), &[vec![true, false], vec![true, true]]);
        assert_eq!(s.size(), t.size());
        assert_eq!(substitute(&t, &[0, 1, 2], 3).unwrap(), t);
        let u = substitute(&threshold_formula(1, 2), &[2, 2], 3).unwrap();
        assert_eq!(u.to_string(), "x3 | x3");
        assert!(substitute(&t, &[0, 1, 5], 3).is_err());
        assert!(substitute(&t, &[0, 1], 3).is_err());
    }

    #[test]
    fn minterm_dnf_defines_its_set() {
        let s = PointSet01::new(2, vec![vec![false, true], vec![true, true]]).unwrap();
        let f = minterm_dnf(&s);
        assert_eq!(f.enumerate_set().unwrap(), s);
        assert_eq!(f.size(), 4);
    }

    #[test]
    fn random_formulas_are_reduced_with_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for size in 1..12 {
            let f = random_reduced(4, size, 0.4, &mut rng);
            assert!(f.is_reduced());
            assert_eq!(f.size(), size);
        }
    }
}
