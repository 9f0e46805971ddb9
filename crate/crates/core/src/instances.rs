//! Named instances and seeded random families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::formula::{covering_cnf, substitute, threshold_formula, Formula, Node, ENUMERATION_LIMIT};
use crate::hull::FacetList;
use crate::points::PointSet01;
use crate::rational::{int, Rational};

/// Largest coefficient accepted by [`gen_bounded_covering`] unless overridden.
pub const DEFAULT_DELTA: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub n: usize,
    pub formula: Formula,
    /// The defined set, when `n` is small enough to enumerate.
    pub set: Option<PointSet01>,
    /// Known valid inequalities.
    pub reference: Option<FacetList>,
    /// Equations of an affine subspace the instance is studied in.
    pub subspace: Vec<(Vec<Rational>, Rational)>,
    pub note: String,
}

impl Instance {
    fn new(name: &str, formula: Formula, note: &str) -> Result<Instance> {
        let n = formula.n();
        let set = if n <= ENUMERATION_LIMIT {
            Some(formula.enumerate_set()?)
        } else {
            None
        };
        Ok(Instance {
            name: name.to_string(),
            n,
            formula,
            set,
            reference: None,
            subspace: Vec::new(),
            note: note.to_string(),
        })
    }

    /// Files of the bundle: formula, reference polytope and manifest.
    pub fn bundle(&self) -> Vec<(String, String)> {
        let mut files = vec![(format!("{}.bool", self.name), format!("{}\n", self.formula))];
        let mut reference = self.reference.clone().unwrap_or(FacetList {
            dim: self.n,
            facets: Vec::new(),
            equations: Vec::new(),
        });
        reference.equations.extend(self.subspace.iter().cloned());
        files.push((format!("{}.ef", self.name), reference.to_text()));
        files.push((
            "manifest".to_string(),
            format!("instance {} n={}\n", self.name, self.n),
        ));
        files
    }
}

fn unit_rows(n: usize, rows: &[Vec<usize>], beta: i64) -> Vec<(Vec<Rational>, Rational)> {
    rows.iter()
        .map(|r| {
            let mut a = vec![int(0); n];
            for &j in r {
                a[j] = int(1);
            }
            (a, int(beta))
        })
        .collect()
}

/// Covering rows `Σ_{i≠j} x_i ≥ 1` for each `j`; `S = {x : |x| ≥ 2}`.
pub fn gen_bz(n: usize) -> Result<Instance> {
    if n < 3 {
        return Err(Error::Invalid("the instance needs n ≥ 3".into()));
    }
    let a: Vec<Vec<u8>> = (0..n)
        .map(|j| (0..n).map(|i| u8::from(i != j)).collect())
        .collect();
    let mut inst = Instance::new(
        &format!("bz{n}"),
        covering_cnf(&a)?,
        "rows e - e_j; every pair of ones covers",
    )?;
    inst.reference = Some(FacetList {
        dim: n,
        facets: vec![(vec![int(1); n], int(2))],
        equations: Vec::new(),
    });
    Ok(inst)
}

/// `S = {x ∈ {0,1}^n : Ax ≥ e}` for a 0/1 matrix.
pub fn gen_covering(a: &[Vec<u8>]) -> Result<Instance> {
    let phi = covering_cnf(a)?;
    let n = phi.n();
    let mut inst = Instance::new("covering", phi, "binary covering CNF")?;
    let rows: Vec<Vec<usize>> = a
        .iter()
        .map(|r| (0..n).filter(|&j| r[j] != 0).collect())
        .collect();
    inst.reference = Some(FacetList {
        dim: n,
        facets: unit_rows(n, &rows, 1),
        equations: Vec::new(),
    });
    Ok(inst)
}

/// `S = {x : Ax ≥ b}` for a nonnegative integer matrix with entries at most
/// `delta`: each row becomes a threshold formula on `Σ_j A_ij` inputs in which
/// input copies of `x_j` appear `A_ij` times.
pub fn gen_bounded_covering(a: &[Vec<u32>], b: &[u32], delta: u32) -> Result<Instance> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut clauses = Vec::with_capacity(a.len());
    for (i, (row, &bi)) in a.iter().zip(b).enumerate() {
        if row.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: row.len(),
            });
        }
        if let Some(&v) = row.iter().find(|&&v| v > delta) {
            return Err(Error::Invalid(format!("entry {v} in row {} exceeds Δ = {delta}", i + 1)));
        }
        if bi == 0 {
            return Err(Error::Invalid(format!("right-hand side of row {} must be positive", i + 1)));
        }
        let h: Vec<usize> = (0..n)
            .flat_map(|j| std::iter::repeat_n(j, row[j] as usize))
            .collect();
        if (h.len() as u64) < u64::from(bi) {
            return Err(Error::Invalid(format!("row {} cannot reach its right-hand side", i + 1)));
        }
        let thr = threshold_formula(i64::from(bi), h.len());
        clauses.push(substitute(&thr, &h, n)?.root().clone());
    }
    let mut inst = Instance::new(
        "bounded",
        Formula::new(n, Node::and_all(clauses))?,
        "threshold formulas with substituted multiplicities",
    )?;
    inst.reference = Some(FacetList {
        dim: n,
        facets: a
            .iter()
            .zip(b)
            .map(|(r, &bi)| (r.iter().map(|&v| int(i64::from(v))).collect(), int(i64::from(bi))))
            .collect(),
        equations: Vec::new(),
    });
    Ok(inst)
}

/// Edges of `K₄` in the order `12, 13, 14, 23, 24, 34`.
pub const K4_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Edge sets whose support contains a perfect matching of `K₄`.
pub fn gen_matching_k4() -> Result<Instance> {
    let edge = |u: usize, v: usize| K4_EDGES.iter().position(|&e| e == (u, v)).unwrap();
    let matchings = [
        [edge(0, 1), edge(2, 3)],
        [edge(0, 2), edge(1, 3)],
        [edge(0, 3), edge(1, 2)],
    ];
    let phi = Node::or_all(
        matchings
            .iter()
            .map(|m| Node::and(Node::lit(m[0]), Node::lit(m[1]))),
    );
    let mut inst = Instance::new(
        "matching-k4",
        Formula::new(6, phi)?,
        "supports containing a perfect matching of K4",
    )?;
    // odd cuts: |U| = 1 and |U| = 3 give the same four stars
    let stars: Vec<Vec<usize>> = (0..4)
        .map(|v| (0..6).filter(|&e| K4_EDGES[e].0 == v || K4_EDGES[e].1 == v).collect())
        .collect();
    inst.reference = Some(FacetList {
        dim: 6,
        facets: unit_rows(6, &stars, 1),
        equations: Vec::new(),
    });
    inst.subspace = unit_rows(6, &stars, 1);
    Ok(inst)
}

/// Perfect matchings of `K₄` as edge indicator vectors.
pub fn k4_perfect_matchings() -> PointSet01 {
    let pts = [[0, 5], [1, 4], [2, 3]]
        .iter()
        .map(|m| (0..6).map(|e| m.contains(&e)).collect())
        .collect();
    PointSet01::new(6, pts).unwrap()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random 0/1 matrix without zero rows.
pub fn random_covering_matrix<R: Rng>(m: usize, n: usize, density: f64, rng: &mut R) -> Vec<Vec<u8>> {
    (0..m)
        .map(|_| loop {
            let row: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(density))).collect();
            if row.contains(&1) {
                break row;
            }
        })
        .collect()
}

/// Random bounded covering system `(A, b)` with entries in `0..=delta` and
/// every row able to reach its right-hand side.
pub fn random_bounded_system<R: Rng>(m: usize, n: usize, delta: u32, rng: &mut R) -> (Vec<Vec<u32>>, Vec<u32>) {
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    while a.len() < m {
        let row: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=delta)).collect();
        let total: u32 = row.iter().sum();
        if total == 0 {
            continue;
        }
        b.push(rng.gen_range(1..=total));
        a.push(row);
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::notch_of_set;

    fn ones(p: &[bool]) -> usize {
        p.iter().filter(|&&b| b).count()
    }

    #[test]
    fn bz_examples() {
        let i3 = gen_bz(3).unwrap();
        assert_eq!(i3.set.as_ref().unwrap().len(), 4);
        assert_eq!(i3.formula.to_string(), "(x2 | x3) & (x1 | x3) & (x1 | x2)");
        let i5 = gen_bz(5).unwrap();
        assert_eq!(i5.formula.size(), 20);
        assert!(i5.set.unwrap().points().iter().all(|p| ones(p) >= 2));
        assert!(gen_bz(2).is_err());
    }

    #[test]
    fn covering_examples() {
        let tri = gen_covering(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let covers: Vec<Vec<bool>> = PointSet01::cube_points(3)
            .filter(|p| (p[0] || p[1]) && (p[1] || p[2]) && (p[0] || p[2]))
            .collect();
        assert_eq!(tri.set.unwrap().points(), &covers[..]);
        let id = gen_covering(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap();
        let s = id.set.unwrap();
        assert_eq!(s.points(), &[vec![true; 4]]);
        assert_eq!(notch_of_set(&s).unwrap(), 4);
        let mut rng = seeded_rng(7);
        let a = random_covering_matrix(4, 4, 0.5, &mut rng);
        let s = gen_covering(&a).unwrap().set.unwrap();
        let direct: Vec<Vec<bool>> = PointSet01::cube_points(4)
            .filter(|p| a.iter().all(|r| r.iter().zip(p).any(|(&v, &x)| v == 1 && x)))
            .collect();
        assert_eq!(s.points(), &direct[..]);
    }

    #[test]
    fn bounded_examples() {
        let i = gen_bounded_covering(&[vec![2, 1]], &[2], 3).unwrap();
        assert_eq!(i.set.unwrap().points(), &[vec![true, false], vec![true, true]]);
        let i = gen_bounded_covering(&[vec![1, 1, 1]], &[2], 3).unwrap();
        let s = i.set.unwrap();
        assert!(s.points().iter().all(|p| ones(p) >= 2) && s.len() == 4);
        assert!(gen_bounded_covering(&[vec![4, 1]], &[2], 3).is_err());
        assert!(gen_bounded_covering(&[vec![1, 0]], &[2], 3).is_err());
        // Δ = 1, b = 1 rows define the same set as the covering CNF
        let a = vec![vec![1u32, 0, 1], vec![0, 1, 1]];
        let bounded = gen_bounded_covering(&a, &[1, 1], 1).unwrap();
        let binary = gen_covering(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(bounded.set, binary.set);
    }

    #[test]
    fn matching_set() {
        let i = gen_matching_k4().unwrap();
        assert_eq!(i.formula.size(), 6);
        assert!(i.formula.is_monotone() && i.formula.is_reduced());
        let s = i.set.unwrap();
        for pm in k4_perfect_matchings().points() {
            assert!(s.contains(pm));
        }
        assert!(s.contains(&[true; 6]));
        // brute force: supports containing one of the matchings
        let pms = k4_perfect_matchings();
        let count = PointSet01::cube_points(6)
            .filter(|x| pms.points().iter().any(|m| m.iter().zip(x).all(|(&a, &b)| !a || b)))
            .count();
        assert_eq!(count, 37);
        assert_eq!(s.len(), 37);
    }

    #[test]
    fn bundle_has_manifest() {
        let files = gen_bz(4).unwrap().bundle();
        assert_eq!(files[2].1, "instance bz4 n=4\n");
        assert!(files[1].1.contains("ineq 1 1 1 1 >= 2"));
    }
}
