//! Exact conversions between small 0/1 vertex sets and inequality systems,
//! and hull-equality tests against extended formulations.

mod dd;

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{self, Sense};
use crate::points::{to_rational, PointSet01};
use crate::polytope::ExtendedFormulation;
use crate::rational::{dot, fmt_rational, parse_rational, primitive, Rational};

/// Default dimension cap for hull computations.
pub const HULL_LIMIT: usize = 8;

pub(crate) use dd::extreme_rays;

/// `a·x ≥ β` facets plus `a·x = β` equations of a polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetList {
    pub dim: usize,
    pub facets: Vec<(Vec<Rational>, Rational)>,
    pub equations: Vec<(Vec<Rational>, Rational)>,
}

/// Vertices and extreme rays of a polyhedron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VRep {
    pub vertices: Vec<Vec<Rational>>,
    pub rays: Vec<Vec<Rational>>,
}

fn normalized(a: &[Rational], beta: &Rational) -> (Vec<Rational>, Rational) {
    let mut v = a.to_vec();
    v.push(beta.clone());
    let mut p = primitive(&v);
    let beta = p.pop().unwrap();
    (p, beta)
}

/// Reduced row echelon form; returns pivot columns.
fn rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pv = m[row][col].clone();
        for v in m[row].iter_mut() {
            *v /= &pv;
        }
        let pivot = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (v, p) in other.iter_mut().zip(&pivot).take(cols) {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

pub fn facets_of_points(v: &PointSet01) -> Result<FacetList> {
    facets_of_points_with_limit(v, HULL_LIMIT)
}

pub fn facets_of_points_with_limit(v: &PointSet01, limit: usize) -> Result<FacetList> {
    if v.dim() > limit {
        return Err(Error::LimitExceeded { n: v.dim(), limit });
    }
    facets_of_rational_points(v.dim(), &v.rational_points())
}

/// Facets and affine-hull equations of `conv(pts)`.
pub fn facets_of_rational_points(n: usize, pts: &[Vec<Rational>]) -> Result<FacetList> {
    let p0 = pts.first().ok_or(Error::EmptyInput)?;
    let mut diffs: Vec<Vec<Rational>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let pivots = if diffs.is_empty() { Vec::new() } else { rref(&mut diffs) };
    let mut equations = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut a = vec![Rational::zero(); n];
        a[f] = Rational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            a[pc] = -diffs[i][f].clone();
        }
        let beta = dot(&a, p0);
        equations.push(normalized(&a, &beta));
    }
    let mut facets = Vec::new();
    if !pivots.is_empty() {
        let cons: Vec<Vec<Rational>> = pts
            .iter()
            .map(|p| {
                let mut c = vec![Rational::one()];
                c.extend(pivots.iter().map(|&k| p[k].clone()));
                c
            })
            .collect();
        for h in extreme_rays(pivots.len() + 1, &cons)? {
            let mut a = vec![Rational::zero(); n];
            for (t, &k) in pivots.iter().enumerate() {
                a[k] = h[t + 1].clone();
            }
            facets.push(normalized(&a, &-h[0].clone()));
        }
    }
    facets.sort();
    Ok(FacetList {
        dim: n,
        facets,
        equations,
    })
}

pub fn vertices_of_hrep(f: &FacetList) -> Result<VRep> {
    vertices_of_hrep_with_limit(f, HULL_LIMIT)
}

pub fn vertices_of_hrep_with_limit(f: &FacetList, limit: usize) -> Result<VRep> {
    let n = f.dim;
    if n > limit {
        return Err(Error::LimitExceeded { n, limit });
    }
    let mut cons: Vec<Vec<Rational>> = Vec::new();
    let mut push = |a: &[Rational], b: &Rational| {
        let mut c = vec![-b.clone()];
        c.extend(a.iter().cloned());
        cons.push(c);
    };
    for (a, b) in &f.facets {
        push(a, b);
    }
    for (a, b) in &f.equations {
        push(a, b);
        let na: Vec<Rational> = a.iter().map(|v| -v).collect();
        push(&na, &-b.clone());
    }
    let mut t = vec![Rational::zero(); n + 1];
    t[0] = Rational::one();
    cons.push(t);
    let rays = extreme_rays(n + 1, &cons)?;
    let mut vertices = Vec::new();
    let mut dirs = Vec::new();
    for h in rays {
        if h[0].is_positive() {
            vertices.push(h[1..].iter().map(|v| v / &h[0]).collect());
        } else {
            dirs.push(h[1..].to_vec());
        }
    }
    if vertices.is_empty() {
        dirs.clear();
    }
    vertices.sort();
    dirs.sort();
    Ok(VRep {
        vertices,
        rays: dirs,
    })
}

/// Why `Q ≠ conv(V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HullMismatch {
    /// `a·x ≥ β` (or `= β` when `equation`) holds on `conv(V)` but `point ∈ Q`
    /// violates it.
    Separated {
        a: Vec<Rational>,
        beta: Rational,
        equation: bool,
        point: Vec<Rational>,
    },
    /// A point of `V` outside `Q`.
    Missing(Vec<bool>),
}

impl HullMismatch {
    /// Re-checks the certificate by arithmetic and one membership LP.
    pub fn verify(&self, q: &ExtendedFormulation, v: &PointSet01) -> bool {
        match self {
            HullMismatch::Separated {
                a,
                beta,
                equation,
                point,
            } => {
                let valid = v.rational_points().iter().all(|s| {
                    let val = dot(a, s);
                    if *equation {
                        val == *beta
                    } else {
                        val >= *beta
                    }
                });
                let val = dot(a, point);
                let violated = if *equation { val != *beta } else { val < *beta };
                valid && violated && lp::contains_point(q, point).unwrap_or(false)
            }
            HullMismatch::Missing(p) => {
                v.contains(p) && !lp::contains_point(q, &to_rational(p)).unwrap_or(true)
            }
        }
    }
}

/// `None` when the projected set of `q` equals `conv(v)`.
pub fn equals_hull(q: &ExtendedFormulation, v: &PointSet01) -> Result<Option<HullMismatch>> {
    if q.xdim() != v.dim() {
        return Err(Error::Dimension {
            expected: v.dim(),
            got: q.xdim(),
        });
    }
    let f = facets_of_points(v)?;
    for p in v.points() {
        if !lp::contains_point(q, &to_rational(p))? {
            return Ok(Some(HullMismatch::Missing(p.clone())));
        }
    }
    for (a, beta) in &f.facets {
        let out = lp::optimize(q, a, Sense::Min)?;
        if out.value.as_ref().is_some_and(|val| val < beta) {
            return Ok(Some(HullMismatch::Separated {
                a: a.clone(),
                beta: beta.clone(),
                equation: false,
                point: out.x.unwrap(),
            }));
        }
    }
    for (a, beta) in &f.equations {
        for sense in [Sense::Min, Sense::Max] {
            let out = lp::optimize(q, a, sense)?;
            if out.value.as_ref().is_some_and(|val| val != beta) {
                return Ok(Some(HullMismatch::Separated {
                    a: a.clone(),
                    beta: beta.clone(),
                    equation: true,
                    point: out.x.unwrap(),
                }));
            }
        }
    }
    Ok(None)
}

impl FacetList {
    /// Whether `x` satisfies every facet and equation.
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|(a, b)| dot(a, x) >= *b)
            && self.equations.iter().all(|(a, b)| dot(a, x) == *b)
    }

    /// The polytope as an H-representation EF (cube rows appended).
    pub fn to_ef(&self) -> Result<ExtendedFormulation> {
        let mut cons = self.facets.clone();
        for (a, b) in &self.equations {
            cons.push((a.clone(), b.clone()));
            cons.push((a.iter().map(|v| -v).collect(), -b.clone()));
        }
        ExtendedFormulation::from_hrep(self.dim, &cons)
    }

    pub fn to_text(&self) -> String {
        let join = |a: &[Rational]| a.iter().map(fmt_rational).collect::<Vec<_>>().join(" ");
        let mut s = format!("ef\nxvars {}\nyvars 0\n", self.dim);
        for (a, b) in &self.equations {
            writeln!(s, "eq {} = {}", join(a), fmt_rational(b)).unwrap();
        }
        for (a, b) in &self.facets {
            writeln!(s, "ineq {} >= {}", join(a), fmt_rational(b)).unwrap();
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<FacetList> {
        let mut dim = None;
        let mut facets = Vec::new();
        let mut equations = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let no = i + 1;
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Format {
                line: no,
                msg: msg.into(),
            };
            match toks.first().copied() {
                None | Some("ef") => {}
                Some(t) if t.starts_with('#') => {}
                Some("xvars") => {
                    dim = Some(
                        toks.get(1)
                            .and_then(|v| v.parse::<usize>().ok())
                            .ok_or_else(|| err("expected 'xvars <n>'"))?,
                    );
                }
                Some("yvars") => {
                    if toks.get(1) != Some(&"0") {
                        return Err(err("facet lists use yvars 0"));
                    }
                }
                Some(kind @ ("ineq" | "eq")) => {
                    let n = dim.ok_or_else(|| err("xvars must come first"))?;
                    let op = if kind == "ineq" { ">=" } else { "=" };
                    if toks.len() != n + 3 || toks[n + 1] != op {
                        return Err(err(&format!("expected '{kind} <{n} coefficients> {op} <rhs>'")));
                    }
                    let vals = toks[1..=n]
                        .iter()
                        .chain(&toks[n + 2..])
                        .map(|t| parse_rational(t).map_err(|e| err(&e.to_string())))
                        .collect::<Result<Vec<_>>>()?;
                    let entry = (vals[..n].to_vec(), vals[n].clone());
                    if kind == "ineq" {
                        facets.push(entry);
                    } else {
                        equations.push(entry);
                    }
                }
                Some(other) => return Err(err(&format!("unexpected line kind '{other}'"))),
            }
        }
        Ok(FacetList {
            dim: dim.ok_or(Error::Format {
                line: 0,
                msg: "missing xvars".into(),
            })?,
            facets,
            equations,
        })
    }
}
