//! Standard-form inequalities, their pitch and notch, the notch of a 0/1 set,
//! and an exact separation oracle for the closures under bounded pitch or
//! notch.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{vertices_of_hrep_with_limit, FacetList};
use crate::lp::{self, Sense};
use crate::points::PointSet01;
use crate::polytope::ExtendedFormulation;
use crate::rational::{fmt_rational, int, parse_rational, Rational};

pub const PITCH_LIMIT: usize = 8;
pub const NOTCH_LIMIT: usize = 6;
/// Cap for [`notch_of_set`], which scans `3^n` faces.
pub const NOTCH_SET_LIMIT: usize = 12;

/// `Σ_{i∈I⁺} c_i x_i + Σ_{i∈I⁻} c_i (1 − x_i) ≥ δ` with `c ≥ 0`, `δ ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StandardFormInequality {
    minus: Vec<bool>,
    c: Vec<Rational>,
    delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Standardized {
    Standard(StandardFormInequality),
    /// `δ < 0`: every point of the cube satisfies it.
    Trivial,
}

impl StandardFormInequality {
    pub fn new(minus: Vec<bool>, c: Vec<Rational>, delta: Rational) -> Result<Self> {
        if minus.len() != c.len() {
            return Err(Error::Dimension {
                expected: c.len(),
                got: minus.len(),
            });
        }
        if c.iter().any(Signed::is_negative) || delta.is_negative() {
            return Err(Error::Invalid("standard form needs c ≥ 0 and δ ≥ 0".into()));
        }
        Ok(StandardFormInequality { minus, c, delta })
    }

    /// Monotone inequality `c·x ≥ δ`.
    pub fn monotone(c: Vec<Rational>, delta: Rational) -> Result<Self> {
        Self::new(vec![false; c.len()], c, delta)
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.c
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// 0-based indices in `I⁺`.
    pub fn plus(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.minus[i]).collect()
    }

    /// 0-based indices in `I⁻`.
    pub fn minus(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.minus[i]).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.minus.iter().zip(&self.c).all(|(m, c)| !m || c.is_zero())
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for ((m, c), xi) in self.minus.iter().zip(&self.c).zip(x) {
            if *m {
                acc += c * (int(1) - xi);
            } else {
                acc += c * xi;
            }
        }
        acc
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        self.lhs(x) >= self.delta
    }

    /// `a·x ≥ β` with `a_i = ±c_i`.
    pub fn to_linear(&self) -> (Vec<Rational>, Rational) {
        let mut beta = self.delta.clone();
        let a = self
            .minus
            .iter()
            .zip(&self.c)
            .map(|(m, c)| {
                if *m {
                    beta -= c;
                    -c.clone()
                } else {
                    c.clone()
                }
            })
            .collect();
        (a, beta)
    }
}

pub fn to_standard_form(a: &[Rational], beta: &Rational) -> Standardized {
    let minus: Vec<bool> = a.iter().map(Signed::is_negative).collect();
    let c: Vec<Rational> = a.iter().map(Signed::abs).collect();
    let delta = beta - a.iter().filter(|v| v.is_negative()).sum::<Rational>();
    if delta.is_negative() {
        Standardized::Trivial
    } else {
        Standardized::Standard(StandardFormInequality { minus, c, delta })
    }
}

fn smallest_prefix(mut vals: Vec<Rational>, delta: &Rational) -> Option<usize> {
    vals.sort();
    let mut acc = Rational::zero();
    for (k, v) in vals.iter().enumerate() {
        acc += v;
        if acc >= *delta {
            return Some(k + 1);
        }
    }
    None
}

/// Parses `a1 x1 + ... >= beta` (also `<=` and `=`-free forms like `2x1 - x3 >= 1/2`)
/// into `(a, β)` with `a·x ≥ β`. Coefficients may be written `2x1`, `2*x1` or `2 x1`.
pub fn parse_inequality(text: &str, n: usize) -> Result<(Vec<Rational>, Rational)> {
    let bad = |msg: &str| Error::Invalid(format!("{msg} in inequality {text:?}"));
    let (lhs, rhs, flip) = if let Some((l, r)) = text.split_once(">=") {
        (l, r, false)
    } else if let Some((l, r)) = text.split_once("<=") {
        (l, r, true)
    } else {
        return Err(bad("missing '>=' or '<='"));
    };
    let beta = parse_rational(rhs)?;
    let mut a = vec![Rational::zero(); n];
    let compact: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty left-hand side"));
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for ch in compact.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('/') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    for t in terms {
        let (coef, var) = t.split_once('x').ok_or_else(|| bad("term without variable"))?;
        let coef = coef.trim_end_matches('*');
        let coef = match coef {
            "" | "+" => int(1),
            "-" => int(-1),
            c => parse_rational(c)?,
        };
        let i: usize = var.parse().map_err(|_| bad("bad variable index"))?;
        if i == 0 || i > n {
            return Err(Error::VarOutOfRange { index: i, n });
        }
        a[i - 1] += coef;
    }
    if flip {
        Ok((a.into_iter().map(|v| -v).collect(), -beta))
    } else {
        Ok((a, beta))
    }
}

/// Smallest `p` such that every `p`-subset of `supp(c)` sums to at least `δ`.
pub fn pitch_of(q: &StandardFormInequality) -> Result<usize> {
    if !q.delta.is_positive() {
        return Ok(0);
    }
    let support: Vec<Rational> = q.c.iter().filter(|v| !v.is_zero()).cloned().collect();
    smallest_prefix(support, &q.delta)
        .ok_or_else(|| Error::Invalid("coefficients sum below δ on the whole support".into()))
}

/// Smallest `ν` such that every `ν`-subset of `[n]` sums to at least `δ`.
pub fn notch_of(q: &StandardFormInequality) -> Result<usize> {
    if !q.delta.is_positive() {
        return Ok(0);
    }
    smallest_prefix(q.c.clone(), &q.delta)
        .ok_or_else(|| Error::Invalid("coefficients sum below δ over all of [n]".into()))
}

/// Smallest `k` such that every `k`-dimensional face of the cube meets `S`.
pub fn notch_of_set(s: &PointSet01) -> Result<usize> {
    let n = s.dim();
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    if n > NOTCH_SET_LIMIT {
        return Err(Error::LimitExceeded {
            n,
            limit: NOTCH_SET_LIMIT,
        });
    }
    let codes: Vec<u32> = s
        .points()
        .iter()
        .map(|p| p.iter().fold(0u32, |acc, &b| acc << 1 | u32::from(b)))
        .collect();
    for k in 0..=n {
        let all = (0u32..1 << n)
            .filter(|free| free.count_ones() as usize == k)
            .all(|free| {
                let hit: HashSet<u32> = codes.iter().map(|c| c & !free).collect();
                hit.len() == 1 << (n - k)
            });
        if all {
            return Ok(k);
        }
    }
    unreachable!("the full cube meets a nonempty S")
}

pub fn is_valid(q: &StandardFormInequality, s: &PointSet01) -> Result<bool> {
    if q.n() != s.dim() {
        return Err(Error::Dimension {
            expected: s.dim(),
            got: q.n(),
        });
    }
    Ok(s.rational_points().iter().all(|x| q.holds_at(x)))
}

impl fmt::Display for StandardFormInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: Vec<usize>| {
            v.iter()
                .map(|i| (i + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let c: Vec<String> = self.c.iter().map(fmt_rational).collect();
        write!(
            f,
            "std I+ {{{}}} I- {{{}}} c {} delta {}",
            list(self.plus()),
            list(self.minus()),
            c.join(" "),
            fmt_rational(&self.delta)
        )
    }
}

impl FromStr for StandardFormInequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Syntax {
            pos: 0,
            msg: msg.to_string(),
        };
        let toks: Vec<&str> = s.split_whitespace().collect();
        if toks.len() < 7 || toks[0] != "std" || toks[1] != "I+" || toks[3] != "I-" || toks[5] != "c" {
            return Err(bad("expected 'std I+ {…} I- {…} c … delta …'"));
        }
        let set = |t: &str| -> Result<Vec<usize>> {
            let inner = t
                .strip_prefix('{')
                .and_then(|t| t.strip_suffix('}'))
                .ok_or_else(|| bad("index sets are written {i,j,…}"))?;
            inner
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<usize>().map_err(|_| bad("bad index")))
                .collect()
        };
        let plus = set(toks[2])?;
        let minus_idx = set(toks[4])?;
        let dpos = toks
            .iter()
            .position(|t| *t == "delta")
            .ok_or_else(|| bad("missing delta"))?;
        if dpos + 2 != toks.len() {
            return Err(bad("delta takes one value"));
        }
        let c = toks[6..dpos]
            .iter()
            .map(|t| parse_rational(t))
            .collect::<Result<Vec<_>>>()?;
        let n = c.len();
        let mut seen = vec![0u8; n];
        for &i in plus.iter().chain(&minus_idx) {
            if i == 0 || i > n {
                return Err(Error::VarOutOfRange { index: i, n });
            }
            seen[i - 1] += 1;
        }
        if seen.iter().any(|&k| k != 1) {
            return Err(bad("I+ and I- must partition [n]"));
        }
        let mut minus = vec![false; n];
        for &i in &minus_idx {
            minus[i - 1] = true;
        }
        StandardFormInequality::new(minus, c, parse_rational(toks[dpos + 1])?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosureMode {
    /// Monotone inequalities of pitch at most the level.
    Pitch,
    /// Inequalities of notch at most the level.
    Notch,
}

#[derive(Debug, Clone, Copy)]
pub struct ClosureQuery<'a> {
    pub mode: ClosureMode,
    pub level: usize,
    pub target: &'a PointSet01,
    pub relaxation: &'a ExtendedFormulation,
}

/// A valid inequality of bounded pitch or notch that `point ∈ R` violates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub inequality: StandardFormInequality,
    pub point: Vec<Rational>,
}

impl Violation {
    /// Arithmetic re-check: valid on `S`, violated at the point, measure
    /// within the level, and the point lies in `R`.
    pub fn verify(&self, query: &ClosureQuery<'_>) -> bool {
        let q = &self.inequality;
        let measure = match query.mode {
            ClosureMode::Pitch => q.is_monotone().then(|| pitch_of(q)),
            ClosureMode::Notch => Some(notch_of(q)),
        };
        let within = matches!(measure, Some(Ok(m)) if m <= query.level);
        within
            && is_valid(q, query.target).unwrap_or(false)
            && !q.holds_at(&self.point)
            && lp::contains_point(query.relaxation, &self.point).unwrap_or(false)
    }
}

/// Per-support (pitch) or per-sign-pattern (notch) statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PatternStat {
    /// 0-based support (pitch) or `I⁻` (notch).
    pub pattern: Vec<usize>,
    pub cone_vertices: usize,
    pub lps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    pub mode: ClosureMode,
    pub level: usize,
    pub violation: Option<Violation>,
    pub patterns: Vec<PatternStat>,
    pub inequalities: usize,
    pub lp_calls: usize,
}

fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

pub fn closure_violation(query: &ClosureQuery<'_>) -> Result<Option<Violation>> {
    Ok(verify_closure(query)?.violation)
}

pub fn verify_closure(query: &ClosureQuery<'_>) -> Result<ClosureReport> {
    let n = query.target.dim();
    if query.relaxation.xdim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: query.relaxation.xdim(),
        });
    }
    if query.level == 0 {
        return Err(Error::Invalid("closure level must be at least 1".into()));
    }
    let limit = match query.mode {
        ClosureMode::Pitch => PITCH_LIMIT,
        ClosureMode::Notch => NOTCH_LIMIT,
    };
    if n > limit {
        return Err(Error::LimitExceeded { n, limit });
    }
    if query.relaxation.is_empty_marker() {
        return Err(Error::EmptyInput);
    }
    // (support, I⁻ mask) per pattern
    let patterns: Vec<(Vec<usize>, Vec<bool>)> = match query.mode {
        ClosureMode::Pitch => {
            let all: Vec<usize> = (0..n).collect();
            (1..=n)
                .flat_map(|k| subsets_of_size(&all, k))
                .map(|sup| (sup, vec![false; n]))
                .collect()
        }
        ClosureMode::Notch => (0u32..1 << n)
            .map(|m| {
                let minus = (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect();
                ((0..n).collect(), minus)
            })
            .collect(),
    };
    let targets = query.target.rational_points();
    let mut seen: HashSet<(Vec<Rational>, Rational)> = HashSet::new();
    let mut report = ClosureReport {
        mode: query.mode,
        level: query.level,
        violation: None,
        patterns: Vec::new(),
        inequalities: 0,
        lp_calls: 0,
    };
    for (support, minus) in patterns {
        let k = support.len();
        let mut facets: Vec<(Vec<Rational>, Rational)> = Vec::new();
        // validity on S, in coefficient space
        for s in &targets {
            let mut a = Vec::with_capacity(k);
            for &i in &support {
                a.push(if minus[i] { int(1) - &s[i] } else { s[i].clone() });
            }
            facets.push((a, int(1)));
        }
        let local: Vec<usize> = (0..k).collect();
        for j in subsets_of_size(&local, query.level.min(k)) {
            let mut a = vec![Rational::zero(); k];
            for t in j {
                a[t] = int(1);
            }
            facets.push((a, int(1)));
        }
        for t in 0..k {
            let mut a = vec![Rational::zero(); k];
            a[t] = int(1);
            facets.push((a, Rational::zero()));
        }
        let cone = FacetList {
            dim: k,
            facets,
            equations: Vec::new(),
        };
        let vrep = vertices_of_hrep_with_limit(&cone, limit)?;
        let mut stat = PatternStat {
            pattern: match query.mode {
                ClosureMode::Pitch => support.clone(),
                ClosureMode::Notch => (0..n).filter(|&i| minus[i]).collect(),
            },
            cone_vertices: vrep.vertices.len(),
            lps: 0,
        };
        for v in vrep.vertices {
            let mut c = vec![Rational::zero(); n];
            for (t, &i) in support.iter().enumerate() {
                c[i] = v[t].clone();
            }
            let mut m = minus.clone();
            for i in 0..n {
                m[i] = m[i] && !c[i].is_zero();
            }
            let q = StandardFormInequality::new(m, c, int(1))?;
            let (a, beta) = q.to_linear();
            if !seen.insert((a.clone(), beta.clone())) {
                continue;
            }
            report.inequalities += 1;
            report.lp_calls += 1;
            stat.lps += 1;
            let out = lp::optimize(query.relaxation, &a, Sense::Min)?;
            if let (Some(val), Some(x)) = (out.value, out.x) {
                if val < beta {
                    report.violation = Some(Violation {
                        inequality: q,
                        point: x,
                    });
                    report.patterns.push(stat);
                    return Ok(report);
                }
            }
        }
        report.patterns.push(stat);
    }
    Ok(report)
}
