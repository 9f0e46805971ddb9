//! Checks of the lifting guarantees on small instances.
//!
//! Every check returns a [`CheckReport`]. A failing report carries a
//! [`Certificate`] together with the EF it refers to, so the failure can be
//! re-checked with [`CheckReport::reverify`] independently of the check itself.

use std::fmt::{self, Write as _};
use std::time::Instant;

use rand::Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::formula::{Formula, Node};
use crate::hull::{equals_hull, HullMismatch, HULL_LIMIT};
use crate::instances::seeded_rng;
use crate::lp::{self, Sense};
use crate::measures::{verify_closure, ClosureMode, ClosureQuery, Violation, NOTCH_LIMIT, PITCH_LIMIT};
use crate::points::{bit_string, to_rational, PointSet01};
use crate::polytope::{iterate_lift_with, lift, lift_with, ExtendedFormulation, LiftOptions, LiftReport};
use crate::rational::{dot, fmt_rational, fmt_vec, int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

fn ser_rat<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

fn ser_rats<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(fmt_rational))
}

fn ser_bits<S: Serializer>(v: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&bit_string(v))
}

fn ser_violation<S: Serializer>(v: &Violation, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(2))?;
    m.serialize_entry("inequality", &v.inequality.to_string())?;
    m.serialize_entry("point", &v.point.iter().map(fmt_rational).collect::<Vec<_>>())?;
    m.end()
}

/// Why a check failed. Points are in x-space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A 0/1 point with `φ = 1` inside `Q` that the EF misses.
    MissingPoint {
        #[serde(serialize_with = "ser_bits")]
        point: Vec<bool>,
    },
    /// A 0/1 point in the EF with `φ = 0` or outside `Q`.
    ExtraPoint {
        #[serde(serialize_with = "ser_bits")]
        point: Vec<bool>,
    },
    /// `a·x ≥ β` (or `= β`) is valid for the reference set yet violated by
    /// `point`, which lies in the EF. The reference is `conv(S)` when
    /// `against_set`, else `Q`.
    Separated {
        #[serde(serialize_with = "ser_rats")]
        a: Vec<Rational>,
        #[serde(serialize_with = "ser_rat")]
        beta: Rational,
        equation: bool,
        against_set: bool,
        #[serde(serialize_with = "ser_rats")]
        point: Vec<Rational>,
    },
    /// `max c·x` over `Q` is `bound` but `point` of the EF exceeds it.
    Escapes {
        #[serde(serialize_with = "ser_rats")]
        c: Vec<Rational>,
        #[serde(serialize_with = "ser_rat")]
        bound: Rational,
        #[serde(serialize_with = "ser_rats")]
        point: Vec<Rational>,
    },
    /// The EF is unbounded along `c` (minimizing) while `Q` is not.
    Unbounded {
        #[serde(serialize_with = "ser_rats")]
        c: Vec<Rational>,
    },
    /// A valid inequality of bounded pitch or notch violated by the EF.
    Closure {
        mode: ClosureMode,
        level: usize,
        #[serde(serialize_with = "ser_violation")]
        violation: Violation,
    },
    /// The EF has more rows than the constructive bound.
    SizeBound {
        rows: usize,
        bound: usize,
        rows_in: usize,
    },
}

impl Certificate {
    /// Re-checks the certificate. `q` is the relaxation the check started
    /// from and `subject` the EF the certificate talks about.
    pub fn verify(&self, phi: &Formula, q: &ExtendedFormulation, subject: &ExtendedFormulation) -> bool {
        let member = |x: &[Rational]| lp::membership(subject, x).ok().filter(|m| m.verify(subject, x));
        let in_q = |x: &[Rational]| lp::contains_point(q, x).unwrap_or(false);
        match self {
            Certificate::MissingPoint { point } => {
                let x = to_rational(point);
                phi.evaluate(point).unwrap_or(false) && in_q(&x) && member(&x).is_some_and(|m| !m.contained)
            }
            Certificate::ExtraPoint { point } => {
                let x = to_rational(point);
                let expected = phi.evaluate(point).unwrap_or(true) && in_q(&x);
                !expected && member(&x).is_some_and(|m| m.contained)
            }
            Certificate::Separated {
                a,
                beta,
                equation,
                against_set,
                point,
            } => {
                let valid = if *against_set {
                    match phi.enumerate_set() {
                        Ok(s) => s.rational_points().iter().all(|p| {
                            let v = dot(a, p);
                            if *equation {
                                v == *beta
                            } else {
                                v >= *beta
                            }
                        }),
                        Err(_) => false,
                    }
                } else {
                    let lo = lp::optimize(q, a, Sense::Min);
                    let lo_ok = matches!(&lo, Ok(o) if o.verify(q, a, Sense::Min)
                        && o.value.as_ref().is_some_and(|v| v >= beta));
                    let hi_ok = !*equation
                        || matches!(lp::optimize(q, a, Sense::Max), Ok(o) if o.verify(q, a, Sense::Max)
                            && o.value.as_ref().is_some_and(|v| v <= beta));
                    lo_ok && hi_ok
                };
                let v = dot(a, point);
                let violated = if *equation { v != *beta } else { v < *beta };
                valid && violated && member(point).is_some_and(|m| m.contained)
            }
            Certificate::Escapes { c, bound, point } => {
                let max_ok = matches!(lp::optimize(q, c, Sense::Max), Ok(o) if o.verify(q, c, Sense::Max)
                    && o.value.as_ref() == Some(bound));
                max_ok && dot(c, point) > *bound && member(point).is_some_and(|m| m.contained)
            }
            Certificate::Unbounded { c } => {
                matches!(lp::optimize(subject, c, Sense::Min), Err(Error::Unbounded))
                    && lp::optimize(q, c, Sense::Min).is_ok()
            }
            Certificate::Closure {
                mode,
                level,
                violation,
            } => match phi.enumerate_set() {
                Ok(s) => violation.verify(&ClosureQuery {
                    mode: *mode,
                    level: *level,
                    target: &s,
                    relaxation: subject,
                }),
                Err(_) => false,
            },
            Certificate::SizeBound {
                rows,
                bound,
                rows_in,
            } => {
                let recomputed = phi.size() * (rows_in + 2) + 2 * phi.n() * phi.and_count();
                subject.ef_rows() == *rows && recomputed == *bound && rows > bound
            }
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::MissingPoint { point } => write!(f, "missing({})", bit_string(point)),
            Certificate::ExtraPoint { point } => write!(f, "extra({})", bit_string(point)),
            Certificate::Separated {
                a,
                beta,
                equation,
                against_set,
                point,
            } => write!(
                f,
                "separated(a={};{}={};ref={};point={})",
                fmt_vec(a),
                if *equation { "eq" } else { "ge" },
                fmt_rational(beta),
                if *against_set { "set" } else { "q" },
                fmt_vec(point)
            ),
            Certificate::Escapes { c, bound, point } => write!(
                f,
                "escapes(c={};max={};point={})",
                fmt_vec(c),
                fmt_rational(bound),
                fmt_vec(point)
            ),
            Certificate::Unbounded { c } => write!(f, "unbounded(c={})", fmt_vec(c)),
            Certificate::Closure {
                mode,
                level,
                violation,
            } => {
                let (a, beta) = violation.inequality.to_linear();
                write!(
                    f,
                    "violation(mode={};level={level};a={};ge={};point={})",
                    match mode {
                        ClosureMode::Pitch => "pitch",
                        ClosureMode::Notch => "notch",
                    },
                    fmt_vec(&a),
                    fmt_rational(&beta),
                    fmt_vec(&violation.point)
                )
            }
            Certificate::SizeBound {
                rows,
                bound,
                rows_in,
            } => write!(f, "size(rows={rows};bound={bound};rows_in={rows_in})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeStats {
    pub ef_rows: usize,
    pub formula_size: usize,
    pub tau: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub instance: String,
    pub params: Vec<(String, String)>,
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub stats: Option<SizeStats>,
    /// Informational values; never part of the verdict.
    pub observations: Vec<(String, String)>,
    pub timing_ms: u128,
    /// The EF a failing certificate refers to.
    #[serde(skip)]
    pub subject: Option<ExtendedFormulation>,
}

impl CheckReport {
    fn new(check: &str, instance: &str) -> CheckReport {
        CheckReport {
            check: check.into(),
            instance: instance.into(),
            params: Vec::new(),
            verdict: Verdict::Pass,
            certificate: None,
            stats: None,
            observations: Vec::new(),
            timing_ms: 0,
            subject: None,
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    fn observe(&mut self, key: &str, value: impl ToString) {
        self.observations.push((key.into(), value.to_string()));
    }

    fn fail(&mut self, cert: Certificate, subject: &ExtendedFormulation) {
        self.verdict = Verdict::Fail;
        self.certificate = Some(cert);
        self.subject = Some(subject.clone());
    }

    fn stats_from(&mut self, ef: &ExtendedFormulation, rep: Option<&LiftReport>, phi: &Formula) {
        self.stats = Some(SizeStats {
            ef_rows: ef.ef_rows(),
            formula_size: phi.size(),
            tau: rep.map_or(0, |r| r.tau),
        });
    }

    fn timed(mut self, start: Instant) -> Self {
        self.timing_ms = start.elapsed().as_millis();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// The report as one deterministic line (timing left out).
    pub fn line(&self) -> String {
        let mut s = format!("check={} instance={} verdict={}", self.check, self.instance, self.verdict);
        for (k, v) in &self.params {
            write!(s, " {k}={v}").unwrap();
        }
        if let Some(st) = &self.stats {
            write!(s, " ef_rows={} size={} tau={}", st.ef_rows, st.formula_size, st.tau).unwrap();
        }
        for (k, v) in &self.observations {
            write!(s, " {k}={v}").unwrap();
        }
        if let Some(c) = &self.certificate {
            write!(s, " certificate={c}").unwrap();
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// `true` for passing reports; otherwise re-checks the certificate.
    pub fn reverify(&self, phi: &Formula, q: &ExtendedFormulation) -> bool {
        match (&self.verdict, &self.certificate, &self.subject) {
            (Verdict::Pass, _, _) => true,
            (Verdict::Fail, Some(c), Some(subject)) => c.verify(phi, q, subject),
            _ => false,
        }
    }
}

fn unit(n: usize, i: usize, sign: i64) -> Vec<Rational> {
    let mut c = vec![int(0); n];
    c[i] = int(sign);
    c
}

/// Some axis direction along which `ef` is unbounded.
fn unbounded_direction(ef: &ExtendedFormulation) -> Result<Option<Vec<Rational>>> {
    let n = ef.xdim();
    for i in 0..n {
        for sign in [1, -1] {
            let c = unit(n, i, sign);
            match lp::optimize(ef, &c, Sense::Min) {
                Err(Error::Unbounded) => return Ok(Some(c)),
                Err(e) => return Err(e),
                Ok(_) => {}
            }
        }
    }
    Ok(None)
}

fn lift_once(phi: &Formula, q: &ExtendedFormulation) -> Result<(ExtendedFormulation, LiftReport)> {
    if q.is_empty_marker() {
        return Err(Error::EmptyInput);
    }
    lift(phi, q)
}

fn enumerate_checked(phi: &Formula) -> Result<PointSet01> {
    phi.enumerate_set()
}

/// Every 0/1 point of `Q` with `φ = 1` lies in `φ(Q)`, and `φ(Q) ⊆ Q`.
pub fn check_sandwich(instance: &str, phi: &Formula, q: &ExtendedFormulation, seed: u64) -> Result<CheckReport> {
    let start = Instant::now();
    let (lifted, rep) = lift_once(phi, q)?;
    let mut report = sandwich_on(instance, phi, q, &lifted, seed)?;
    report.stats_from(&lifted, Some(&rep), phi);
    Ok(report.timed(start))
}

/// [`check_sandwich`] against a given EF in place of `φ(Q)`.
pub fn check_sandwich_on(
    instance: &str,
    phi: &Formula,
    q: &ExtendedFormulation,
    lifted: &ExtendedFormulation,
    seed: u64,
) -> Result<CheckReport> {
    let start = Instant::now();
    let mut report = sandwich_on(instance, phi, q, lifted, seed)?;
    report.stats_from(lifted, None, phi);
    Ok(report.timed(start))
}

fn sandwich_on(
    instance: &str,
    phi: &Formula,
    q: &ExtendedFormulation,
    lifted: &ExtendedFormulation,
    seed: u64,
) -> Result<CheckReport> {
    let n = phi.n();
    let s = enumerate_checked(phi)?;
    let mut report = CheckReport::new("sandwich", instance).param("n", n);
    let mut members = 0usize;
    for p in s.points() {
        let x = to_rational(p);
        if !lp::contains_point(q, &x)? {
            continue;
        }
        if !lp::contains_point(lifted, &x)? {
            report.fail(Certificate::MissingPoint { point: p.clone() }, lifted);
            return Ok(report);
        }
        members += 1;
    }
    report.observe("members", members);
    if lifted.is_empty_marker() {
        return Ok(report);
    }
    if let Some(rows) = q.as_hrep() {
        report = report.param("containment", "facets");
        for (a, beta) in rows {
            match lp::optimize(lifted, &a, Sense::Min) {
                Err(Error::Unbounded) => {
                    report.fail(Certificate::Unbounded { c: a }, lifted);
                    return Ok(report);
                }
                Err(Error::EmptyInput) => break,
                Err(e) => return Err(e),
                Ok(out) => {
                    if out.value.as_ref().is_some_and(|v| *v < beta) {
                        let cert = Certificate::Separated {
                            a,
                            beta,
                            equation: false,
                            against_set: false,
                            point: out.x.expect("optimal point"),
                        };
                        report.fail(cert, lifted);
                        return Ok(report);
                    }
                }
            }
        }
        return Ok(report);
    }
    report = report.param("containment", "directions").param("seed", seed);
    let mut rng = seeded_rng(seed);
    let mut dirs: Vec<Vec<Rational>> = (0..n).flat_map(|i| [unit(n, i, 1), unit(n, i, -1)]).collect();
    for _ in 0..8 {
        dirs.push((0..n).map(|_| int(rng.gen_range(-3..=3))).collect());
    }
    for c in dirs {
        let neg: Vec<Rational> = c.iter().map(|v| -v).collect();
        let bound = match lp::optimize(q, &c, Sense::Max) {
            Ok(o) => o.value.expect("optimal value"),
            Err(Error::EmptyInput) => break,
            Err(e) => return Err(e),
        };
        match lp::optimize(lifted, &c, Sense::Max) {
            Err(Error::Unbounded) => {
                report.fail(Certificate::Unbounded { c: neg }, lifted);
                return Ok(report);
            }
            Err(e) => return Err(e),
            Ok(out) => {
                if out.value.as_ref().is_some_and(|v| *v > bound) {
                    let point = out.x.expect("optimal point");
                    report.fail(Certificate::Escapes { c, bound, point }, lifted);
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

fn hull_certificate(lifted: &ExtendedFormulation, s: &PointSet01) -> Result<Option<Certificate>> {
    let n = s.dim();
    if s.is_empty() {
        let e = lp::is_empty(lifted);
        return Ok(if e.empty {
            None
        } else {
            Some(Certificate::Separated {
                a: vec![int(0); n],
                beta: int(1),
                equation: false,
                against_set: true,
                point: e.witness.map(|y| lifted.project(&y)).expect("witness of a nonempty EF"),
            })
        });
    }
    match equals_hull(lifted, s) {
        Ok(None) => Ok(None),
        Ok(Some(HullMismatch::Missing(point))) => Ok(Some(Certificate::MissingPoint { point })),
        Ok(Some(HullMismatch::Separated {
            a,
            beta,
            equation,
            point,
        })) => Ok(Some(Certificate::Separated {
            a,
            beta,
            equation,
            against_set: true,
            point,
        })),
        Err(Error::Unbounded) => Ok(unbounded_direction(lifted)?.map(|c| Certificate::Unbounded { c })),
        Err(e) => Err(e),
    }
}

/// `φ^n([0,1]^n) = conv(S)`; also records the first round `k ≤ k_max` with equality.
pub fn check_completeness(instance: &str, phi: &Formula, k_max: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let n = phi.n();
    if n > HULL_LIMIT {
        return Err(Error::LimitExceeded { n, limit: HULL_LIMIT });
    }
    let s = enumerate_checked(phi)?;
    let cube = ExtendedFormulation::cube(n);
    let mut report = CheckReport::new("complete", instance).param("n", n).param("k_max", k_max);
    let mut cur = cube;
    let mut first_equal = None;
    let mut last_rep = None;
    for k in 1..=k_max.max(n) {
        if cur.is_empty_marker() {
            // stays empty under further rounds
        } else {
            let (next, rep) = lift(phi, &cur)?;
            cur = next;
            last_rep = Some(rep);
        }
        let check_now = (first_equal.is_none() && k <= k_max) || k == n;
        if !check_now {
            continue;
        }
        let cert = hull_certificate(&cur, &s)?;
        if cert.is_none() && first_equal.is_none() {
            first_equal = Some(k);
        }
        if k == n {
            if let Some(cert) = cert {
                report.fail(cert, &cur);
            }
            report.stats_from(&cur, last_rep.as_ref(), phi);
        }
        if k >= n && (first_equal.is_some() || k >= k_max) {
            break;
        }
    }
    if n == 0 {
        report.stats_from(&cur, None, phi);
    }
    report.observe(
        "first_equal",
        first_equal.map_or("none".to_string(), |k| k.to_string()),
    );
    Ok(report.timed(start))
}

/// Hull equality of a given EF, standing in for `φ^n([0,1]^n)`.
pub fn check_completeness_on(instance: &str, phi: &Formula, lifted: &ExtendedFormulation) -> Result<CheckReport> {
    let start = Instant::now();
    let s = enumerate_checked(phi)?;
    let mut report = CheckReport::new("complete", instance).param("n", phi.n());
    if let Some(cert) = hull_certificate(lifted, &s)? {
        report.fail(cert, lifted);
    }
    report.stats_from(lifted, None, phi);
    Ok(report.timed(start))
}

/// `x ∈ φ(Q) ⟺ φ(x) = 1 ∧ x ∈ Q` for every `x ∈ {0,1}^n`.
pub fn check_integrality(instance: &str, phi: &Formula, q: &ExtendedFormulation) -> Result<CheckReport> {
    let start = Instant::now();
    let (lifted, rep) = lift_once(phi, q)?;
    let mut report = integrality_on(instance, phi, q, &lifted)?;
    report.stats_from(&lifted, Some(&rep), phi);
    Ok(report.timed(start))
}

pub fn check_integrality_on(
    instance: &str,
    phi: &Formula,
    q: &ExtendedFormulation,
    lifted: &ExtendedFormulation,
) -> Result<CheckReport> {
    let start = Instant::now();
    let mut report = integrality_on(instance, phi, q, lifted)?;
    report.stats_from(lifted, None, phi);
    Ok(report.timed(start))
}

fn integrality_on(
    instance: &str,
    phi: &Formula,
    q: &ExtendedFormulation,
    lifted: &ExtendedFormulation,
) -> Result<CheckReport> {
    let n = phi.n();
    enumerate_checked(phi)?;
    let mut report = CheckReport::new("integral", instance).param("n", n);
    let mut lps = 0usize;
    for p in PointSet01::cube_points(n) {
        let x = to_rational(&p);
        let expected = phi.evaluate(&p)? && lp::contains_point(q, &x)?;
        let got = lp::contains_point(lifted, &x)?;
        lps += 1;
        if got != expected {
            let cert = if expected {
                Certificate::MissingPoint { point: p }
            } else {
                Certificate::ExtraPoint { point: p }
            };
            report.fail(cert, lifted);
            break;
        }
    }
    report.observe("membership_lps", lps);
    Ok(report)
}

fn closure_chain(
    mode: ClosureMode,
    instance: &str,
    phi: &Formula,
    relaxations: &[ExtendedFormulation],
    reports: &[LiftReport],
) -> Result<CheckReport> {
    let start = Instant::now();
    let n = phi.n();
    let s = enumerate_checked(phi)?;
    let (name, key) = match mode {
        ClosureMode::Pitch => ("pitch", "k_max"),
        ClosureMode::Notch => ("notch", "v_max"),
    };
    let mut report = CheckReport::new(name, instance)
        .param("n", n)
        .param(key, relaxations.len());
    let mut lps = Vec::new();
    for (i, r) in relaxations.iter().enumerate() {
        let level = i + 1;
        if r.is_empty_marker() {
            lps.push("0".to_string());
            continue;
        }
        let closure = verify_closure(&ClosureQuery {
            mode,
            level,
            target: &s,
            relaxation: r,
        })?;
        lps.push(closure.lp_calls.to_string());
        if let Some(v) = closure.violation {
            report.fail(Certificate::Closure {
                mode,
                level,
                violation: v,
            }, r);
            break;
        }
    }
    report.observe("oracle_lps", lps.join(","));
    if let Some(last) = relaxations.last() {
        report.stats_from(last, reports.last(), phi);
    }
    Ok(report.timed(start))
}

fn rounds(phi: &Formula, k: usize) -> Result<(Vec<ExtendedFormulation>, Vec<LiftReport>)> {
    let mut cur = ExtendedFormulation::cube(phi.n());
    let mut out = Vec::with_capacity(k);
    let mut reps = Vec::with_capacity(k);
    for _ in 0..k {
        if !cur.is_empty_marker() {
            let (next, rep) = lift(phi, &cur)?;
            cur = next;
            reps.push(rep);
        }
        out.push(cur.clone());
    }
    Ok((out, reps))
}

/// `φ^k([0,1]^n)` satisfies every valid monotone inequality of pitch `≤ k`, for `k = 1..k_max`.
pub fn check_pitch_progression(instance: &str, phi: &Formula, k_max: usize) -> Result<CheckReport> {
    if !phi.is_monotone() {
        return Err(Error::Invalid("pitch progression needs a monotone formula".into()));
    }
    if phi.n() > PITCH_LIMIT {
        return Err(Error::LimitExceeded {
            n: phi.n(),
            limit: PITCH_LIMIT,
        });
    }
    let (rs, reps) = rounds(phi, k_max)?;
    closure_chain(ClosureMode::Pitch, instance, phi, &rs, &reps)
}

/// The pitch chain against given EFs; `relaxations[k-1]` stands for `φ^k([0,1]^n)`.
pub fn check_pitch_progression_on(
    instance: &str,
    phi: &Formula,
    relaxations: &[ExtendedFormulation],
) -> Result<CheckReport> {
    closure_chain(ClosureMode::Pitch, instance, phi, relaxations, &[])
}

/// `φ^ν([0,1]^n)` satisfies every valid inequality of notch `≤ ν`, for `ν = 1..v_max`.
pub fn check_notch_progression(instance: &str, phi: &Formula, v_max: usize) -> Result<CheckReport> {
    if phi.n() > NOTCH_LIMIT {
        return Err(Error::LimitExceeded {
            n: phi.n(),
            limit: NOTCH_LIMIT,
        });
    }
    let (rs, reps) = rounds(phi, v_max)?;
    closure_chain(ClosureMode::Notch, instance, phi, &rs, &reps)
}

pub fn check_notch_progression_on(
    instance: &str,
    phi: &Formula,
    relaxations: &[ExtendedFormulation],
) -> Result<CheckReport> {
    closure_chain(ClosureMode::Notch, instance, phi, relaxations, &[])
}

/// Number of clauses when `φ` is a conjunction of disjunctions of positive literals.
pub fn covering_rows(phi: &Formula) -> Option<usize> {
    fn clause(node: &Node) -> bool {
        match node {
            Node::Lit { negated, .. } => !negated,
            Node::Or(a, b) => clause(a) && clause(b),
            _ => false,
        }
    }
    fn conj(node: &Node) -> Option<usize> {
        match node {
            Node::And(a, b) => Some(conj(a)? + conj(b)?),
            other => clause(other).then_some(1),
        }
    }
    conj(phi.root())
}

fn ratio(num: usize, den: usize) -> String {
    if den == 0 {
        return "inf".into();
    }
    format!("{:.4}", num as f64 / den as f64)
}

/// Row counts of `k` rounds against the constructive bound (asserted) and
/// the product and covering bounds (reported).
pub fn check_size_accounting(instance: &str, phi: &Formula, q: &ExtendedFormulation, k: usize) -> Result<CheckReport> {
    let start = Instant::now();
    let n = phi.n();
    let mut report = CheckReport::new("size", instance).param("n", n).param("rounds", k);
    let (ef, reps) = iterate_lift_with(phi, q, k, LiftOptions::default())?;
    let mut cur_in = q.clone();
    for (i, rep) in reps.iter().enumerate() {
        let bound = rep.constructive_bound();
        if rep.rows_out > bound {
            // rebuild the failing round so the certificate has its subject
            let (bad, _) = lift(phi, &cur_in)?;
            let cert = Certificate::SizeBound {
                rows: rep.rows_out,
                bound,
                rows_in: rep.rows_in,
            };
            report.observe("failed_round", i + 1);
            report.fail(cert, &bad);
            break;
        }
        if i + 1 < reps.len() {
            cur_in = lift(phi, &cur_in)?.0;
        }
    }
    let rows: Vec<String> = reps.iter().map(|r| r.rows_out.to_string()).collect();
    let bounds: Vec<String> = reps.iter().map(|r| r.constructive_bound().to_string()).collect();
    let product: Vec<String> = reps.iter().map(|r| ratio(r.rows_out, r.product_bound())).collect();
    report.observe("rows", rows.join(","));
    report.observe("bound", bounds.join(","));
    report.observe("ratio_product", product.join(","));
    if let Some(m) = covering_rows(phi) {
        let mut cov = Vec::new();
        let mut b = 2 * n;
        for r in &reps {
            b = b.saturating_mul(m * n);
            cov.push(format!("{}/{}", r.rows_out, b));
        }
        report.observe("m", m);
        report.observe("vs_2n_mn_k", cov.join(","));
    }
    if let Some(first) = reps.first() {
        if !q.is_empty_marker() {
            let naive = lift_with(
                phi,
                q,
                LiftOptions {
                    collapse: false,
                    ..LiftOptions::default()
                },
            )?
            .0;
            report.observe("naive_rows", naive.ef_rows());
            report.observe("collapse_saved", naive.ef_rows() as i64 - first.rows_out as i64);
        }
    }
    report.stats_from(&ef, reps.last(), phi);
    Ok(report.timed(start))
}

/// Checks a given EF, standing in for `φ(Q)`, against the constructive bound.
pub fn check_size_accounting_on(
    instance: &str,
    phi: &Formula,
    q: &ExtendedFormulation,
    lifted: &ExtendedFormulation,
) -> Result<CheckReport> {
    let start = Instant::now();
    let mut report = CheckReport::new("size", instance).param("n", phi.n()).param("rounds", 1);
    let rows_in = q.ef_rows();
    let bound = phi.size() * (rows_in + 2) + 2 * phi.n() * phi.and_count();
    report.observe("rows", lifted.ef_rows());
    report.observe("bound", bound);
    if lifted.ef_rows() > bound {
        let cert = Certificate::SizeBound {
            rows: lifted.ef_rows(),
            bound,
            rows_in,
        };
        report.fail(cert, lifted);
    }
    report.stats_from(lifted, None, phi);
    Ok(report.timed(start))
}

/// Deliberately broken inputs the checkers must reject.
pub mod fixtures {
    use super::*;

    /// The first EF obtained from `lifted` by dropping one row that `fails` rejects.
    pub fn drop_row_until(
        lifted: &ExtendedFormulation,
        mut fails: impl FnMut(&ExtendedFormulation) -> Result<bool>,
    ) -> Result<Option<(usize, ExtendedFormulation)>> {
        for i in 0..lifted.ef_rows() {
            let broken = lifted.without_row(i);
            if fails(&broken)? {
                return Ok(Some((i, broken)));
            }
        }
        Ok(None)
    }

    /// `x1 ∨ x2` over `{x ∈ [0,1]² : x1 + x2 ≤ 1}`.
    pub fn triangle() -> (Formula, ExtendedFormulation) {
        let phi = Formula::parse("x1 | x2", 2).expect("fixture formula");
        let q = ExtendedFormulation::from_hrep(2, &[(vec![int(-1), int(-1)], int(-1))]).expect("fixture polytope");
        (phi, q)
    }

    /// `lifted` with every row stated twice.
    pub fn doubled(lifted: &ExtendedFormulation) -> Result<ExtendedFormulation> {
        lifted.intersect(lifted)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn f(s: &str, n: usize) -> Formula {
        Formula::parse(s, n).unwrap()
    }

    #[test]
    fn sandwich_passes_and_counts_members() {
        let phi = f("(x2 | x3) & (x1 | x3) & (x1 | x2) & (x1 | x2 | x3)", 3);
        let r = check_sandwich("t", &phi, &ExtendedFormulation::cube(3), 1).unwrap();
        assert!(r.passed(), "{}", r.line());
        assert!(r.line().contains("members=4"));
    }

    #[test]
    fn sandwich_on_non_hrep_uses_directions() {
        let (phi, q) = triangle();
        let (l1, _) = lift(&phi, &q).unwrap();
        let r = check_sandwich("t", &phi, &l1, 3).unwrap();
        assert!(r.passed(), "{}", r.line());
        assert!(r.line().contains("containment=directions seed=3"));
    }

    #[test]
    fn broken_sandwich_fails_with_certificate() {
        let (phi, q) = triangle();
        let (lifted, _) = lift(&phi, &q).unwrap();
        let (_, broken) = drop_row_until(&lifted, |b| Ok(!check_sandwich_on("t", &phi, &q, b, 0)?.passed()))
            .unwrap()
            .expect("some row matters");
        let r = check_sandwich_on("t", &phi, &q, &broken, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.reverify(&phi, &q), "{}", r.line());
        assert!(r.to_json().contains("\"verdict\":\"fail\""));
    }

    #[test]
    fn completeness_literal_first_round() {
        let r = check_completeness("lit", &f("x2", 3), 3).unwrap();
        assert!(r.passed());
        assert!(r.line().contains("first_equal=1"), "{}", r.line());
    }

    #[test]
    fn completeness_broken_fails() {
        let phi = f("x1 & x2", 2);
        let r = check_completeness_on("t", &phi, &ExtendedFormulation::cube(2)).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.reverify(&phi, &ExtendedFormulation::cube(2)));
    }

    #[test]
    fn completeness_empty_set() {
        let r = check_completeness("none", &f("x1 & !x1", 2), 2).unwrap();
        assert!(r.passed(), "{}", r.line());
    }

    #[test]
    fn integrality_and_broken_integrality() {
        let (phi, q) = triangle();
        let r = check_integrality("t", &phi, &q).unwrap();
        assert!(r.passed());
        let (lifted, _) = lift(&phi, &q).unwrap();
        let (_, broken) = drop_row_until(&lifted, |b| Ok(!check_integrality_on("t", &phi, &q, b)?.passed()))
            .unwrap()
            .unwrap();
        let r = check_integrality_on("t", &phi, &q, &broken).unwrap();
        assert!(matches!(r.certificate, Some(Certificate::ExtraPoint { .. })));
        assert!(r.reverify(&phi, &q));
    }

    #[test]
    fn integrality_vacuous_when_set_empty() {
        let r = check_integrality("none", &f("x1 & !x1", 2), &ExtendedFormulation::cube(2)).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn closure_chains_and_negative_controls() {
        let phi = f("(x2 | x3) & (x1 | x3) & (x1 | x2)", 3);
        assert!(check_pitch_progression("tri", &phi, 2).unwrap().passed());
        assert!(check_notch_progression("tri", &phi, 2).unwrap().passed());
        let cube = ExtendedFormulation::cube(3);
        for r in [
            check_pitch_progression_on("tri", &phi, std::slice::from_ref(&cube)).unwrap(),
            check_notch_progression_on("tri", &phi, std::slice::from_ref(&cube)).unwrap(),
        ] {
            assert_eq!(r.verdict, Verdict::Fail);
            assert!(r.reverify(&phi, &cube), "{}", r.line());
        }
    }

    #[test]
    fn size_accounting_example_and_control() {
        let phi = f("(!x1 | x2) & (x1 | x3)", 3);
        let cube = ExtendedFormulation::cube(3);
        let r = check_size_accounting("p", &phi, &cube, 1).unwrap();
        assert!(r.passed());
        assert!(r.line().contains("bound=38"), "{}", r.line());
        let (lifted, _) = lift(&phi, &cube).unwrap();
        let bad = doubled(&lifted).unwrap();
        let r = check_size_accounting_on("p", &phi, &cube, &bad).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.reverify(&phi, &cube));
    }

    #[test]
    fn covering_rows_detects_cnf() {
        assert_eq!(covering_rows(&f("(x1 | x2) & x3", 3)), Some(2));
        assert_eq!(covering_rows(&f("x1 & x2 | x3", 3)), None);
        assert_eq!(covering_rows(&f("!x1 | x2", 2)), None);
    }

    #[test]
    fn lines_are_deterministic() {
        let phi = f("x1 | x2 & x3", 3);
        let a = check_integrality("d", &phi, &ExtendedFormulation::cube(3)).unwrap();
        let b = check_integrality("d", &phi, &ExtendedFormulation::cube(3)).unwrap();
        assert_eq!(a.line(), b.line());
    }
}
