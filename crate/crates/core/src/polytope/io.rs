//! Line-oriented text form:
//!
//! ```text
//! ef
//! xvars n
//! yvars d
//! ineq c1 … cd >= r        (one line per row)
//! proj i t_i c1 … cd       (one line per x coordinate, i is 1-based)
//! ```
//!
//! With `yvars 0` the file is an H-representation in `x`: `ineq` lines carry `n`
//! coefficients, `eq c1 … cn = r` lines are allowed, and `proj` lines are omitted.
//!
//! An optional `hint reverse-empty` line after `yvars` records that
//! `{w : Aw ≤ b}` is empty; it is re-checked by LP when read.

use std::fmt::Write as _;

use num_traits::Zero;

use super::{sparse_from_dense, ExtendedFormulation, SparseVec};
use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, parse_rational, Rational};

fn dense(a: &SparseVec, d: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); d];
    for (j, v) in a {
        out[*j] = v.clone();
    }
    out
}

fn join(v: &[Rational]) -> String {
    v.iter().map(fmt_rational).collect::<Vec<_>>().join(" ")
}

impl ExtendedFormulation {
    pub fn to_text(&self) -> String {
        let n = self.xdim;
        let mut s = String::new();
        writeln!(s, "ef\nxvars {n}").unwrap();
        if self.empty {
            writeln!(s, "yvars 0").unwrap();
            let zeros = vec![Rational::zero(); n];
            writeln!(s, "ineq {} >= 1", join(&zeros)).unwrap();
            return s;
        }
        let d = self.ydim;
        writeln!(s, "yvars {d}").unwrap();
        if self.reverse_empty && !self.has_contradictory_opposite_pair() {
            writeln!(s, "hint reverse-empty").unwrap();
        }
        for (a, b) in self.rows.iter().zip(&self.rhs) {
            writeln!(s, "ineq {} >= {}", join(&dense(a, d)), fmt_rational(b)).unwrap();
        }
        for (i, (row, t)) in self.proj.iter().zip(&self.offset).enumerate() {
            let coeffs = dense(row, d);
            let sep = if d == 0 { "" } else { " " };
            writeln!(s, "proj {} {}{sep}{}", i + 1, fmt_rational(t), join(&coeffs)).unwrap();
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<ExtendedFormulation> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| Error::Format {
            line,
            msg: msg.to_string(),
        };
        let mut header = |key: &str| -> Result<usize> {
            let (no, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file"))?;
            let mut parts = l.split_whitespace();
            if parts.next() != Some(key) {
                return Err(err(no, &format!("expected '{key}'")));
            }
            if key == "ef" {
                return Ok(0);
            }
            parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(no, &format!("expected '{key} <count>'")))
        };
        header("ef")?;
        let n = header("xvars")?;
        let d = header("yvars")?;
        let hrep = d == 0;
        let width = if hrep { n } else { d };

        let mut rows: Vec<(SparseVec, Rational)> = Vec::new();
        let mut proj: Vec<Option<(SparseVec, Rational)>> = vec![None; n];
        let parse_list = |no: usize, items: &[&str]| -> Result<Vec<Rational>> {
            items
                .iter()
                .map(|t| parse_rational(t).map_err(|e| err(no, &e.to_string())))
                .collect()
        };
        let mut hint = false;
        for (no, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks[0] {
                "hint" if toks.get(1) == Some(&"reverse-empty") && toks.len() == 2 => hint = true,
                "ineq" | "eq" => {
                    let op = if toks[0] == "ineq" { ">=" } else { "=" };
                    if toks.len() != width + 3 || toks[width + 1] != op {
                        return Err(err(
                            no,
                            &format!("expected '{} <{width} coefficients> {op} <rhs>'", toks[0]),
                        ));
                    }
                    if toks[0] == "eq" && !hrep {
                        return Err(err(no, "'eq' lines are only allowed with yvars 0"));
                    }
                    let a = sparse_from_dense(&parse_list(no, &toks[1..=width])?);
                    let b = parse_list(no, &toks[width + 2..])?.remove(0);
                    if toks[0] == "eq" {
                        rows.push((a.iter().map(|(j, v)| (*j, -v)).collect(), -b.clone()));
                    }
                    rows.push((a, b));
                }
                "proj" if !hrep => {
                    if toks.len() != d + 3 {
                        return Err(err(no, "expected 'proj i t_i c1 … cd'"));
                    }
                    let i: usize = toks[1]
                        .parse()
                        .ok()
                        .filter(|&i| (1..=n).contains(&i))
                        .ok_or_else(|| err(no, "projection index out of range"))?;
                    let vals = parse_list(no, &toks[2..])?;
                    proj[i - 1] = Some((sparse_from_dense(&vals[1..]), vals[0].clone()));
                }
                other => return Err(err(no, &format!("unexpected line kind '{other}'"))),
            }
        }
        if hrep {
            let identity = (0..n).map(|i| vec![(i, int(1))]).collect();
            return ExtendedFormulation::from_parts(n, n, rows, identity, vec![Rational::zero(); n]);
        }
        let mut p = Vec::with_capacity(n);
        let mut t = Vec::with_capacity(n);
        for (i, entry) in proj.into_iter().enumerate() {
            let (row, off) = entry.ok_or_else(|| err(0, &format!("missing proj line for x{}", i + 1)))?;
            p.push(row);
            t.push(off);
        }
        let mut ef = ExtendedFormulation::from_parts(n, d, rows, p, t)?;
        if hint && !ef.reverse_empty {
            ef.reverse_empty = ef.check_reverse_empty();
        }
        Ok(ef)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_general() {
        let c = ExtendedFormulation::cube(2);
        let u = c
            .face_restrict(0, false)
            .unwrap()
            .balas_union(&c.face_restrict(1, true).unwrap())
            .unwrap();
        let text = u.to_text();
        assert!(text.starts_with("ef\nxvars 2\nyvars 5\n"));
        assert_eq!(ExtendedFormulation::parse_text(&text).unwrap(), u);
    }

    #[test]
    fn hrep_mode() {
        let text = "ef\nxvars 2\nyvars 0\nineq 1 1 >= 1\neq 1 -1 = 0\n";
        let ef = ExtendedFormulation::parse_text(text).unwrap();
        assert_eq!(ef.ef_rows(), 3);
        assert!(ef.as_hrep().is_some());
        assert!(ef.satisfies(&[int(1), int(1)]));
        assert!(!ef.satisfies(&[int(1), int(0)]));
    }

    #[test]
    fn empty_marker_roundtrip() {
        let e = ExtendedFormulation::empty(3);
        let back = ExtendedFormulation::parse_text(&e.to_text()).unwrap();
        assert!(back.is_empty_marker());
    }

    #[test]
    fn format_errors() {
        assert!(matches!(
            ExtendedFormulation::parse_text("ef\nxvars 1\nyvars 1\nineq 1 >= x\nproj 1 0 1\n"),
            Err(Error::Format { line: 4, .. })
        ));
        assert!(ExtendedFormulation::parse_text("ef\nxvars 1\nyvars 1\nineq 1 >= 0\n").is_err());
        assert!(ExtendedFormulation::parse_text("xvars 1").is_err());
    }
}
