//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;

use formula_lift::formula::{minterm_dnf, random_reduced, threshold_formula};
use formula_lift::hull::{equals_hull, facets_of_points, vertices_of_hrep};
use formula_lift::instances::{
    gen_bounded_covering, gen_bz, gen_matching_k4, k4_perfect_matchings, random_bounded_system, seeded_rng,
    K4_EDGES,
};
use formula_lift::lp::{optimize, LpOutcome, Sense};
use formula_lift::measures::{
    notch_of, notch_of_set, parse_inequality, pitch_of, to_standard_form, verify_closure, ClosureMode,
    ClosureQuery, StandardFormInequality, Standardized,
};
use formula_lift::points::to_rational;
use formula_lift::polytope::{iterate_lift_with, LiftOptions};
use formula_lift::rational::{fmt_rational, frac, int};
use formula_lift::verify::{self, fixtures, CheckReport, Verdict};
use formula_lift::{ExtendedFormulation, Formula, Node, PointSet01, Rational};

/// Every LP optimum the run relies on, checked for exact strong duality.
static LPS_SOLVED: AtomicUsize = AtomicUsize::new(0);
static LPS_BAD: AtomicUsize = AtomicUsize::new(0);

/// Instances of criteria 1 to 6 with the number of rounds they were lifted.
static SIZE_CASES: Mutex<Vec<(String, Formula, usize)>> = Mutex::new(Vec::new());

fn record(name: &str, phi: &Formula, rounds: usize) {
    SIZE_CASES.lock().unwrap().push((name.to_string(), phi.clone(), rounds));
}

fn opt(ef: &ExtendedFormulation, c: &[Rational], sense: Sense) -> LpOutcome {
    let out = optimize(ef, c, sense).expect("bounded nonempty LP");
    LPS_SOLVED.fetch_add(1, Ordering::Relaxed);
    if !out.verify(ef, c, sense) {
        LPS_BAD.fetch_add(1, Ordering::Relaxed);
    }
    out
}

fn min_value(ef: &ExtendedFormulation, c: &[Rational]) -> Rational {
    opt(ef, c, Sense::Min).value.expect("optimal")
}

fn lifts(phi: &Formula, k: usize) -> Vec<ExtendedFormulation> {
    let mut out = Vec::new();
    let mut cur = ExtendedFormulation::cube(phi.n());
    for _ in 0..k {
        cur = iterate_lift_with(phi, &cur, 1, LiftOptions::default()).unwrap().0;
        out.push(cur.clone());
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(r: &CheckReport) -> Result<(), String> {
    ensure(r.passed(), || r.line())
}

fn c1() -> Result<String, String> {
    let inst = gen_bz(5).unwrap();
    let phi = &inst.formula;
    let ones = vec![int(1); 5];
    let ls = lifts(phi, 2);
    let v1 = min_value(&ls[0], &ones);
    let v2 = min_value(&ls[1], &ones);
    // independent values: the pitch-1 system optimum, and the minimum weight over S
    let rows: Vec<(Vec<Rational>, Rational)> = (0..5)
        .map(|j| ((0..5).map(|i| int(i64::from(i != j))).collect(), int(1)))
        .collect();
    let pitch1 = ExtendedFormulation::from_hrep(5, &rows).unwrap();
    let sys = min_value(&pitch1, &ones);
    ensure(sys == frac(5, 4), || format!("pitch-1 system optimum {sys}"))?;
    let brute = PointSet01::cube_points(5)
        .filter(|p| phi.evaluate(p).unwrap())
        .map(|p| p.iter().filter(|&&b| b).count())
        .min()
        .unwrap();
    ensure(v1 >= frac(5, 4), || format!("min over one round {v1} < 5/4"))?;
    ensure(v2 == int(brute as i64), || format!("min over two rounds {v2} != {brute}"))?;
    record("bz5", phi, 2);
    Ok(format!(
        "min sum over phi^1 = {}, over phi^2 = {} (rows {} and {})",
        fmt_rational(&v1),
        fmt_rational(&v2),
        ls[0].ef_rows(),
        ls[1].ef_rows()
    ))
}

fn c2() -> Result<String, String> {
    let mut first = [0usize; 4];
    let mut count = 0;
    for mask in 1u32..256 {
        let pts = PointSet01::cube_points(3)
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .collect();
        let s = PointSet01::new(3, pts).unwrap();
        let phi = minterm_dnf(&s);
        let name = format!("minterm-{s}");
        let r = verify::check_completeness(&name, &phi, 3).map_err(|e| format!("{name}: {e}"))?;
        passed(&r)?;
        let k = r
            .observations
            .iter()
            .find(|(key, _)| key == "first_equal")
            .and_then(|(_, v)| v.parse::<usize>().ok())
            .ok_or_else(|| format!("{name}: no first-equality round"))?;
        first[k] += 1;
        count += 1;
        record(&name, &phi, 3);
    }
    Ok(format!(
        "{count} sets, hull equality at k=3; first equal at k=1/2/3: {}/{}/{}",
        first[1], first[2], first[3]
    ))
}

fn c3() -> Result<String, String> {
    let seed = 3;
    let mut rng = seeded_rng(seed);
    let cube = ExtendedFormulation::cube(4);
    let mut lps = 0;
    for i in 0..50 {
        let size = rng.gen_range(2..=9);
        let phi = random_reduced(4, size, 0.35, &mut rng);
        let name = format!("random-s{seed}-{i}");
        let r = verify::check_integrality(&name, &phi, &cube).map_err(|e| e.to_string())?;
        passed(&r)?;
        lps += 16;
        record(&name, &phi, 1);
    }
    Ok(format!("50 formulas (seed {seed}), {lps} membership LPs, no disagreement"))
}

/// `Σ_{i∈I} x_i ≥ 1` for every nonempty `I` whose face `x_I = 0` misses `S`.
fn pitch1_system(s: &PointSet01) -> Vec<(Vec<Rational>, Rational)> {
    let n = s.dim();
    (1u32..1 << n)
        .filter(|m| s.points().iter().all(|p| (0..n).any(|i| m >> i & 1 == 1 && p[i])))
        .map(|m| ((0..n).map(|i| int(i64::from(m >> i & 1))).collect(), int(1)))
        .collect()
}

fn pitch_cross_check(name: &str, phi: &Formula, rounds: &[ExtendedFormulation]) -> Result<(), String> {
    let s = phi.enumerate_set().unwrap();
    let n = s.dim();
    let system = pitch1_system(&s);
    for r in rounds {
        for (a, beta) in &system {
            let v = min_value(r, a);
            ensure(&v >= beta, || format!("{name}: pitch-1 row {a:?} violated, min {v}"))?;
        }
    }
    let sys_ef = ExtendedFormulation::from_hrep(n, &system).unwrap();
    let query = |relaxation| ClosureQuery {
        mode: ClosureMode::Pitch,
        level: 1,
        target: &s,
        relaxation,
    };
    let on_sys = verify_closure(&query(&sys_ef)).unwrap();
    ensure(on_sys.violation.is_none(), || format!("{name}: oracle cuts the pitch-1 system"))?;
    let cube = ExtendedFormulation::cube(n);
    let on_cube = verify_closure(&query(&cube)).unwrap();
    let v = on_cube
        .violation
        .ok_or_else(|| format!("{name}: oracle finds nothing on the cube"))?;
    let support: Vec<usize> = v.inequality.plus();
    let misses = s.points().iter().all(|p| support.iter().any(|&i| p[i]));
    ensure(misses && pitch_of(&v.inequality) == Ok(1), || {
        format!("{name}: cube violation {} not in the pitch-1 system", v.inequality)
    })
}

fn c4() -> Result<String, String> {
    let tri = Formula::parse("(x1 | x2) & (x1 | x3) & (x2 | x3)", 3).unwrap();
    let cases = [
        ("bz4".to_string(), gen_bz(4).unwrap().formula),
        ("bz5".to_string(), gen_bz(5).unwrap().formula),
        ("triangle-vc".to_string(), tri),
    ];
    let mut notes = Vec::new();
    for (name, phi) in &cases {
        let r = verify::check_pitch_progression(name, phi, 2).map_err(|e| e.to_string())?;
        passed(&r)?;
        record(name, phi, 2);
        if phi.n() <= 4 {
            let rounds = lifts(phi, 2);
            pitch_cross_check(name, phi, &rounds)?;
            if name == "triangle-vc" {
                let s = phi.enumerate_set().unwrap();
                let eq = equals_hull(&rounds[1], &s).unwrap().is_none();
                notes.push(format!("triangle phi^2 = conv(S): {eq}"));
            }
        }
    }
    Ok(format!(
        "bz4, bz5, triangle-vc pass at k=1,2; pitch-1 system cross-checked at n<=4; {}",
        notes.join(", ")
    ))
}

fn c5() -> Result<String, String> {
    let seed = 5;
    let mut rng = seeded_rng(seed);
    for i in 0..20 {
        let size = rng.gen_range(3..=8);
        let phi = random_reduced(4, size, 0.4, &mut rng);
        let name = format!("random-s{seed}-{i}");
        let r = verify::check_notch_progression(&name, &phi, 2).map_err(|e| e.to_string())?;
        passed(&r)?;
        record(&name, &phi, 2);
    }
    Ok(format!("20 formulas with negations (seed {seed}) pass at nu=1,2"))
}

fn c6() -> Result<String, String> {
    let inst = gen_matching_k4().unwrap();
    let phi = &inst.formula;
    let l1 = lifts(phi, 1).remove(0);
    let mut cuts = 0;
    for mask in 1u32..16 {
        if mask.count_ones() % 2 == 0 {
            continue;
        }
        let inside = |v: usize| mask >> v & 1 == 1;
        let a: Vec<Rational> = K4_EDGES
            .iter()
            .map(|&(u, v)| int(i64::from(inside(u) != inside(v))))
            .collect();
        let m = min_value(&l1, &a);
        ensure(m >= int(1), || format!("odd cut {mask:04b} has min {m}"))?;
        cuts += 1;
    }
    let mut eqs = Vec::new();
    for (a, b) in &inst.subspace {
        eqs.push((a.clone(), b.clone()));
        eqs.push((a.iter().map(|v| -v).collect(), -b));
    }
    let d = ExtendedFormulation::from_hrep(6, &eqs).unwrap();
    let face = l1.intersect(&d).unwrap();
    let pm = k4_perfect_matchings();
    ensure(pm.len() == 3, || format!("{} perfect matchings", pm.len()))?;
    let mismatch = equals_hull(&face, &pm).unwrap();
    ensure(mismatch.is_none(), || format!("hull mismatch {mismatch:?}"))?;
    record("matching-k4", phi, 1);
    Ok(format!(
        "{cuts} odd cuts valid; phi^1 on the degree equations equals the hull of 3 perfect matchings"
    ))
}

fn brute_pitch_notch(q: &StandardFormInequality) -> (Option<usize>, usize) {
    let n = q.n();
    let c = q.coefficients();
    let d = q.delta();
    let sums_ok = |k: usize, items: &[usize]| {
        (0u32..1 << items.len())
            .filter(|m| m.count_ones() as usize == k)
            .all(|m| {
                let s: Rational = (0..items.len()).filter(|j| m >> j & 1 == 1).map(|j| c[items[j]].clone()).sum();
                &s >= d
            })
    };
    let all: Vec<usize> = (0..n).collect();
    let support: Vec<usize> = all.iter().copied().filter(|&i| c[i] != int(0)).collect();
    let pitch = (0..=support.len()).find(|&k| sums_ok(k, &support));
    let notch = (0..=n).find(|&k| sums_ok(k, &all)).expect("full sum reaches delta");
    (pitch, notch)
}

fn c7() -> Result<String, String> {
    let (a, beta) = parse_inequality("x1 + x5 >= 1", 5).unwrap();
    let Standardized::Standard(q) = to_standard_form(&a, &beta) else {
        return Err("x1 + x5 >= 1 is trivial".into());
    };
    let (p, nu) = (pitch_of(&q).unwrap(), notch_of(&q).unwrap());
    ensure(p == 1 && nu == 4, || format!("pitch={p} notch={nu}"))?;
    let s = PointSet01::new(3, PointSet01::cube_points(3).filter(|x| x.iter().filter(|&&b| b).count() >= 2).collect())
        .unwrap();
    let ns = notch_of_set(&s).unwrap();
    ensure(ns == 2, || format!("notch of weight-two set {ns}"))?;
    let mut rng = seeded_rng(7);
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.gen_range(1..=6);
        let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(0..=4))).collect();
        let total: i64 = c.iter().map(|v| v.to_integer().try_into().unwrap_or(0i64)).sum();
        if total == 0 {
            continue;
        }
        let delta = frac(rng.gen_range(1..=2 * total), 2);
        if delta > int(total) {
            continue;
        }
        let q = StandardFormInequality::monotone(c, delta).unwrap();
        let (p, nu) = (pitch_of(&q).unwrap(), notch_of(&q).unwrap());
        let (bp, bn) = brute_pitch_notch(&q);
        ensure(Some(p) == bp && nu == bn, || format!("{q}: {p}/{nu} vs brute {bp:?}/{bn}"))?;
        ensure(p <= nu, || format!("{q}: pitch {p} > notch {nu}"))?;
        checked += 1;
    }
    Ok("pitch(x1+x5>=1)=1, notch=4; notch of {|x|>=2} in 3 dims = 2; pitch <= notch on 1000 inequalities".into())
}

fn c8() -> Result<String, String> {
    let cases = SIZE_CASES.lock().unwrap().clone();
    ensure(!cases.is_empty(), || "criteria 1-6 recorded no instance".into())?;
    let mut worst_product: f64 = 0.0;
    let mut bz = String::new();
    let mut saved = 0i64;
    for (name, phi, rounds) in &cases {
        let cube = ExtendedFormulation::cube(phi.n());
        let r = verify::check_size_accounting(name, phi, &cube, *rounds).map_err(|e| e.to_string())?;
        passed(&r)?;
        for (k, v) in &r.observations {
            match k.as_str() {
                "ratio_product" => {
                    for x in v.split(',').filter_map(|x| x.parse::<f64>().ok()) {
                        worst_product = worst_product.max(x);
                    }
                }
                "vs_2n_mn_k" if name == "bz5" => bz = v.clone(),
                "collapse_saved" => saved += v.parse::<i64>().unwrap_or(0),
                _ => {}
            }
        }
    }
    Ok(format!(
        "{} instances within the constructive bound; max rows/(|phi| rows(Q)) = {worst_product:.4}; bz5 rows vs 2n(mn)^k: {bz}; collapse saved {saved} rows in round 1",
        cases.len()
    ))
}

fn c9() -> Result<String, String> {
    for m in 1..=10usize {
        for k in 1..=m as i64 {
            let t = threshold_formula(k, m);
            for x in PointSet01::cube_points(m) {
                let w = x.iter().filter(|&&b| b).count() as i64;
                ensure(t.evaluate(&x).unwrap() == (w >= k), || format!("threshold {k} of {m} at {x:?}"))?;
            }
        }
    }
    let mut rng = seeded_rng(9);
    for i in 0..20 {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(1..=3);
        let (a, b) = random_bounded_system(m, n, 3, &mut rng);
        let inst = gen_bounded_covering(&a, &b, 3).map_err(|e| format!("system {i}: {e}"))?;
        for x in PointSet01::cube_points(n) {
            let direct = a
                .iter()
                .zip(&b)
                .all(|(row, &bi)| row.iter().zip(&x).map(|(&aij, &xj)| aij * u32::from(xj)).sum::<u32>() >= bi);
            ensure(inst.formula.evaluate(&x).unwrap() == direct, || {
                format!("system {i} {a:?} >= {b:?} disagrees at {x:?}")
            })?;
        }
    }
    Ok("threshold formulas exact for 1<=k<=m<=10; 20 bounded systems (seed 9) defined exactly".into())
}

fn random_tree(n: usize, size: usize, rng: &mut impl Rng) -> Node {
    let node = if size == 1 {
        Node::Lit {
            var: rng.gen_range(0..n),
            negated: rng.gen_bool(0.3),
        }
    } else {
        let left = rng.gen_range(1..size);
        let (a, b) = (random_tree(n, left, rng), random_tree(n, size - left, rng));
        if rng.gen_bool(0.5) {
            Node::and(a, b)
        } else {
            Node::or(a, b)
        }
    };
    if rng.gen_bool(0.3) {
        Node::not(node)
    } else {
        node
    }
}

fn negative_controls() -> Result<usize, String> {
    let mut done = 0;
    let mut expect_fail = |r: CheckReport, phi: &Formula, q: &ExtendedFormulation| -> Result<(), String> {
        ensure(r.verdict == Verdict::Fail && r.certificate.is_some(), || format!("control passed: {}", r.line()))?;
        ensure(r.reverify(phi, q), || format!("certificate does not re-verify: {}", r.line()))?;
        done += 1;
        Ok(())
    };
    let (phi, q) = fixtures::triangle();
    let (lifted, _) = formula_lift::polytope::lift(&phi, &q).unwrap();
    let (_, broken) = fixtures::drop_row_until(&lifted, |b| {
        Ok(!verify::check_sandwich_on("control", &phi, &q, b, 0)?.passed())
    })
    .unwrap()
    .ok_or("no row of the sandwich fixture matters")?;
    expect_fail(verify::check_sandwich_on("control", &phi, &q, &broken, 0).unwrap(), &phi, &q)?;
    expect_fail(verify::check_integrality_on("control", &phi, &q, &broken).unwrap(), &phi, &q)?;

    let and2 = Formula::parse("x1 & x2", 2).unwrap();
    let cube2 = ExtendedFormulation::cube(2);
    let (full, _) = formula_lift::polytope::lift(&and2, &cube2).unwrap();
    let (_, broken) = fixtures::drop_row_until(&full, |b| {
        Ok(!verify::check_completeness_on("control", &and2, b)?.passed())
    })
    .unwrap()
    .ok_or("no row of the completeness fixture matters")?;
    expect_fail(verify::check_completeness_on("control", &and2, &broken).unwrap(), &and2, &cube2)?;

    let tri = Formula::parse("(x1 | x2) & (x1 | x3) & (x2 | x3)", 3).unwrap();
    let cube3 = ExtendedFormulation::cube(3);
    let ls = lifts(&tri, 1);
    let (_, broken) = fixtures::drop_row_until(&ls[0], |b| {
        Ok(!verify::check_pitch_progression_on("control", &tri, std::slice::from_ref(b))?.passed())
    })
    .unwrap()
    .ok_or("no row of the pitch fixture matters")?;
    expect_fail(
        verify::check_pitch_progression_on("control", &tri, std::slice::from_ref(&broken)).unwrap(),
        &tri,
        &cube3,
    )?;
    expect_fail(
        verify::check_notch_progression_on("control", &tri, std::slice::from_ref(&broken)).unwrap(),
        &tri,
        &cube3,
    )?;
    let doubled = fixtures::doubled(&ls[0]).unwrap();
    expect_fail(verify::check_size_accounting_on("control", &tri, &cube3, &doubled).unwrap(), &tri, &cube3)?;
    Ok(done)
}

fn c10() -> Result<String, String> {
    let mut rng = seeded_rng(10);
    for n in 1..=12 {
        for _ in 0..4 {
            let size = rng.gen_range(1..=14);
            let phi = Formula::new(n, random_tree(n, size, &mut rng)).unwrap();
            let red = phi.reduce();
            ensure(red.is_reduced() && red.size() == phi.size(), || format!("reduce changed size of {phi}"))?;
            for x in PointSet01::cube_points(n) {
                ensure(red.evaluate(&x) == phi.evaluate(&x), || format!("reduce changed {phi} at {x:?}"))?;
            }
        }
    }
    for i in 0..200 {
        let n = rng.gen_range(1..=5);
        let pts: Vec<Vec<bool>> = PointSet01::cube_points(n).filter(|_| rng.gen_bool(0.4)).collect();
        let pts = if pts.is_empty() { vec![vec![true; n]] } else { pts };
        let s = PointSet01::new(n, pts).unwrap();
        let f = facets_of_points(&s).unwrap();
        let v = vertices_of_hrep(&f).unwrap();
        let mut expect: Vec<Vec<Rational>> = s.points().iter().map(|p| to_rational(p)).collect();
        expect.sort();
        ensure(v.rays.is_empty() && v.vertices == expect, || format!("DD roundtrip {i} on {s}"))?;
    }
    // extra LP battery on random lifts
    for _ in 0..30 {
        let n = rng.gen_range(2..=4);
        let size = rng.gen_range(1..=7);
        let phi = random_reduced(n, size, 0.3, &mut rng);
        let l = iterate_lift_with(&phi, &ExtendedFormulation::cube(n), 2, LiftOptions::default())
            .unwrap()
            .0;
        if l.is_empty_marker() {
            continue;
        }
        for _ in 0..3 {
            let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-4..=4))).collect();
            opt(&l, &c, if rng.gen_bool(0.5) { Sense::Min } else { Sense::Max });
        }
    }
    let controls = negative_controls()?;
    let solved = LPS_SOLVED.load(Ordering::Relaxed);
    let bad = LPS_BAD.load(Ordering::Relaxed);
    ensure(bad == 0, || format!("{bad} of {solved} LP optima failed exact duality"))?;
    Ok(format!(
        "reduce exact for n<=12; 200 DD roundtrips; {solved} LP optima with exact duality; {controls} negative controls fail with re-verified certificates"
    ))
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    type Criterion = (usize, &'static str, fn() -> Result<String, String>);
    let criteria: [Criterion; 10] = [
        (1, "weight-two covering, n=5, one and two rounds", c1),
        (2, "completeness for all 255 sets in 3 dims", c2),
        (3, "integrality of one round", c3),
        (4, "pitch chain", c4),
        (5, "notch chain", c5),
        (6, "K4 matching", c6),
        (7, "measures", c7),
        (8, "size accounting", c8),
        (9, "threshold and bounded covering formulas", c9),
        (10, "infrastructure properties", c10),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {id} PASS [{title}] {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL [{title}] {detail} ({secs:.1}s)");
            }
        }
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
