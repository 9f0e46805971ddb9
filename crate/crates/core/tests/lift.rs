use formula_lift::formula::random_reduced;
use formula_lift::hull::equals_hull;
use formula_lift::instances::{gen_bz, seeded_rng};
use formula_lift::lp::{optimize, Sense};
use formula_lift::polytope::{iterate_lift, lift, lift_with, LiftOptions};
use formula_lift::rational::{frac, int};
use formula_lift::verify::check_sandwich;
use formula_lift::{ExtendedFormulation, Formula, PointSet01, Rational};
use rand::Rng;

fn f(s: &str, n: usize) -> Formula {
    Formula::parse(s, n).unwrap()
}

/// All directions in `{-1,0,1}^n` plus a few seeded random integer ones.
fn directions(n: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = Vec::with_capacity(n);
        let mut m = code;
        for _ in 0..n {
            c.push(int(m as i64 % 3 - 1));
            m /= 3;
        }
        out.push(c);
    }
    let mut rng = seeded_rng(seed);
    for _ in 0..10 {
        out.push((0..n).map(|_| int(rng.gen_range(-5..=5))).collect());
    }
    out
}

fn support(ef: &ExtendedFormulation, c: &[Rational]) -> Option<Rational> {
    if ef.is_empty_marker() {
        return None;
    }
    optimize(ef, c, Sense::Max).unwrap().value
}

fn same_support(a: &ExtendedFormulation, b: &ExtendedFormulation, seed: u64) {
    for c in directions(a.xdim(), seed) {
        assert_eq!(support(a, &c), support(b, &c), "direction {c:?}");
    }
}

#[test]
fn single_literal_is_a_face() {
    let (ef, rep) = lift(&f("x2", 3), &ExtendedFormulation::cube(3)).unwrap();
    let face = PointSet01::new(3, PointSet01::cube_points(3).filter(|p| p[1]).collect()).unwrap();
    assert_eq!(equals_hull(&ef, &face).unwrap(), None);
    assert_eq!(rep.tau, 1);
}

#[test]
fn phi2_is_an_intersection_of_two_unions() {
    let phi = f("(!x1 | x2) & (x1 | x3)", 3);
    let cube = ExtendedFormulation::cube(3);
    let (ef, _) = lift(&phi, &cube).unwrap();
    let left = cube
        .face_restrict(0, false)
        .unwrap()
        .balas_union(&cube.face_restrict(1, true).unwrap())
        .unwrap();
    let right = cube
        .face_restrict(0, true)
        .unwrap()
        .balas_union(&cube.face_restrict(2, true).unwrap())
        .unwrap();
    same_support(&ef, &left.intersect(&right).unwrap(), 1);
    assert!(ef.ef_rows() <= 38);
}

#[test]
fn contradiction_gives_empty_marker() {
    let (ef, _) = lift(&f("x1 & !x1", 1), &ExtendedFormulation::cube(1)).unwrap();
    assert!(ef.is_empty_marker());
    let (ef, _) = lift(&f("x1 & !x1 | x2", 2), &ExtendedFormulation::cube(2)).unwrap();
    assert!(!ef.is_empty_marker());
}

#[test]
fn non_reduced_and_dimension_errors() {
    let g = Formula::parse("!(x1 & x2)", 2).unwrap();
    assert!(lift(&g, &ExtendedFormulation::cube(2)).is_err());
    assert!(lift(&f("x1", 2), &ExtendedFormulation::cube(3)).is_err());
}

#[test]
fn zero_rounds_returns_input() {
    let q = ExtendedFormulation::cube(3);
    assert_eq!(iterate_lift(&f("x1 | x2", 3), &q, 0).unwrap(), q);
}

#[test]
fn two_rounds_reach_weight_two() {
    let inst = gen_bz(5).unwrap();
    let ones = vec![int(1); 5];
    let cube = ExtendedFormulation::cube(5);
    let l1 = iterate_lift(&inst.formula, &cube, 1).unwrap();
    assert_eq!(optimize(&l1, &ones, Sense::Min).unwrap().value, Some(frac(5, 4)));
    let l2 = iterate_lift(&inst.formula, &l1, 1).unwrap();
    let out = optimize(&l2, &ones, Sense::Min).unwrap();
    assert_eq!(out.value, Some(int(2)));
    assert!(out.verify(&l2, &ones, Sense::Min));
}

#[test]
fn random_sandwich_size_and_collapse() {
    let mut rng = seeded_rng(11);
    for i in 0..25 {
        let n = rng.gen_range(2..=4);
        let size = rng.gen_range(1..=7);
        let phi = random_reduced(n, size, 0.3, &mut rng);
        let cube = ExtendedFormulation::cube(n);
        let r = check_sandwich("r", &phi, &cube, i).unwrap();
        assert!(r.passed(), "{phi}: {}", r.line());

        let (on, rep) = lift(&phi, &cube).unwrap();
        assert!(rep.rows_out <= rep.constructive_bound(), "{phi}");
        let off_opts = LiftOptions {
            collapse: false,
            ..LiftOptions::default()
        };
        let (off, rep_off) = lift_with(&phi, &cube, off_opts).unwrap();
        assert!(rep_off.rows_out <= rep_off.constructive_bound(), "{phi}");
        assert_eq!(on.is_empty_marker(), off.is_empty_marker(), "{phi}");
        if !on.is_empty_marker() {
            same_support(&on, &off, i);
        }
    }
}

#[test]
fn monotone_in_the_relaxation() {
    let cube = ExtendedFormulation::cube(3);
    let q = ExtendedFormulation::from_hrep(3, &[(vec![int(1), int(1), int(1)], int(1))]).unwrap();
    let phi = f("(x1 | x2) & (x2 | !x3)", 3);
    let (small, _) = lift(&phi, &q).unwrap();
    let (big, _) = lift(&phi, &cube).unwrap();
    for c in directions(3, 5) {
        assert!(support(&small, &c) <= support(&big, &c));
    }
}

#[test]
fn text_roundtrip_keeps_optima() {
    let phi = f("(x1 | x2 & !x3) & (x3 | x4)", 4);
    let l2 = iterate_lift(&phi, &ExtendedFormulation::cube(4), 2).unwrap();
    let back = ExtendedFormulation::parse_text(&l2.to_text()).unwrap();
    assert_eq!(back, l2);
    for c in directions(4, 3).into_iter().step_by(7) {
        assert_eq!(support(&back, &c), support(&l2, &c));
    }
}

#[test]
fn user_hrep_without_opposite_pairs_respects_bound() {
    // simplex x ≥ 0, Σx ≤ 1 with no upper bound rows
    let rows = vec![
        vec![(0, int(1))],
        vec![(1, int(1))],
        vec![(0, int(-1)), (1, int(-1))],
    ];
    let q = ExtendedFormulation::from_parts(
        2,
        2,
        rows.into_iter().zip([int(0), int(0), int(-1)]).collect(),
        vec![vec![(0, int(1))], vec![(1, int(1))]],
        vec![int(0), int(0)],
    )
    .unwrap();
    let (ef, rep) = lift(&f("x1 | x2", 2), &q).unwrap();
    assert!(rep.rows_out <= rep.constructive_bound());
    assert_eq!(optimize(&ef, &[int(1), int(1)], Sense::Min).unwrap().value, Some(int(1)));
}
