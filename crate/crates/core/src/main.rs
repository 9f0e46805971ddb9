use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};

use formula_lift::formula::random_reduced;
use formula_lift::instances::{self, seeded_rng, Instance, DEFAULT_DELTA};
use formula_lift::lp::{self, LpStatus, Sense};
use formula_lift::measures::{
    notch_of, notch_of_set, parse_inequality, pitch_of, to_standard_form, verify_closure, ClosureMode,
    ClosureQuery, Standardized,
};
use formula_lift::polytope::{iterate_lift_with, LiftOptions};
use formula_lift::rational::{fmt_rational, fmt_vec, parse_vec};
use formula_lift::verify::{self, CheckReport};
use formula_lift::{Error, ExtendedFormulation, Formula};

#[derive(Parser)]
#[command(name = "formula-lift", version, about = "Lift 0/1 relaxations along Boolean formulas, exactly")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FormulaArg {
    /// File holding one formula, e.g. `(x1 | x2) & !x3`.
    #[arg(long)]
    formula: PathBuf,
    /// Number of variables; inferred from the largest index when absent.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print its canonical text and statistics.
    Parse(FormulaArg),
    /// Push negations to the literals.
    Reduce {
        #[command(flatten)]
        f: FormulaArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the formula to a relaxation, `--rounds` times.
    Lift {
        #[command(flatten)]
        f: FormulaArg,
        /// `cube` or an EF file.
        #[arg(long, default_value = "cube")]
        polytope: String,
        #[arg(long, default_value_t = 1)]
        rounds: usize,
        /// Output EF file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Build pure ∧-subtrees node by node instead of as single faces.
        #[arg(long)]
        no_collapse: bool,
    },
    /// Minimize or maximize a linear objective over an EF.
    Optimize {
        #[arg(long)]
        ef: PathBuf,
        #[arg(long, conflicts_with = "max")]
        min: bool,
        #[arg(long)]
        max: bool,
        /// Comma separated rationals, one per x coordinate.
        #[arg(long, allow_hyphen_values = true)]
        obj: String,
        /// Also print an optimal point.
        #[arg(long)]
        witness: bool,
    },
    /// Decide whether a point lies in the projection of an EF.
    Member {
        #[arg(long)]
        ef: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Pitch and notch of a linear inequality.
    Measure {
        /// e.g. `x1 + x5 >= 1`
        #[arg(long, allow_hyphen_values = true)]
        ineq: String,
        #[arg(long)]
        n: usize,
    },
    /// Notch of the set defined by a formula.
    Notchset(FormulaArg),
    /// Search for a valid bounded-pitch or bounded-notch inequality the relaxation violates.
    Closure {
        #[command(flatten)]
        f: FormulaArg,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        level: usize,
        /// Relaxation `φ^rounds([0,1]^n)`; defaults to `--level`.
        #[arg(long, conflicts_with = "ef")]
        rounds: Option<usize>,
        /// Relaxation read from a file instead.
        #[arg(long)]
        ef: Option<PathBuf>,
    },
    /// Write an instance bundle (formula, reference inequalities, manifest).
    Gen {
        #[command(subcommand)]
        which: GenCmd,
    },
    /// Run one of the checks and print one report line per instance.
    Verify {
        #[command(subcommand)]
        which: VerifyCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Pitch,
    Notch,
}

#[derive(Args)]
struct GenOut {
    /// Directory the bundle is written to.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum GenCmd {
    /// `Σ_{i≠j} x_i ≥ 1` for every `j`.
    Bz {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        out: GenOut,
    },
    /// Covering CNF of a 0/1 matrix, from a file or random.
    Covering {
        /// Whitespace separated 0/1 rows.
        #[arg(long, conflicts_with = "random")]
        matrix: Option<PathBuf>,
        /// Random matrix with this many rows.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenOut,
    },
    /// `Ax ≥ b` with nonnegative integers through threshold formulas.
    Bounded {
        /// Whitespace separated rows of nonnegative integers.
        #[arg(long, conflicts_with = "random", requires = "rhs")]
        matrix: Option<PathBuf>,
        #[arg(long)]
        rhs: Option<String>,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: GenOut,
    },
    /// Perfect matchings of K4.
    #[command(name = "matching-k4")]
    MatchingK4 {
        #[command(flatten)]
        out: GenOut,
    },
}

#[derive(Args, Clone)]
struct VerifyArgs {
    /// Formula files; repeatable.
    #[arg(long)]
    formula: Vec<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Add this many seeded random reduced formulas.
    #[arg(long, default_value_t = 0)]
    random: usize,
    /// Literal count of the random formulas.
    #[arg(long, default_value_t = 6)]
    size: usize,
    /// Negation probability of the random formulas.
    #[arg(long, default_value_t = 0.0)]
    neg: f64,
    /// `cube` or an EF file (sandwich, integral, size).
    #[arg(long, default_value = "cube")]
    polytope: String,
    /// Rounds: `k_max` for complete and pitch, `ν_max` for notch, lifts for size.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Checks run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also write the reports as JSON lines.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// conv(S ∩ Q) ⊆ φ(Q) ⊆ Q, sampled by support functions
    Sandwich(VerifyArgs),
    /// φ^k([0,1]^n) reaches conv(S) by round n, with the first round of equality
    Complete(VerifyArgs),
    /// The 0/1 points of φ(Q) are exactly those of Q satisfying φ
    Integral(VerifyArgs),
    /// φ^k([0,1]^n) satisfies every valid inequality of pitch ≤ k
    Pitch(VerifyArgs),
    /// φ^ν([0,1]^n) satisfies every valid inequality of notch ≤ ν
    Notch(VerifyArgs),
    /// Row counts against the constructive bound
    Size(VerifyArgs),
}

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn formula_text(path: &Path) -> Result<String, Failure> {
    let text = read(path)?;
    Ok(text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n"))
}

fn load_formula(path: &Path, n: Option<usize>) -> Result<Formula, Failure> {
    let text = formula_text(path)?;
    let f = match n {
        Some(n) => Formula::parse(&text, n),
        None => Formula::parse_infer(&text),
    };
    f.map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_ef(path: &Path) -> Result<ExtendedFormulation, Failure> {
    ExtendedFormulation::parse_text(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_polytope(arg: &str, n: usize) -> Result<ExtendedFormulation, Failure> {
    let q = if arg == "cube" {
        ExtendedFormulation::cube(n)
    } else {
        load_ef(Path::new(arg))?
    };
    if q.xdim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: q.xdim(),
        }
        .into());
    }
    Ok(q)
}

fn instance_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "formula".to_string(), |s| s.to_string_lossy().into_owned())
}

fn reduced(f: Formula) -> Formula {
    if f.is_reduced() {
        f
    } else {
        f.reduce()
    }
}

fn read_matrix<T: std::str::FromStr>(path: &Path) -> Result<Vec<Vec<T>>, Failure> {
    read(path)?
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse().map_err(|_| Failure(format!("{}: bad entry {t:?}", path.display()))))
                .collect()
        })
        .collect()
}

fn write_bundle(inst: &Instance, dir: &Path) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
    for (name, content) in inst.bundle() {
        let path = dir.join(&name);
        write(&path, &content)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(which: GenCmd) -> Outcome {
    match which {
        GenCmd::Bz { n, out } => write_bundle(&instances::gen_bz(n)?, &out.out),
        GenCmd::Covering {
            matrix,
            random,
            n,
            density,
            seed,
            out,
        } => {
            let a: Vec<Vec<u8>> = match (matrix, random) {
                (Some(path), _) => read_matrix(&path)?,
                (None, Some(m)) => instances::random_covering_matrix(m, n, density, &mut seeded_rng(seed)),
                (None, None) => return Err(Failure("give --matrix or --random".into())),
            };
            write_bundle(&instances::gen_covering(&a)?, &out.out)
        }
        GenCmd::Bounded {
            matrix,
            rhs,
            random,
            n,
            delta,
            seed,
            out,
        } => {
            let (a, b): (Vec<Vec<u32>>, Vec<u32>) = match (matrix, random) {
                (Some(path), _) => {
                    let rhs = rhs.unwrap_or_default();
                    let b = rhs
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| Failure(format!("bad rhs entry {t:?}"))))
                        .collect::<Result<_, _>>()?;
                    (read_matrix(&path)?, b)
                }
                (None, Some(m)) => instances::random_bounded_system(m, n, delta, &mut seeded_rng(seed)),
                (None, None) => return Err(Failure("give --matrix with --rhs, or --random".into())),
            };
            write_bundle(&instances::gen_bounded_covering(&a, &b, delta)?, &out.out)
        }
        GenCmd::MatchingK4 { out } => write_bundle(&instances::gen_matching_k4()?, &out.out),
    }
}

type Job = (String, Formula);

fn jobs_of(args: &VerifyArgs) -> Result<Vec<Job>, Failure> {
    let mut jobs = Vec::new();
    for path in &args.formula {
        jobs.push((instance_name(path), reduced(load_formula(path, args.n)?)));
    }
    if args.random > 0 {
        let n = args
            .n
            .ok_or_else(|| Failure("--random needs --n".into()))?;
        if n == 0 || args.size == 0 || !(0.0..=1.0).contains(&args.neg) {
            return Err(Failure("--random needs n >= 1, size >= 1 and 0 <= neg <= 1".into()));
        }
        let mut rng = seeded_rng(args.seed);
        for i in 0..args.random {
            let f = random_reduced(n, args.size, args.neg, &mut rng);
            jobs.push((format!("random-s{}-{i}", args.seed), f));
        }
    }
    if jobs.is_empty() {
        return Err(Failure("no instances: give --formula or --random".into()));
    }
    Ok(jobs)
}

/// Runs `run` on every job with at most `workers` threads; results keep job order.
fn run_jobs<T: Send>(
    jobs: &[Job],
    workers: usize,
    run: impl Fn(usize, &str, &Formula) -> formula_lift::Result<T> + Sync,
) -> Vec<formula_lift::Result<T>> {
    let slots: Vec<Mutex<Option<formula_lift::Result<T>>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((name, f)) = jobs.get(i) else { break };
                *slots[i].lock().unwrap() = Some(run(i, name, f));
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every job ran"))
        .collect()
}

fn verify_cmd(which: VerifyCmd) -> Outcome {
    let (kind, args) = match which {
        VerifyCmd::Sandwich(a) => ("sandwich", a),
        VerifyCmd::Complete(a) => ("complete", a),
        VerifyCmd::Integral(a) => ("integral", a),
        VerifyCmd::Pitch(a) => ("pitch", a),
        VerifyCmd::Notch(a) => ("notch", a),
        VerifyCmd::Size(a) => ("size", a),
    };
    let jobs = jobs_of(&args)?;
    let mut polytopes = Vec::with_capacity(jobs.len());
    for (_, f) in &jobs {
        polytopes.push(load_polytope(&args.polytope, f.n())?);
    }
    let results = run_jobs(&jobs, args.jobs, |i, name, f| {
        let q = &polytopes[i];
        match kind {
            "sandwich" => verify::check_sandwich(name, f, q, args.seed),
            "complete" => verify::check_completeness(name, f, args.rounds.unwrap_or(f.n())),
            "integral" => verify::check_integrality(name, f, q),
            "pitch" => verify::check_pitch_progression(name, f, args.rounds.unwrap_or(2)),
            "notch" => verify::check_notch_progression(name, f, args.rounds.unwrap_or(2)),
            _ => verify::check_size_accounting(name, f, q, args.rounds.unwrap_or(1)),
        }
    });
    let mut reports: Vec<CheckReport> = Vec::with_capacity(results.len());
    for (r, (name, _)) in results.into_iter().zip(&jobs) {
        reports.push(r.map_err(|e| Failure(format!("{name}: {e}")))?);
    }
    for r in &reports {
        println!("{}", r.line());
    }
    if let Some(path) = &args.json {
        let text: String = reports.iter().map(|r| r.to_json() + "\n").collect();
        write(path, &text)?;
    }
    Ok(if reports.iter().all(CheckReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Parse(f) => {
            let phi = load_formula(&f.formula, f.n)?;
            println!("{phi}");
            println!(
                "n={} size={} and={} or={} reduced={} monotone={}",
                phi.n(),
                phi.size(),
                phi.and_count(),
                phi.or_count(),
                phi.is_reduced(),
                phi.is_monotone()
            );
        }
        Cmd::Reduce { f, out } => {
            let phi = load_formula(&f.formula, f.n)?.reduce();
            match out {
                Some(path) => write(&path, &format!("{phi}\n"))?,
                None => println!("{phi}"),
            }
        }
        Cmd::Lift {
            f,
            polytope,
            rounds,
            out,
            no_collapse,
        } => {
            let phi = load_formula(&f.formula, f.n)?;
            if !phi.is_reduced() {
                return Err(Error::NotReduced.into());
            }
            let q = load_polytope(&polytope, phi.n())?;
            let opts = LiftOptions {
                collapse: !no_collapse,
                ..LiftOptions::default()
            };
            let (ef, reports) = iterate_lift_with(&phi, &q, rounds, opts)?;
            for (i, r) in reports.iter().enumerate() {
                eprintln!(
                    "round={} rows_in={} rows_out={} bound={} tau={} lp_calls={}",
                    i + 1,
                    r.rows_in,
                    r.rows_out,
                    r.constructive_bound(),
                    r.tau,
                    r.lp_calls
                );
            }
            match out {
                Some(path) => write(&path, &ef.to_text())?,
                None => print!("{}", ef.to_text()),
            }
        }
        Cmd::Optimize {
            ef,
            min,
            max,
            obj,
            witness,
        } => {
            if min == max {
                return Err(Failure("give exactly one of --min and --max".into()));
            }
            let ef = load_ef(&ef)?;
            let c = parse_vec(&obj)?;
            let sense = if min { Sense::Min } else { Sense::Max };
            match lp::optimize(&ef, &c, sense) {
                Ok(out) if out.status == LpStatus::Optimal => {
                    println!("{}", fmt_rational(out.value.as_ref().expect("optimal value")));
                    if witness {
                        println!("x={}", fmt_vec(out.x.as_ref().expect("optimal point")));
                    }
                }
                Ok(_) | Err(Error::EmptyInput) => println!("infeasible"),
                Err(Error::Unbounded) => println!("unbounded"),
                Err(e) => return Err(e.into()),
            }
        }
        Cmd::Member { ef, point } => {
            let ef = load_ef(&ef)?;
            let x = parse_vec(&point)?;
            println!("member={}", lp::contains_point(&ef, &x)?);
        }
        Cmd::Measure { ineq, n } => {
            let (a, beta) = parse_inequality(&ineq, n)?;
            match to_standard_form(&a, &beta) {
                Standardized::Trivial => println!("trivial"),
                Standardized::Standard(q) => {
                    let pitch = if q.is_monotone() {
                        pitch_of(&q)?.to_string()
                    } else {
                        "none".to_string()
                    };
                    println!("pitch={pitch} notch={}", notch_of(&q)?);
                }
            }
        }
        Cmd::Notchset(f) => {
            let s = load_formula(&f.formula, f.n)?.enumerate_set()?;
            println!("notch={} points={}", notch_of_set(&s)?, s.len());
        }
        Cmd::Closure {
            f,
            mode,
            level,
            rounds,
            ef,
        } => {
            let phi = reduced(load_formula(&f.formula, f.n)?);
            let s = phi.enumerate_set()?;
            let relaxation = match ef {
                Some(path) => load_ef(&path)?,
                None => {
                    let q = ExtendedFormulation::cube(phi.n());
                    iterate_lift_with(&phi, &q, rounds.unwrap_or(level), LiftOptions::default())?.0
                }
            };
            let mode = match mode {
                Mode::Pitch => ClosureMode::Pitch,
                Mode::Notch => ClosureMode::Notch,
            };
            let report = verify_closure(&ClosureQuery {
                mode,
                level,
                target: &s,
                relaxation: &relaxation,
            })?;
            let head = format!(
                "level={level} patterns={} inequalities={} lp_calls={}",
                report.patterns.len(),
                report.inequalities,
                report.lp_calls
            );
            match report.violation {
                None => println!("{head} violation=none"),
                Some(v) => {
                    println!("{head} violation={} point={}", v.inequality, fmt_vec(&v.point));
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Cmd::Gen { which } => return gen(which),
        Cmd::Verify { which } => return verify_cmd(which),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("usage error"));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
