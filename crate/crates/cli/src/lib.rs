//! The `besat` command line: argument types, subcommands and exit codes.

pub mod cache;
pub mod report;

use std::fmt;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use besat::automaton::{solve, DecideError, DecideOptions, SolveOptions, Verdict};
use besat::formula::{parse, Formula, Signature};
use besat::gen::{gen_be_formula, gen_formula, gen_structure, GenConfig};
use besat::normalize::{normalize_with, NormalizeOptions};
use besat::semantics::{evaluate, oracle_sat, Interval, IntervalStructure};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cache::Cache;
use report::{Bundle, FuzzReport, OracleReport, RunReport};

pub mod exit {
    pub const SAT: u8 = 0;
    pub const UNSAT: u8 = 1;
    pub const INCONCLUSIVE: u8 = 2;
    /// Bad arguments, or an input that does not parse.
    pub const USAGE: u8 = 64;
    /// The input file does not exist or cannot be opened.
    pub const NO_INPUT: u8 = 66;
    /// A certificate failed its check, or an internal invariant broke.
    pub const SOFTWARE: u8 = 70;
    /// Reading or writing failed.
    pub const IO: u8 = 74;
}

#[derive(Debug, Parser)]
#[command(
    name = "besat",
    version,
    about = "Satisfiability of BE formulas over homogeneous interval structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide satisfiability. Exit 0 sat, 1 unsat, 2 inconclusive.
    Check(CheckArgs),
    /// Print the shallow normal form and the rewriting trace.
    Normalize(NormalizeArgs),
    /// Evaluate a formula on an interval of a structure. Exit 0 true, 1 false.
    Eval(EvalArgs),
    /// Search all structures up to a size. Exit 0 found, 1 none.
    Oracle(OracleArgs),
    /// Cross-check the solver against brute force on generated formulas.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
pub struct Input {
    /// File holding the formula, `-` for stdin.
    #[arg(
        value_name = "FILE",
        required_unless_present = "expr",
        conflicts_with = "expr"
    )]
    pub file: Option<PathBuf>,
    /// The formula itself.
    #[arg(short = 'e', long)]
    pub expr: Option<String>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = 500_000)]
    pub max_states: usize,
    #[arg(long)]
    pub timeout_sec: Option<f64>,
    /// Use this value of m for every fresh block. Not sound.
    #[arg(long)]
    pub unsound_m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long)]
    pub json: bool,
    /// Use this value of m for every fresh block. Not sound.
    #[arg(long)]
    pub unsound_m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: Input,
    /// Structure JSON: `{"points": [["p"], []]}`.
    #[arg(short, long)]
    pub structure: PathBuf,
    /// `lo,hi`; the whole domain by default.
    #[arg(short, long)]
    pub interval: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = 4)]
    pub max_points: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: u64,
    #[arg(long, default_value_t = 4)]
    pub max_points: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_states: usize,
    #[arg(long, default_value_t = 2.0)]
    pub timeout_sec: f64,
    /// Write one JSON file per disagreement here.
    #[arg(long)]
    pub artifacts: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<DecideError> for Failure {
    fn from(e: DecideError) -> Self {
        Failure::new(exit::SOFTWARE, e.to_string())
    }
}

fn io_failure(what: &Path, e: io::Error) -> Failure {
    let code = match e.kind() {
        io::ErrorKind::NotFound | io::ErrorKind::PermissionDenied => exit::NO_INPUT,
        _ => exit::IO,
    };
    Failure::new(code, format!("{}: {e}", what.display()))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| io_failure(path, e))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn read_formula(input: &Input) -> Result<Formula, Failure> {
    let (text, origin) = match (&input.expr, &input.file) {
        (Some(e), _) => (e.clone(), "<expr>".to_string()),
        (None, Some(p)) => (read_text(p)?, p.display().to_string()),
        (None, None) => return Err(Failure::new(exit::USAGE, "no formula given")),
    };
    parse(&text).map_err(|e| Failure::new(exit::USAGE, format!("{origin}: {e}")))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    writeln!(out, "{text}").map_err(|e| Failure::new(exit::IO, format!("stdout: {e}")))
}

fn emit_json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<(), Failure> {
    let text =
        serde_json::to_string_pretty(v).map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
    emit(out, &text)
}

fn print_points(out: &mut dyn Write, points: &[Vec<String>]) -> Result<(), Failure> {
    for (i, p) in points.iter().enumerate() {
        emit(out, &format!("  {i}: {{{}}}", p.join(", ")))?;
    }
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    match cli.command {
        Command::Check(a) => check(&a, out),
        Command::Normalize(a) => cmd_normalize(&a, out),
        Command::Eval(a) => eval(&a, out),
        Command::Oracle(a) => oracle(&a, out),
        Command::Fuzz(a) => fuzz(&a, out),
    }
}

fn verdict_code(verdict: &str) -> u8 {
    match verdict {
        "sat" => exit::SAT,
        "unsat" => exit::UNSAT,
        _ => exit::INCONCLUSIVE,
    }
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let started = Instant::now();
    let f = read_formula(&a.input)?;
    if let Some(l) = f.letters().iter().find(|l| l.contains('#')) {
        return Err(Failure::new(
            exit::USAGE,
            format!("letter {l} uses `#`, which is reserved for generated letters"),
        ));
    }
    let cache = Cache::from_env();
    let key = Cache::key(&f, Some(a.max_states), a.unsound_m);
    let cached = cache.as_ref().and_then(|c| c.load(&key, &f));
    let report = match cached {
        Some(mut r) => {
            r.cached = true;
            r.wall_ms = started.elapsed().as_secs_f64() * 1e3;
            r
        }
        None => {
            let opts = SolveOptions {
                decide: DecideOptions {
                    max_states: Some(a.max_states),
                    timeout: a.timeout_sec.map(Duration::from_secs_f64),
                    ..Default::default()
                },
                normalize: NormalizeOptions {
                    unsound_m: a.unsound_m,
                },
                signature: None,
            };
            let s = solve(&f, &opts)?;
            if let Verdict::Sat(c) = &s.decision.verdict {
                if !c.verified {
                    return Err(Failure::new(exit::SOFTWARE, "witness was not verified"));
                }
            }
            let r = RunReport::new(&f, &s, a.unsound_m, started.elapsed().as_secs_f64() * 1e3);
            if let Some(c) = &cache {
                if let Err(e) = c.store(&key, &r) {
                    eprintln!("besat: cache not written: {e}");
                }
            }
            r
        }
    };
    if a.json {
        emit_json(out, &report)?;
    } else {
        if let Some(m) = report.unsound_mode {
            emit(out, &format!("unsound-mode: m = {m}"))?;
        }
        match &report.reason {
            Some(why) => emit(out, &format!("{}: {why}", report.verdict))?,
            None => emit(out, &report.verdict)?,
        }
        if let Some(w) = &report.witness {
            print_points(out, &w.points)?;
        }
    }
    Ok(verdict_code(&report.verdict))
}

fn cmd_normalize(a: &NormalizeArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let f = read_formula(&a.input)?;
    let hnf = f.to_homogeneous_nf();
    let sig = Signature::new(f.letters().iter().map(|l| l.as_ref()))
        .map_err(|e| Failure::new(exit::USAGE, e.to_string()))?;
    let opts = NormalizeOptions {
        unsound_m: a.unsound_m,
    };
    let (pair, trace) =
        normalize_with(&hnf, sig, opts).map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
    if !pair.is_shallow() {
        return Err(Failure::new(
            exit::SOFTWARE,
            format!(
                "output not shallow: depths {} and {}",
                pair.psi.depth(),
                pair.xi.depth()
            ),
        ));
    }
    if a.json {
        let mut v = trace.to_json();
        v["star"] = pair.as_formula().to_string().into();
        emit_json(out, &v)?;
    } else {
        if let Some(m) = a.unsound_m {
            emit(out, &format!("unsound-mode: m = {m}"))?;
        }
        emit(out, &format!("psi: {}", pair.psi))?;
        emit(out, &format!("xi: {}", pair.xi))?;
        emit(out, &format!("star: {}", pair.as_formula()))?;
        emit(out, &format!("steps: {}", trace.steps.len()))?;
        for s in &trace.steps {
            emit(out, &format!("  {}: {} m={}", s.step, s.redex(), s.block.m))?;
        }
    }
    Ok(0)
}

fn parse_interval(text: &str) -> Result<Interval, Failure> {
    let bad = || Failure::new(exit::USAGE, format!("interval {text:?} is not `lo,hi`"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(Interval::new(lo, hi))
}

fn eval(a: &EvalArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let f = read_formula(&a.input)?;
    let sig = Signature::new(f.letters().iter().map(|l| l.as_ref()))
        .map_err(|e| Failure::new(exit::USAGE, e.to_string()))?;
    let text = read_text(&a.structure)?;
    let s = IntervalStructure::from_json(&text, &sig)
        .map_err(|e| Failure::new(exit::USAGE, format!("{}: {e}", a.structure.display())))?;
    let i = match &a.interval {
        Some(t) => parse_interval(t)?,
        None => s.top(),
    };
    let value = evaluate(&s, i, &f).map_err(|e| Failure::new(exit::USAGE, e.to_string()))?;
    if a.json {
        emit_json(out, &serde_json::json!({ "interval": i, "value": value }))?;
    } else {
        emit(out, &value.to_string())?;
    }
    Ok(if value { 0 } else { 1 })
}

fn oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let f = read_formula(&a.input)?;
    if f.letters().len() >= 20 {
        return Err(Failure::new(
            exit::USAGE,
            "too many letters for brute force",
        ));
    }
    let found = oracle_sat(&f, a.max_points);
    let report = OracleReport {
        input: f.to_string(),
        max_points: a.max_points,
        found: found.is_some(),
        points: found.as_ref().map(|(s, _)| s.point_names()),
        interval: found.as_ref().map(|(_, i)| *i),
    };
    if a.json {
        emit_json(out, &report)?;
    } else {
        match (&report.points, report.interval) {
            (Some(p), Some(i)) => {
                emit(
                    out,
                    &format!("model with {} points, interval {i:?}", p.len()),
                )?;
                print_points(out, p)?;
            }
            _ => emit(
                out,
                &format!("no model with at most {} points", a.max_points),
            )?,
        }
    }
    Ok(if report.found { 0 } else { 1 })
}

/// Runs one fuzz case and returns what disagreed, if anything.
fn fuzz_case(
    cfg: &GenConfig,
    i: u64,
    opts: &SolveOptions,
    report: &mut FuzzReport,
) -> Result<Vec<Bundle>, Failure> {
    let mut found = Vec::new();
    let f = gen_formula(cfg, i);
    let oracle = oracle_sat(&f, cfg.max_points);
    let bundle = |kind: &str, expected: String, found: String| Bundle {
        index: i,
        kind: kind.to_string(),
        formula: f.to_string(),
        structure: oracle.as_ref().map(|(s, _)| s.point_names()),
        interval: oracle.as_ref().map(|(_, i)| *i),
        expected,
        found,
    };
    match solve(&f, opts) {
        Ok(s) => match s.decision.verdict {
            Verdict::Sat(c) if c.verified => report.sat += 1,
            Verdict::Sat(_) => found.push(bundle(
                "unverified",
                "verified witness".into(),
                "sat".into(),
            )),
            Verdict::Unsat => {
                report.unsat += 1;
                if oracle.is_some() {
                    found.push(bundle("unsat-vs-oracle", "sat".into(), "unsat".into()));
                }
            }
            Verdict::Inconclusive(_) => report.inconclusive += 1,
        },
        Err(DecideError::Certificate(why)) => {
            found.push(bundle("certificate", "valid witness".into(), why))
        }
        Err(e) => return Err(e.into()),
    }

    // Homogeneous normal form on a bare-letter formula and a random structure.
    let g = gen_be_formula(cfg, i);
    let h = g.to_homogeneous_nf();
    let s = gen_structure(cfg, i);
    let s = s.project(Arc::new(widen(s.signature(), &g)));
    for iv in s.intervals() {
        let a = evaluate(&s, iv, &g).map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
        let b = evaluate(&s, iv, &h).map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
        if a != b {
            found.push(Bundle {
                index: i,
                kind: "hnf".into(),
                formula: g.to_string(),
                structure: Some(s.point_names()),
                interval: Some(iv),
                expected: a.to_string(),
                found: b.to_string(),
            });
            break;
        }
    }
    Ok(found)
}

fn widen(sig: &Signature, f: &Formula) -> Signature {
    let mut sig = sig.clone();
    for l in f.letters() {
        sig.ensure(&l).expect("letters of a formula are valid");
    }
    sig
}

fn fuzz(a: &FuzzArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let started = Instant::now();
    let cfg = GenConfig {
        seed: a.seed,
        max_points: a.max_points,
        ..Default::default()
    };
    let opts = SolveOptions {
        decide: DecideOptions {
            max_states: Some(a.max_states),
            timeout: Some(Duration::from_secs_f64(a.timeout_sec)),
            ..Default::default()
        },
        ..Default::default()
    };
    let mut report = FuzzReport {
        seed: a.seed,
        count: a.count,
        max_points: a.max_points,
        ..Default::default()
    };
    for i in 0..a.count {
        let bundles = fuzz_case(&cfg, i, &opts, &mut report)?;
        report.disagreements.extend(bundles);
    }
    report.wall_ms = started.elapsed().as_secs_f64() * 1e3;
    if let Some(dir) = &a.artifacts {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        for (n, b) in report.disagreements.iter().enumerate() {
            let path = dir.join(format!("{}-{n}-{}.json", b.index, b.kind));
            let text = serde_json::to_vec_pretty(b)
                .map_err(|e| Failure::new(exit::SOFTWARE, e.to_string()))?;
            std::fs::write(&path, text)
                .map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))?;
        }
    }
    if a.json {
        emit_json(out, &report)?;
    } else {
        emit(
            out,
            &format!(
                "{} formulas: {} sat, {} unsat, {} inconclusive, {} disagreements",
                a.count,
                report.sat,
                report.unsat,
                report.inconclusive,
                report.disagreements.len()
            ),
        )?;
        for b in &report.disagreements {
            emit(
                out,
                &format!(
                    "  #{} {}: {} expected {} found {}",
                    b.index, b.kind, b.formula, b.expected, b.found
                ),
            )?;
        }
    }
    Ok(if report.disagreements.is_empty() {
        0
    } else {
        1
    })
}
