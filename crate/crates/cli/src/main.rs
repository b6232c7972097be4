//! `cuspidal`: Ford domains, good approximations and Hurwitz constants from
//! the command line.

mod check;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cuspidal::approx::{good_sequence_prefix, RunStatus, Xi};
use cuspidal::ford::{build_complex, spheres_near};
use cuspidal::group::{enumerate_by_c, GroupSpec};
use cuspidal::hurwitz::hurwitz_estimate;
use cuspidal::torus::{
    fn_reduce, grid_rows, h2, hurwitz_k, monotonicity, pentagon, torus_oracle, FnPoint,
};
use cuspidal::{Error, Exec, QuadRat, RingSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use config::{Command, Emit, RunConfig};

#[derive(Parser)]
#[command(name = "cuspidal", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the artifact to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized commands (`check`, `approx --xi random`).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Double-coset representatives of Γ_∞\Γ/Γ_∞ with |c| ≤ c_max.
    Enum {
        #[arg(long)]
        ring: u32,
        #[arg(long)]
        c_max: f64,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
    /// Ford circles and the cell structure of the cut locus.
    Ford {
        #[arg(long)]
        ring: u32,
        #[arg(long, default_value_t = 2.0)]
        c_max: f64,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
    /// Good approximating sequence of a boundary point.
    Approx {
        #[arg(long)]
        ring: u32,
        /// `a+bi`, or `random` for a seeded exact point of the fundamental cell.
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
    /// Hurwitz constant estimate from a bounded conjugacy search.
    Hurwitz {
        #[arg(long)]
        ring: u32,
        #[arg(long, default_value_t = 4.0)]
        c_max: f64,
        #[arg(long, default_value_t = 10.0)]
        trace_max: f64,
        #[arg(long, default_value_t = 6)]
        word_len: usize,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
    },
    /// Once-punctured tori in Fenchel–Nielsen coordinates.
    Torus {
        #[command(subcommand)]
        cmd: TorusCmd,
    },
    /// Redraw a saved `ford` or `approx` artifact as SVG.
    Render { path: PathBuf },
    /// Seeded randomized checks of the arithmetic and geometry.
    Check {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Subcommand)]
enum TorusCmd {
    /// Closed-form h'' and K, with the pentagon data behind them.
    H2 {
        #[arg(long)]
        ell: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Brute-force minimum over closed geodesics, against the closed form.
    Oracle {
        #[arg(long)]
        ell: f64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 8)]
        word_len: usize,
    },
    /// `n × n` samples of the reduced wedge.
    Grid {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        emit: Emit,
    },
}

enum Failure {
    Usage(String),
    Run(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnsupportedRing(_) | Error::InvalidArgument(_) | Error::Parse { .. } => {
                Failure::Usage(e.to_string())
            }
            e => Failure::Run(e),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid_argument",
        Error::UnsupportedRing(_) => "unsupported_ring",
        Error::Parse { .. } => "parse",
        Error::NotRationalLine => "not_rational_line",
        Error::NoAxis(_) => "no_axis",
        Error::IncompleteComplex { .. } => "incomplete_complex",
        Error::InconsistentBasinChain { .. } => "inconsistent_basin_chain",
        Error::DegenerateStep { .. } => "degenerate_step",
        Error::Uncertified { .. } => "uncertified",
        Error::EmptySearch => "empty_search",
        Error::RequiresCurveChange { .. } => "requires_curve_change",
        Error::OutOfLemmaDomain => "out_of_lemma_domain",
        Error::ConstructionFailure(_) => "construction_failure",
    }
}

/// Finished artifact, plus a failure to report after it is written.
struct Outcome {
    text: String,
    failure: Option<Failure>,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Outcome { text, failure: None }
    }
}

fn json_doc(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

/// CSV with the config on a leading `#` line.
fn csv_doc<T: Serialize>(cfg: &RunConfig, rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    let head = serde_json::to_string(cfg).expect("serializable");
    Ok(format!("# config: {head}\n{}", String::from_utf8(body).expect("utf-8")))
}

fn expect_emit(emit: Emit, allowed: &[Emit]) -> Result<(), Failure> {
    if allowed.contains(&emit) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--emit {emit:?} is not available here; use one of {allowed:?}").to_lowercase()))
    }
}

fn positive(name: &str, x: f64) -> Result<(), Failure> {
    if x.is_finite() && x >= 1.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be a finite number >= 1")))
    }
}

fn group(d: u32) -> Result<GroupSpec, Failure> {
    Ok(GroupSpec::new(RingSpec::new(d)?)?)
}

fn exec_for(threads: Option<usize>) -> Result<Exec, Failure> {
    match threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(1) => Ok(Exec::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new()
                .num_threads(_n)
                .build_global()
                .map_err(|e| Failure::Io(e.to_string()))?;
            Ok(Exec::Parallel)
        }
        None => Ok(Exec::Parallel),
    }
}

#[derive(Serialize)]
struct EnumRow {
    a: String,
    b: String,
    c: String,
    d: String,
    depth: f64,
    endpoint_re: f64,
    endpoint_im: f64,
}

fn run_enum(cfg: &RunConfig, exec: Exec) -> Result<Outcome, Failure> {
    let g = group(cfg.ring.unwrap_or(0))?;
    let rows: Vec<EnumRow> = enumerate_by_c(&g, cfg.c_max.unwrap_or(1.0), exec)
        .iter()
        .map(|r| {
            let z = r.endpoint().to_complex().unwrap_or(num_complex::Complex64::new(f64::NAN, f64::NAN));
            EnumRow {
                a: r.gamma.a().to_string(),
                b: r.gamma.b().to_string(),
                c: r.gamma.c().to_string(),
                d: r.gamma.d().to_string(),
                depth: r.depth(),
                endpoint_re: z.re,
                endpoint_im: z.im,
            }
        })
        .collect();
    match cfg.emit {
        Emit::Csv => Ok(csv_doc(cfg, &rows)?.into()),
        _ => Ok(json_doc(&json!({ "config": cfg, "rows": rows })).into()),
    }
}

fn run_ford(cfg: &RunConfig, exec: Exec) -> Result<Outcome, Failure> {
    let g = group(cfg.ring.unwrap_or(0))?;
    let c_max = cfg.c_max.unwrap_or(2.0);
    let fc = build_complex(&g, c_max, exec)?;
    // every Ford circle meeting a neighbourhood of the fundamental cell
    let circles: Vec<Value> = spheres_near(&g, c_max, (-0.5, 1.5), (-0.5, 1.5), 0.0, exec)
        .iter()
        .map(|s| {
            let z = s.center_complex();
            json!({ "z": s.center.to_string(), "center": [z.re, z.im], "radius": 0.5 * s.radius * s.radius })
        })
        .collect();
    let doc = json!({
        "config": cfg,
        "approximation_constant": fc.approximation_constant(),
        "circles": circles,
        "complex": fc,
    });
    match cfg.emit {
        Emit::Svg => Ok(svg::ford(&doc).map_err(Failure::Io)?.into()),
        _ => Ok(json_doc(&doc).into()),
    }
}

/// A point of the fundamental cell with 200-bit dyadic coordinates.
fn random_xi(ring: RingSpec, seed: u64) -> Xi {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let den = BigInt::from(1u8) << 200usize;
    let mut coord = || {
        let limbs: Vec<u32> = (0..200 / 32 + 1).map(|_| rng.gen()).collect();
        let num = BigInt::from_slice(num_bigint::Sign::Plus, &limbs) % &den;
        BigRational::new(num, den.clone())
    };
    let x = coord();
    let y = if ring.is_modular() { BigRational::zero() } else { coord() };
    Xi::exact(QuadRat::new(ring, x, y))
}

fn run_approx(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let g = group(cfg.ring.unwrap_or(0))?;
    let spec = cfg.xi.as_deref().unwrap_or("random");
    let xi = if spec == "random" {
        random_xi(g.ring(), cfg.seed)
    } else {
        Xi::parse(g.ring(), spec)?
    };
    let run = good_sequence_prefix(&g, &xi, cfg.steps.unwrap_or(20))?;
    let rows: Vec<Value> = run
        .steps
        .iter()
        .map(|s| {
            json!({
                "n": s.n,
                "gamma": s.gamma,
                "z": s.z.to_string(),
                "depth": s.depth,
                "dist": s.dist,
                "a": s.a.to_string(),
                "delta": s.delta,
                "crossing_t": s.crossing_t,
            })
        })
        .collect();
    let z = xi.to_complex();
    let doc = json!({
        "config": cfg,
        "xi": { "re": z.re, "im": z.im, "exact": xi.center().to_string(), "radius": xi.radius().to_f64() },
        "status": run.status,
        "branches": run.steps.iter().filter(|s| s.branch).map(|s| s.n).collect::<Vec<_>>(),
        "rows": rows,
    });
    let text = match cfg.emit {
        Emit::Svg => svg::approx(&doc).map_err(Failure::Io)?,
        _ => json_doc(&doc),
    };
    let failure = (run.status == RunStatus::Uncertified).then(|| {
        Failure::Run(Error::Uncertified {
            certified_prefix: run.steps.len(),
        })
    });
    Ok(Outcome { text, failure })
}

fn run_hurwitz(cfg: &RunConfig, exec: Exec) -> Result<Outcome, Failure> {
    let g = group(cfg.ring.unwrap_or(0))?;
    let (c_max, trace_max, word_len) = (cfg.c_max.unwrap_or(4.0), cfg.trace_max.unwrap_or(10.0), cfg.word_len.unwrap_or(6));
    let e = hurwitz_estimate(&g, c_max, trace_max, word_len, exec)?;
    let w = &e.achieving;
    let doc = json!({
        "config": cfg,
        "K": e.k_value,
        "exp_h2": e.exp_h2,
        "K_lower_evidence": e.k_lower_evidence,
        "achieving": {
            "tr": w.trace.to_string(),
            "c": w.best_witness.c().canonical_associate().0.to_string(),
            "witness": w.best_witness,
            "min_c": w.min_c,
            "max_height": w.max_height,
        },
        "certified": w.certified,
        "ring": e.params.ring,
        "c_max": c_max,
        "trace_max": trace_max,
        "word_len": word_len,
        "elements": e.elements,
        "classes_searched": e.classes_searched,
    });
    Ok(json_doc(&doc).into())
}

fn point_json(p: FnPoint) -> Value {
    json!({ "ell": p.ell, "theta": p.theta })
}

fn run_torus(cfg: &RunConfig, exec: Exec) -> Result<Outcome, Failure> {
    let mode = cfg.mode.as_deref().unwrap_or("h2");
    if mode == "grid" {
        let n = cfg.n.unwrap_or(100);
        if n == 0 {
            return Err(Failure::Usage("--n must be at least 1".into()));
        }
        let rows = grid_rows(n, exec);
        return match cfg.emit {
            Emit::Json => Ok(json_doc(&json!({ "config": cfg, "rows": rows })).into()),
            _ => Ok(csv_doc(cfg, &rows)?.into()),
        };
    }
    let input = FnPoint::new(cfg.ell.unwrap_or(f64::NAN), cfg.theta.unwrap_or(f64::NAN));
    let p = fn_reduce(input)?;
    let doc = if mode == "oracle" {
        let o = torus_oracle(p, cfg.word_len.unwrap_or(8), exec)?;
        json!({
            "config": cfg,
            "input": point_json(input),
            "reduced": point_json(p),
            "h2": h2(p),
            "K": hurwitz_k(p),
            "oracle": o,
            "oracle_K": 0.5 / o.min_height,
            "abs_error": (o.log_min_height - h2(p)).abs(),
        })
    } else {
        json!({
            "config": cfg,
            "input": point_json(input),
            "reduced": point_json(p),
            "h2": h2(p),
            "K": hurwitz_k(p),
            "pentagon": pentagon(p),
            "monotonicity": monotonicity(p, 1e-6),
        })
    };
    Ok(json_doc(&doc).into())
}

fn run_check(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let results = check::batteries(cfg.cases.unwrap_or(1000), cfg.seed);
    let failed: usize = results.iter().map(|r| r.failures).sum();
    let doc = json!({ "config": cfg, "checks": results, "passed": failed == 0 });
    let failure = (failed > 0).then(|| Failure::Io(format!("{failed} randomized check(s) failed")));
    Ok(Outcome {
        text: json_doc(&doc),
        failure,
    })
}

fn run_render(path: &PathBuf) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let cfg: RunConfig = serde_json::from_value(doc["config"].clone())
        .map_err(|e| Failure::Usage(format!("{}: no usable config: {e}", path.display())))?;
    let svg = match cfg.command {
        Command::Ford => svg::ford(&doc),
        Command::Approx => svg::approx(&doc),
        other => return Err(Failure::Usage(format!("no diagram for {other:?} artifacts").to_lowercase())),
    };
    Ok(svg.map_err(Failure::Usage)?.into())
}

/// Builds and validates the config, then runs the command.
fn dispatch(cli: Cli) -> Result<Outcome, Failure> {
    let mut cfg = match &cli.cmd {
        Cmd::Enum { ring, c_max, emit } => {
            expect_emit(*emit, &[Emit::Json, Emit::Csv])?;
            positive("c-max", *c_max)?;
            RunConfig { ring: Some(*ring), c_max: Some(*c_max), ..RunConfig::new(Command::Enum, *emit) }
        }
        Cmd::Ford { ring, c_max, emit } => {
            expect_emit(*emit, &[Emit::Json, Emit::Svg])?;
            positive("c-max", *c_max)?;
            RunConfig { ring: Some(*ring), c_max: Some(*c_max), ..RunConfig::new(Command::Ford, *emit) }
        }
        Cmd::Approx { ring, xi, steps, emit } => {
            expect_emit(*emit, &[Emit::Json, Emit::Svg])?;
            if *steps == 0 {
                return Err(Failure::Usage("--steps must be at least 1".into()));
            }
            RunConfig {
                ring: Some(*ring),
                xi: Some(xi.clone()),
                steps: Some(*steps),
                ..RunConfig::new(Command::Approx, *emit)
            }
        }
        Cmd::Hurwitz { ring, c_max, trace_max, word_len, emit } => {
            expect_emit(*emit, &[Emit::Json])?;
            positive("c-max", *c_max)?;
            positive("trace-max", *trace_max)?;
            RunConfig {
                ring: Some(*ring),
                c_max: Some(*c_max),
                trace_max: Some(*trace_max),
                word_len: Some(*word_len),
                ..RunConfig::new(Command::Hurwitz, *emit)
            }
        }
        Cmd::Torus { cmd } => match cmd {
            TorusCmd::H2 { ell, theta } => RunConfig {
                mode: Some("h2".into()),
                ell: Some(*ell),
                theta: Some(*theta),
                ..RunConfig::new(Command::Torus, Emit::Json)
            },
            TorusCmd::Oracle { ell, theta, word_len } => RunConfig {
                mode: Some("oracle".into()),
                ell: Some(*ell),
                theta: Some(*theta),
                word_len: Some(*word_len),
                ..RunConfig::new(Command::Torus, Emit::Json)
            },
            TorusCmd::Grid { n, emit } => {
                expect_emit(*emit, &[Emit::Csv, Emit::Json])?;
                RunConfig { mode: Some("grid".into()), n: Some(*n), ..RunConfig::new(Command::Torus, *emit) }
            }
        },
        Cmd::Check { cases } => RunConfig { cases: Some(*cases), ..RunConfig::new(Command::Check, Emit::Json) },
        Cmd::Render { path } => return run_render(path),
    };
    if let Some(d) = cfg.ring {
        RingSpec::new(d)?;
    }
    cfg.out = cli.out.as_ref().map(|p| p.display().to_string());
    cfg.threads = cli.threads;
    cfg.seed = cli.seed;
    let exec = exec_for(cli.threads)?;
    match cfg.command {
        Command::Enum => run_enum(&cfg, exec),
        Command::Ford => run_ford(&cfg, exec),
        Command::Approx => run_approx(&cfg),
        Command::Hurwitz => run_hurwitz(&cfg, exec),
        Command::Torus => run_torus(&cfg, exec),
        Command::Check => run_check(&cfg),
    }
}

/// Prints a one-line JSON diagnostic and picks the exit code.
fn report(f: Failure) -> ExitCode {
    let (code, diag) = match f {
        Failure::Usage(message) => (2, json!({ "error": "usage", "message": message })),
        Failure::Io(message) => (1, json!({ "error": "failure", "message": message })),
        Failure::Run(e) => {
            let mut d = json!({ "error": error_kind(&e), "message": e.to_string() });
            if let Error::Uncertified { certified_prefix } = e {
                d["certified_prefix"] = json!(certified_prefix);
            }
            (1, d)
        }
    };
    eprintln!("{diag}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return report(Failure::Usage(e.kind().to_string()));
        }
    };
    let out = cli.out.clone();
    let outcome = match dispatch(cli) {
        Ok(o) => o,
        Err(f) => return report(f),
    };
    let written = match &out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string())
        }
    };
    if let Err(e) = written {
        return report(Failure::Io(e));
    }
    match outcome.failure {
        Some(f) => report(f),
        None => ExitCode::SUCCESS,
    }
}
