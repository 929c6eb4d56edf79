//! `sphere-certify`: run the region certifier, inspect traces, and evaluate
//! the pieces of the proof from the command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification incomplete.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sphere_certify::certificates::{self, CheckResult};
use sphere_certify::expr::{eval_interval, parse, VarBox};
use sphere_certify::interval::{format_box, parse_box};
use sphere_certify::linalg::{DefKind, DefMethod, DefinitenessQuery, SymIntervalMatrix};
use sphere_certify::model::{constants, Method, Model, RegionId, VARS};
use sphere_certify::verifier::{self, DomainPath, LeafSummary, RunReport, VerifyConfig};
use sphere_certify::{Interval, Rational, RoundingPolicy};

#[derive(Parser)]
#[command(name = "sphere-certify", version, about = "Certify the five-point spherical distance-sum inequality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the certifier on a region or a subtree and write proof traces.
    Verify(VerifyArgs),
    /// Expression utilities.
    Expr {
        #[command(subcommand)]
        command: ExprCommand,
    },
    /// Decide a definiteness query for an interval matrix fixture file.
    Matrix {
        /// Fixture: `n`, then `n` lines of `n` interval literals.
        file: PathBuf,
        /// Property to decide (posdef, negdef, …, nondef).
        #[arg(long, default_value = "negdef")]
        query: DefKind,
        /// `vertex` or `eigenvalue`.
        #[arg(long, default_value = "eigenvalue")]
        method: DefMethod,
        /// Decimal digits of eigenvalue enclosures.
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
    /// Print the leaf path containing a point.
    Locate {
        /// Seven comma-separated rationals or decimals, or a box literal
        /// (whose two corners must share a leaf).
        #[arg(allow_hyphen_values = true)]
        point: String,
    },
    /// Explain how a point was certified, from the stored traces.
    Replay {
        /// Seven comma-separated rationals or decimals.
        #[arg(allow_hyphen_values = true)]
        point: String,
        #[arg(long, env = "SPHERE_CERTIFY_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Summarise a trace directory and run the fixed checks.
    Report {
        #[arg(env = "SPHERE_CERTIFY_OUT", default_value = "out")]
        dir: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the fast certificate subset.
    Selftest(SelftestArgs),
    /// Model inspection.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
}

#[derive(Subcommand)]
enum ExprCommand {
    /// Evaluate an expression over a box.
    Eval {
        /// Expression, e.g. `sqrt(2+2*cos(phi1))`.
        expr: String,
        /// Box literal, one interval per variable.
        #[arg(long = "box")]
        bx: Option<String>,
        /// Comma-separated variable names matching the box; defaults to the
        /// seven model coordinates for a 7-box, else the expression's
        /// variables in sorted order.
        #[arg(long)]
        vars: Option<String>,
        #[arg(long, default_value_t = 10)]
        digits: u32,
    },
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Print the objective, derivative counts, constants and domains.
    Dump,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegionArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    region: RegionArg,
    /// Subtree to run, e.g. `1106/834/726` (relative to the region).
    #[arg(long)]
    index: Option<String>,
    /// Width below which boxes are not split (rational).
    #[arg(long)]
    eps: Option<Rational>,
    /// Comma-separated method names or codes, tried in order.
    #[arg(long)]
    methods: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, env = "SPHERE_CERTIFY_OUT", default_value = "out")]
    out: PathBuf,
    /// Print one line per leaf.
    #[arg(long)]
    verbose: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SelftestArgs {
    /// Width threshold for the spot leaf run.
    #[arg(long)]
    eps: Option<Rational>,
    /// Method list for the spot leaf run.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    json: bool,
}

/// A failure with its exit code.
struct Failure(u8, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(1, e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Expr { command: ExprCommand::Eval { expr, bx, vars, digits } } => expr_eval(&expr, bx, vars, digits),
        Command::Matrix { file, query, method, digits } => matrix(file, query, method, digits),
        Command::Locate { point } => locate(&point),
        Command::Replay { point, out } => replay(&point, out),
        Command::Report { dir, json } => report(dir, json),
        Command::Selftest(a) => selftest(a),
        Command::Model { command: ModelCommand::Dump } => model_dump(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn parse_methods(list: &str) -> Result<Vec<Method>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<u8>() {
            Ok(code) => Method::from_code(code).ok_or_else(|| Failure(1, format!("unknown method code {code}"))),
            Err(_) => s.parse::<Method>().map_err(|e| Failure(1, e)),
        })
        .collect()
}

fn config(
    region: RegionId,
    eps: &Option<Rational>,
    methods: &Option<String>,
    jobs: usize,
) -> Result<VerifyConfig, Failure> {
    let mut cfg = VerifyConfig::for_region(region);
    if let Some(eps) = eps {
        if !eps.is_positive() {
            return Err(Failure(1, "eps must be positive".into()));
        }
        cfg.eps = eps.clone();
    }
    if let Some(m) = methods {
        cfg.methods = parse_methods(m)?;
    }
    cfg.jobs = jobs;
    Ok(cfg)
}

fn summary_json(r: &RunReport) -> Value {
    json!({
        "root": r.root.to_string(),
        "leaves": r.leaves.len(),
        "certified": r.leaves.iter().filter(|l| l.certified).count(),
        "unchecked": r.unchecked(),
        "failed": r.failed().map(|l| l.path.to_string()).collect::<Vec<_>>(),
        "methods": r.methods(),
        "time_s": r.leaves.iter().map(|l| l.time_s).sum::<f64>(),
    })
}

fn verify(a: VerifyArgs) -> CmdResult {
    let model = Model::get();
    let regions = match a.region {
        RegionArg::One => vec![RegionId::One],
        RegionArg::Two => vec![RegionId::Two],
        RegionArg::All => vec![RegionId::One, RegionId::Two],
    };
    if a.index.is_some() && regions.len() != 1 {
        return Err(Failure(1, "--index needs a single region".into()));
    }
    let mut all_ok = true;
    let mut json_out = Vec::new();
    for region in regions {
        let cfg = config(region, &a.eps, &a.methods, a.jobs)?;
        let root = match &a.index {
            Some(ix) => format!("{region}/{ix}").parse::<DomainPath>()?,
            None => DomainPath::root(region),
        };
        let start = Instant::now();
        let verbose = a.verbose && !a.json;
        let progress = |s: &LeafSummary| {
            if verbose || !s.certified {
                eprintln!(
                    "{} {} unchecked={} events={} {:.3}s",
                    s.path,
                    if s.certified { "ok" } else { "FAIL" },
                    s.unchecked,
                    s.events,
                    s.time_s
                );
            }
        };
        let r = verifier::run(model, &root, &cfg, Some(&a.out), &progress)?;
        all_ok &= r.certified();
        if a.json {
            json_out.push(summary_json(&r));
        } else {
            let ok = r.leaves.iter().filter(|l| l.certified).count();
            println!("domain {}: {}/{} leaves certified, unchecked={}", r.root, ok, r.leaves.len(), r.unchecked());
            for (m, n) in r.methods() {
                println!("  {m:<13} {n}");
            }
            println!("wall time: {:.1} s (traces in {})", start.elapsed().as_secs_f64(), a.out.display());
        }
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&json_out)?);
    }
    Ok(if all_ok { 0 } else { 2 })
}

fn expr_eval(src: &str, bx: Option<String>, vars: Option<String>, digits: u32) -> CmdResult {
    let e = parse(src)?;
    let values = match &bx {
        Some(b) => parse_box(b)?,
        None => Vec::new(),
    };
    let names: Vec<String> = match vars {
        Some(v) => v.split(',').map(|s| s.trim().to_string()).collect(),
        None if values.len() == 7 => VARS.iter().map(|s| s.to_string()).collect(),
        None => e.free_vars(),
    };
    if names.len() != values.len() {
        return Err(Failure(1, format!("{} variables but {} intervals", names.len(), values.len())));
    }
    let vb = VarBox::new(names.iter().map(String::as_str).zip(values));
    let policy = RoundingPolicy::with_digits(digits);
    println!("{}", eval_interval(&e, &vb, &policy)?);
    Ok(0)
}

fn matrix(file: PathBuf, kind: DefKind, method: DefMethod, digits: u32) -> CmdResult {
    let text = std::fs::read_to_string(&file).map_err(|e| Failure(1, format!("{}: {e}", file.display())))?;
    let m = SymIntervalMatrix::from_fixture(&text)?;
    let ok = m.is_definite(DefinitenessQuery::new(kind, method), digits)?;
    println!("{kind} by {method}: {ok}");
    Ok(0)
}

/// Parses seven comma-separated numbers, or a box literal as two corners.
fn parse_point(s: &str) -> Result<Vec<Vec<Rational>>, Failure> {
    if s.trim_start().starts_with("[[") {
        let b = parse_box(s)?;
        let corner = |hi: bool| {
            b.iter()
                .map(|x| x.finite_bounds().map(|(a, b)| if hi { b.clone() } else { a.clone() }))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Failure(1, "unbounded box".into()))
        };
        return Ok(vec![corner(false)?, corner(true)?]);
    }
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    let p = s.split(',').map(|t| t.trim().parse::<Rational>()).collect::<Result<Vec<_>, _>>()?;
    if p.len() != 7 {
        return Err(Failure(1, format!("expected 7 coordinates, got {}", p.len())));
    }
    Ok(vec![p])
}

fn locate(point: &str) -> CmdResult {
    let model = Model::get();
    let points = parse_point(point)?;
    let paths = points.iter().map(|p| verifier::locate(model, p)).collect::<Result<Vec<_>, _>>()?;
    if paths.windows(2).any(|w| w[0] != w[1]) {
        return Err(Failure(1, format!("the box spans several leaves ({} and {})", paths[0], paths[1])));
    }
    println!("{}", paths[0]);
    Ok(0)
}

fn replay(point: &str, out: PathBuf) -> CmdResult {
    let model = Model::get();
    let p = parse_point(point)?.swap_remove(0);
    let path = verifier::locate(model, &p)?;
    let t = verifier::read_trace(&path, &out)?;
    let r = verifier::replay(model, &t, &p)?;
    println!("leaf: {path} (checked in {:.3} s)", t.time_s);
    println!("{r}");
    Ok(0)
}

fn checks_json(checks: &[CheckResult]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail, "time_s": c.time_s}))
            .collect(),
    )
}

fn report(dir: PathBuf, as_json: bool) -> CmdResult {
    let model = Model::get();
    let r = verifier::report(model, &dir)?;
    if as_json {
        let regions: Vec<Value> = r
            .regions
            .iter()
            .map(|s| {
                json!({
                    "region": s.region.number(),
                    "expected": s.expected,
                    "certified": s.certified,
                    "failed": s.failed.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "missing": s.missing,
                })
            })
            .collect();
        let v = json!({
            "certified": r.is_certified(),
            "regions": regions,
            "methods": r.methods,
            "max_depth": r.max_depth,
            "unchecked": r.unchecked,
            "time_s": r.time_s,
            "checks": checks_json(&r.checks),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("{r}");
    }
    Ok(if r.is_certified() { 0 } else { 2 })
}

fn selftest(a: SelftestArgs) -> CmdResult {
    let model = Model::get();
    let mut checks = certificates::all(model);
    let cfg = config(RegionId::One, &a.eps, &a.methods, 1)?;
    let start = Instant::now();
    let leaf = DomainPath::new(RegionId::One, vec![1]);
    let t = verifier::run_leaf(model, &leaf, &cfg)?;
    checks.push(CheckResult {
        name: "spot-leaf",
        passed: t.is_certified(),
        detail: format!("leaf {leaf}: {} events, {} unchecked", t.events.len(), t.unchecked.len()),
        time_s: start.elapsed().as_secs_f64(),
    });
    let ok = checks.iter().all(|c| c.passed);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&json!({"passed": ok, "checks": checks_json(&checks)}))?);
    } else {
        for c in &checks {
            println!("{c}");
        }
        println!("{}", if ok { "selftest passed" } else { "selftest FAILED" });
    }
    Ok(if ok { 0 } else { 2 })
}

fn model_dump() -> CmdResult {
    let model = Model::get();
    let c = &model.constants;
    println!("f = {}", model.f);
    println!("distances: {}", model.distances.len());
    println!("gradient entries: {}", model.df.len());
    println!("Hessian entries (upper triangle): {}", model.hess.len());
    println!("program nodes: {}", model.program.len());
    let show = |name: &str, e: &sphere_certify::expr::Expr| println!("{name} = {e} ∈ {}", constants::enclose(e));
    show("fmax", &c.fmax_expr);
    println!("fmax_lo = {}", c.fmax_lo);
    show("s", &c.s);
    for (i, w) in c.omega.iter().enumerate() {
        show(&format!("omega{}", i + 1), w);
    }
    println!("Θ_bp = {}", format_box(c.theta_bp_box()));
    println!("Θ_p = {}", format_box(c.theta_p_box()));
    println!("pyfmax ∈ {}", c.pyfmax);
    show("eta", &c.eta);
    show("zeta", &c.zeta);
    println!("min_dist = {}", c.min_dist);
    show("second_dist_threshold", &c.second_dist_threshold);
    show("pentagon_bound", &c.pentagon_bound);
    show("phi1_lower", &c.phi1_lower);
    let d = &model.domains;
    let boxes: [(&str, &[Interval]); 5] =
        [("D", &d.full), ("D1", &d.region1), ("D2", &d.region2), ("D_bp", &d.bipyramid), ("D_p", &d.pyramid)];
    for (name, b) in boxes {
        println!("{name} = {}", format_box(b));
    }
    Ok(0)
}
