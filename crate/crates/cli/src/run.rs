//! Command definitions and dispatch.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sobolev_curves::classify::{boundedness_verdict, classify, esd, Verdict};
use sobolev_curves::curve::{Arc, CurveKind};
use sobolev_curves::kernel::{check_c0, compare_with_float, compute_kernel, solve_exact, C0Options};
use sobolev_curves::measure::Region;
use sobolev_curves::numerics::{frame_zeros, gram_matrix, ortho_from_gram, orthonormal_basis, verify_zero_bound};
use sobolev_curves::weight::admissible::admissibility;
use sobolev_curves::weight::muckenhoupt::{hardy_bound, muckenhoupt_components, LambdaStatus, Side};
use sobolev_curves::weight::omega::{compute_omega, regular_sets};
use sobolev_curves::weight::Decision;
use sobolev_curves::VectorialMeasure;

use crate::doc::{load, InputError, Loaded};
use crate::output::{csv_table, Envelope, PlotRow};

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "SOBOLEV_CURVE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "sobolev-curves",
    version,
    about = "Sobolev spaces on curves: regular sets, kernels, verdicts and orthogonal polynomials"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Measure document (JSON).
    #[arg(global = true)]
    pub input: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Exit with status 2 when the verdict is unknown.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Relative slack of the zero bound.
    #[arg(long, default_value_t = 0.05, value_parser = parse_tol, global = true)]
    pub tol: f64,
    /// Size of the multiplication-matrix section.
    #[arg(long = "N", default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..=256), global = true)]
    pub n: u32,
    /// Largest degree of the orthonormal polynomials.
    #[arg(long = "n-max", default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..=128), global = true)]
    pub n_max: u32,
    /// Truncation depth of generated families.
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=24), global = true)]
    pub depth: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Plus,
    Minus,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sets, admissibility, kernel and verdict in one report.
    Analyze,
    /// Kernel of the Sobolev seminorm.
    Kernel {
        /// Restrict to the compact arc `t0:t1` (repeatable).
        #[arg(long, value_parser = parse_arc)]
        region: Vec<(f64, f64)>,
    },
    /// Structural types A, B, C and the ESD test.
    Classify,
    /// Boundedness of multiplication by z.
    Verdict,
    /// Sobolev orthonormal polynomials up to degree n-max.
    Orthopoly,
    /// Zeros of q_1, ..., q_{n-max}.
    Zeros,
    /// Zeros against sigma_max of the N-section of M.
    VerifyBound,
    /// Muckenhoupt constant of (mu_i, mu_j).
    Muckenhoupt {
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[arg(long, default_value_t = 1)]
        j: usize,
        /// Arc `t0:t1`; the whole curve by default.
        #[arg(long, value_parser = parse_arc)]
        arc: Option<(f64, f64)>,
        #[arg(long, value_enum, default_value_t = SideArg::Plus)]
        side: SideArg,
        /// Dyadic refinement depth.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..=20))]
        refinement: u32,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Kernel { .. } => "kernel",
            Command::Classify => "classify",
            Command::Verdict => "verdict",
            Command::Orthopoly => "orthopoly",
            Command::Zeros => "zeros",
            Command::VerifyBound => "verify-bound",
            Command::Muckenhoupt { .. } => "muckenhoupt",
        }
    }
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x > 0.0 && x <= 1.0 {
        Ok(x)
    } else {
        Err("tolerance must lie in (0, 1]".into())
    }
}

fn parse_arc(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected t0:t1")?;
    let a: f64 = a.trim().parse().map_err(|_| format!("`{a}` is not a number"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("`{b}` is not a number"))?;
    if a.is_finite() && b.is_finite() && a < b {
        Ok((a, b))
    } else {
        Err("expected t0 < t1".into())
    }
}

/// Everything a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub result: Value,
    pub warnings: Vec<String>,
    pub csv: Option<Vec<PlotRow>>,
    pub verdict: Option<Verdict>,
}

impl Outcome {
    fn json(result: Value) -> Outcome {
        Outcome { result, warnings: Vec::new(), csv: None, verdict: None }
    }
}

/// Failure classes, mapped to exit status 1.
#[derive(Debug)]
pub enum Failure {
    Input(InputError),
    Analysis(anyhow::Error),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error at {e}"),
            Failure::Analysis(e) => write!(f, "analysis failed: {e:#}"),
        }
    }
}

/// Checks the thread cap. The analyses run on one thread, so any positive
/// cap is honoured.
pub fn thread_cap() -> Result<Option<usize>, InputError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(InputError { location: THREADS_VAR.into(), message: format!("`{s}` is not a positive integer") }),
        },
    }
}

fn warn_decision(w: &mut Vec<String>, what: &str, d: Decision) {
    if d == Decision::Unknown {
        w.push(format!("{what} is undecided"));
    }
}

fn kernel_payload(loaded: &Loaded, region: Option<&Region>, warnings: &mut Vec<String>) -> anyhow::Result<Value> {
    let mu = &loaded.measure;
    let (sys, report) = compute_kernel(mu, region)?;
    if report.low_confidence {
        warnings.push("kernel rank decided with a narrow singular-value gap".into());
    }
    if report.inexact {
        warnings.push("regular sets were located numerically".into());
    }
    let mut out = json!({
        "dim": report.dim,
        "report": report,
        "decomposition": sys.decomposition,
    });
    if matches!(mu.curve().kind(), CurveKind::Segment { .. }) {
        match solve_exact(mu, &sys) {
            Ok(exact) => {
                let residual = compare_with_float(mu, &sys, &report.basis, &exact);
                if exact.dim != report.dim {
                    warnings.push(format!(
                        "exact kernel dimension {} differs from the floating one {}",
                        exact.dim, report.dim
                    ));
                }
                out["exact"] = json!({"dim": exact.dim, "rank": exact.rank, "span_residual": residual, "agrees": exact.dim == report.dim && residual < 1e-8});
            }
            Err(e) => warnings.push(format!("exact solver skipped: {e}")),
        }
    }
    if region.is_none() {
        let c0 = check_c0(mu, C0Options { truncated_family: loaded.generator.is_some() })?;
        out["c0"] = serde_json::to_value(c0)?;
    }
    Ok(out)
}

fn zero_rows(sets: &[sobolev_curves::numerics::ZeroSet]) -> Vec<PlotRow> {
    sets.iter()
        .flat_map(|s| {
            s.zeros.iter().zip(&s.residuals).map(move |(z, r)| PlotRow {
                series: "zero",
                n: s.degree,
                re: Some(z.re),
                im: Some(z.im),
                value: Some(*r),
            })
        })
        .collect()
}

fn execute(cli: &Cli, loaded: &Loaded) -> anyhow::Result<Outcome> {
    let mu: &VectorialMeasure = &loaded.measure;
    let n_max = cli.n_max as usize;
    let mut warnings = Vec::new();
    let mut out = match &cli.command {
        Command::Analyze => {
            let adm = admissibility(mu);
            warn_decision(&mut warnings, "admissibility", adm.admissible);
            let omega = compute_omega(mu);
            let regular = regular_sets(mu);
            if omega.iter().any(|o| o.inexact) || regular.iter().any(|r| r.inexact) {
                warnings.push("some set boundaries were located numerically".into());
            }
            let v = boundedness_verdict(mu)?;
            let mut o = Outcome::json(json!({
                "curve": {"kind": mu.curve().kind(), "length": mu.curve().length(), "closed": mu.curve().is_closed()},
                "p": mu.p(),
                "k": mu.k(),
                "masses": mu.masses(),
                "omega": omega,
                "regular": regular,
                "admissibility": adm,
                "kernel_dim": v.kernel_dim,
                "verdict": v.verdict,
                "theorem": v.theorem,
                "applicable": v.applicable,
            }));
            o.verdict = Some(v.verdict);
            o
        }
        Command::Kernel { region } => {
            let region = (!region.is_empty()).then(|| Region::compact(region));
            Outcome::json(kernel_payload(loaded, region.as_ref(), &mut warnings)?)
        }
        Command::Classify => {
            let c = classify(mu);
            warn_decision(&mut warnings, "type A", c.type_a.is_type_a);
            warn_decision(&mut warnings, "type B", c.type_b.is_type_b);
            warn_decision(&mut warnings, "type C", c.type_c.is_type_c);
            let e = esd(mu)?;
            Outcome::json(json!({"classification": c, "esd": e}))
        }
        Command::Verdict => {
            let v = boundedness_verdict(mu)?;
            warnings.extend(v.notes.iter().cloned());
            let mut o = Outcome::json(serde_json::to_value(&v)?);
            o.verdict = Some(v.verdict);
            o
        }
        Command::Orthopoly => {
            let basis = orthonormal_basis(mu, n_max)?;
            let check = ortho_from_gram(&gram_matrix(mu, n_max)?)?;
            let diff = basis
                .polys
                .iter()
                .zip(&check.polys)
                .flat_map(|(a, b)| {
                    a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()).max(1.0))
                })
                .fold(0.0, f64::max);
            let resid = basis.orthonormality_residual.unwrap_or(f64::NAN);
            if !(resid < 1e-8) {
                warnings.push(format!("orthonormality residual {resid:e} exceeds 1e-8"));
            }
            let monomial: Vec<_> = basis.polys.iter().map(|q| q.to_monomial()).collect();
            Outcome::json(json!({"basis": basis, "monomial": monomial, "cholesky_difference": diff}))
        }
        Command::Zeros => {
            let basis = orthonormal_basis(mu, n_max)?;
            let sets = basis.polys[1..].iter().map(frame_zeros).collect::<Result<Vec<_>, _>>()?;
            for s in &sets {
                warnings.extend(s.notices.iter().map(|m| format!("q_{}: {m}", s.degree)));
            }
            let mut o = Outcome::json(json!({"zeros": sets}));
            o.csv = Some(zero_rows(&sets));
            o
        }
        Command::VerifyBound => {
            let r = verify_zero_bound(mu, n_max, cli.n as usize, cli.tol)?;
            if r.bound_ok == Some(false) {
                warnings.push(format!(
                    "a zero of modulus {:?} lies outside sigma_max (1 + tol) = {}",
                    r.max_zero_modulus,
                    r.sigma_max * (1.0 + r.tol)
                ));
            }
            if let Some(resid) = r.orthonormality_residual.filter(|x| !(*x < 1e-8)) {
                warnings.push(format!("orthonormality residual {resid:e} exceeds 1e-8"));
            }
            let mut rows = zero_rows(&r.zeros);
            rows.extend(r.history.iter().map(|h| PlotRow {
                series: "sigma",
                n: h.n,
                re: None,
                im: None,
                value: Some(h.sigma_max),
            }));
            let mut o = Outcome::json(serde_json::to_value(&r)?);
            o.csv = Some(rows);
            o
        }
        Command::Muckenhoupt { i, j, arc, side, refinement } => {
            let arc = arc.map_or(Arc::new(0.0, mu.curve().length()), |(a, b)| Arc::new(a, b));
            let side = match side {
                SideArg::Plus => Side::Plus,
                SideArg::Minus => Side::Minus,
            };
            let r = muckenhoupt_components(mu, *i, *j, arc, side, *refinement as usize)?;
            // JSON has no infinity; the value is also given as text.
            let lambda = match r.status {
                LambdaStatus::Infinite => json!("inf"),
                _ if r.value.is_finite() => json!(r.value),
                _ => json!("unknown"),
            };
            if r.status == LambdaStatus::Unknown {
                warnings.push("the Muckenhoupt constant could not be decided".into());
            }
            let hardy = (r.status == LambdaStatus::Finite).then(|| hardy_bound(r.value, mu.p()));
            Outcome::json(json!({"lambda": lambda, "hardy_constant": hardy, "report": r}))
        }
    };
    if out.verdict == Some(Verdict::Unknown) {
        warnings.push("verdict is unknown".into());
    }
    out.warnings.splice(0..0, warnings);
    Ok(out)
}

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            1
        }
    }
}

fn run_inner(cli: &Cli) -> Result<i32, Failure> {
    thread_cap().map_err(Failure::Input)?;
    let input = cli.input.as_ref().ok_or_else(|| {
        Failure::Input(InputError { location: "command line".into(), message: "no input document given".into() })
    })?;
    if cli.format == Format::Csv && !matches!(cli.command, Command::Zeros | Command::VerifyBound) {
        return Err(Failure::Input(InputError {
            location: "--format".into(),
            message: format!("csv output exists only for zeros and verify-bound, not {}", cli.command.name()),
        }));
    }
    let start = Instant::now();
    let loaded = load(input, cli.depth.map(|d| d as usize)).map_err(Failure::Input)?;
    let outcome = execute(cli, &loaded).map_err(Failure::Analysis)?;
    let text = match cli.format {
        Format::Csv => csv_table(outcome.csv.as_deref().unwrap_or(&[])).map_err(Failure::Analysis)?,
        Format::Json => Envelope {
            command: echo(cli),
            version: crate::output::VERSION,
            wall_time: start.elapsed().as_secs_f64(),
            result: outcome.result,
            warnings: outcome.warnings.clone(),
        }
        .to_json(),
    };
    for w in &outcome.warnings {
        if cli.format == Format::Csv {
            eprintln!("warning: {w}");
        }
    }
    match &cli.output {
        Some(p) => {
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display())).map_err(Failure::Analysis)?
        }
        None => print!("{text}"),
    }
    Ok(if cli.strict && outcome.verdict == Some(Verdict::Unknown) { 2 } else { 0 })
}

fn echo(cli: &Cli) -> Value {
    let mut v = json!({
        "name": cli.command.name(),
        "input": cli.input.as_ref().map(|p| p.display().to_string()),
        "strict": cli.strict,
        "tol": cli.tol,
        "N": cli.n,
        "n_max": cli.n_max,
        "depth": cli.depth,
    });
    match &cli.command {
        Command::Kernel { region } if !region.is_empty() => v["region"] = json!(region),
        Command::Muckenhoupt { i, j, arc, side, refinement } => {
            v["i"] = json!(i);
            v["j"] = json!(j);
            v["arc"] = json!(arc);
            v["side"] = json!(format!("{side:?}").to_lowercase());
            v["refinement"] = json!(refinement);
        }
        _ => {}
    }
    v
}

/// Parses arguments, mapping clap's own usage errors to status 1.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
