//! `itlog`: iterative logarithms, differential-equation guessing and
//! Poincaré functions from the command line.
//!
//! Exit codes: 0 success, 1 computational error, 2 usage error.

mod cache;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use itlog_core::coeff::{parse_rational, rational_fraction_string, Complex, Rational};
use itlog_core::expr::{Expr, ExprError};
use itlog_core::format::{exact_to_text, parse_series_text, FormatError};
use itlog_core::funceq::{
    flow, itlog, itlog_input_order, julia_residual, FunceqError, ItlogResult,
};
use itlog_core::germ::{GermError, ParabolicGerm};
use itlog_core::guesser::{
    egf_ogf_transform, guess_ade, guess_linear_ode, GuessError, GuessOutcome, SearchBounds,
    Transform,
};
use itlog_core::poincare::{
    find_repelling_fixed_point, parse_samples_csv, poincare_derivative, poincare_eval,
    reports_to_csv, PoincareError,
};
use itlog_core::suites::{all_passed, Suite};
use itlog_core::{AnySeries, ExactSeries};

use cache::Cache;

#[derive(Parser)]
#[command(
    name = "itlog",
    version,
    about = "Exact iterative logarithms and friends"
)]
struct Cli {
    /// Cache directory (overrides ITLOG_CACHE_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterative logarithm of a parabolic germ.
    Itlog(ItlogArgs),
    /// Search for a differential equation satisfied by a series.
    Guess(GuessArgs),
    /// List vanishing itlog coefficients up to --kmax.
    Scan(ScanArgs),
    /// Guess an equation for the ordinary generating function of itlog.
    OgfProbe(OgfArgs),
    /// Run an invariant suite; exit code 0 iff every check passes.
    Verify(VerifyArgs),
    /// Evaluate the Poincaré function at a repelling periodic point.
    Poincare(PoincareArgs),
    /// Time-t map of the formal flow of a parabolic germ.
    Flow(FlowArgs),
}

#[derive(Args)]
struct GermArgs {
    /// Germ expression, e.g. "exp(z)-1".
    #[arg(long = "f", value_name = "EXPR")]
    f: String,
    /// Bind a parameter: NAME=RATIONAL (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
}

#[derive(Args)]
struct ItlogArgs {
    #[command(flatten)]
    germ: GermArgs,
    #[arg(long)]
    order: usize,
    /// Machine-readable output (schema 1).
    #[arg(long)]
    json: bool,
    /// Also write the series file here.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Ade,
    Ode,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum, default_value = "ade")]
    mode: Mode,
    /// Largest derivative order r (default 2).
    #[arg(long)]
    max_order: Option<usize>,
    /// Largest total degree d, ADE mode only (default 3).
    #[arg(long)]
    max_degree: Option<u32>,
    /// Largest z-degree e of the coefficients (default 4 for ade, 2 for ode).
    #[arg(long)]
    max_zdeg: Option<usize>,
    /// Matched coefficients beyond the number of unknowns.
    #[arg(long, default_value_t = 20)]
    margin: usize,
    /// ODE mode: allow an inhomogeneous polynomial term.
    #[arg(long)]
    affine: bool,
}

impl BoundArgs {
    fn bounds(&self) -> SearchBounds {
        let d = SearchBounds::default();
        let zdeg = match self.mode {
            Mode::Ade => d.max_z_degree,
            Mode::Ode => 2,
        };
        SearchBounds::new(
            self.max_order.unwrap_or(d.max_order),
            self.max_degree.unwrap_or(d.max_total_degree),
            self.max_zdeg.unwrap_or(zdeg),
            self.margin,
        )
    }
}

#[derive(Args)]
struct GuessArgs {
    /// Series expression or series file.
    #[arg(long, value_name = "EXPR|FILE")]
    series: String,
    /// Truncation order (required for expressions; caps a file's order).
    #[arg(long)]
    order: Option<usize>,
    /// Guess for the iterative logarithm of the given germ instead.
    #[arg(long)]
    itlog: bool,
    /// Bind a parameter: NAME=RATIONAL (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Machine-readable output (schema 1).
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    germ: GermArgs,
    #[arg(long)]
    kmax: usize,
    /// Machine-readable output (schema 1).
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OgfArgs {
    #[command(flatten)]
    germ: GermArgs,
    #[arg(long)]
    order: usize,
    #[command(flatten)]
    bounds: BoundArgs,
    /// Machine-readable output (schema 1).
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteName {
    Julia,
    #[value(name = "chainA")]
    ChainA,
    #[value(name = "chainB")]
    ChainB,
    Flow,
    Scale,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteName,
}

#[derive(Args)]
struct PoincareArgs {
    #[command(flatten)]
    germ: GermArgs,
    /// Newton seed for the periodic point.
    #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
    seed: String,
    #[arg(long, default_value_t = 1)]
    period: usize,
    /// CSV file of sample points, `re,im` per line.
    #[arg(long, value_name = "FILE.csv")]
    at: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Evaluate the m-th derivative instead of the value.
    #[arg(long, value_name = "M")]
    derivative: Option<usize>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    germ: GermArgs,
    #[arg(long, value_name = "RATIONAL", allow_hyphen_values = true)]
    t: String,
    #[arg(long)]
    order: usize,
    /// Machine-readable output (schema 1).
    #[arg(long)]
    json: bool,
}

/// A computational failure: exit code 1.
#[derive(Debug)]
struct AppError {
    kind: &'static str,
    message: String,
}

impl AppError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        AppError {
            kind,
            message: message.into(),
        }
    }
}

macro_rules! app_error_from {
    ($($t:ty => $kind:literal),* $(,)?) => {
        $(impl From<$t> for AppError {
            fn from(e: $t) -> Self {
                AppError::new($kind, e.to_string())
            }
        })*
    };
}

app_error_from! {
    ExprError => "expression",
    FunceqError => "funceq",
    GermError => "germ",
    GuessError => "guesser",
    PoincareError => "poincare",
    FormatError => "series_file",
    std::io::Error => "io",
}

type AppResult = Result<(String, bool), AppError>;

struct Ctx {
    cache: Cache,
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, Rational>, AppError> {
    let mut out = BTreeMap::new();
    for p in raw {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| AppError::new("input", format!("parameter `{p}` is not NAME=VALUE")))?;
        let v = parse_rational(value.trim())
            .ok_or_else(|| AppError::new("input", format!("parameter `{name}` is not rational")))?;
        out.insert(name.trim().to_string(), v);
    }
    Ok(out)
}

fn parse_germ_expr(g: &GermArgs) -> Result<Expr, AppError> {
    Ok(Expr::parse_with(&g.f, &parse_params(&g.params)?)?)
}

/// The germ of `expr` truncated at the order `itlog` needs for `order`
/// output coefficients.
fn load_germ(expr: &Expr, order: usize) -> Result<(ParabolicGerm<Rational>, usize), AppError> {
    let probe = ParabolicGerm::new(expr.eval(order.max(16))?)?;
    let need = itlog_input_order(probe.p(), order).max(order);
    let s = expr.eval(need)?;
    if s.order() < need {
        return Err(FunceqError::OrderDeficit {
            needed: need,
            available: s.order(),
        }
        .into());
    }
    Ok((ParabolicGerm::new(s)?, need))
}

/// Cheap acceptance test for a cached itlog: right order, right leading
/// term, and Julia's equation holds through z^10.
fn recheck_itlog(f: &ParabolicGerm<Rational>, phi: &ExactSeries, order: usize) -> bool {
    let p = f.p();
    if phi.order() != order || phi.coeffs().get(p) != Some(f.leading()) {
        return false;
    }
    let k = order.min(10);
    if k < p {
        return true;
    }
    let Ok(g) = f.truncate(itlog_input_order(p, k)) else {
        return false;
    };
    julia_residual(&g, &phi.truncate(k)).is_ok_and(|r| r.is_zero())
}

fn cached_itlog(
    ctx: &Ctx,
    expr: &Expr,
    order: usize,
) -> Result<(ParabolicGerm<Rational>, ItlogResult<Rational>, usize), AppError> {
    let (f, need) = load_germ(expr, order)?;
    let canon = expr.to_string();
    let key = Cache::key("itlog", &canon, order);
    if let Some(entry) = ctx.cache.load(&key) {
        if let Ok(AnySeries::Exact(phi)) = parse_series_text(&entry.payload) {
            if recheck_itlog(&f, &phi, order) {
                let res = ItlogResult {
                    phi,
                    source_p: f.p(),
                    verified_order: order,
                };
                return Ok((f, res, need));
            }
        }
        eprintln!("warning: discarding cache entry {key} that failed re-verification");
    }
    let res = itlog(&f, order)?;
    ctx.cache
        .store(&key, "itlog", &canon, order, exact_to_text(&res.phi));
    Ok((f, res, need))
}

fn rationals_json(s: &ExactSeries) -> Value {
    Value::Array(
        s.coeffs()
            .iter()
            .map(|c| Value::String(rational_fraction_string(c)))
            .collect(),
    )
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_itlog(ctx: &Ctx, a: &ItlogArgs) -> AppResult {
    let expr = parse_germ_expr(&a.germ)?;
    let (f, res, need) = cached_itlog(ctx, &expr, a.order)?;
    let header = format!(
        "# itlog of {}; p = {}; input truncated at order {need}\n",
        a.germ.f,
        f.p()
    );
    let body = exact_to_text(&res.phi);
    if let Some(path) = &a.out {
        fs::write(path, format!("{header}{body}"))?;
    }
    if a.json {
        return Ok((
            pretty(&json!({
                "schema": 1,
                "command": "itlog",
                "f": a.germ.f,
                "p": f.p(),
                "order": a.order,
                "input_truncation": need,
                "verified_order": res.verified_order,
                "coefficients": rationals_json(&res.phi),
            })),
            true,
        ));
    }
    Ok((format!("{header}{body}"), true))
}

fn scan_line(p: usize, kmax: usize, zeros: &[usize]) -> String {
    if zeros.is_empty() {
        format!("no vanishing coefficients in {}..{kmax}", p + 1)
    } else {
        let list: Vec<String> = zeros.iter().map(usize::to_string).collect();
        format!(
            "vanishing coefficients in {}..{kmax} at k = {}",
            p + 1,
            list.join(", ")
        )
    }
}

fn cmd_scan(ctx: &Ctx, a: &ScanArgs) -> AppResult {
    let expr = parse_germ_expr(&a.germ)?;
    let (f, res, need) = cached_itlog(ctx, &expr, a.kmax)?;
    let p = f.p();
    let zeros: Vec<usize> = (p + 1..=a.kmax)
        .filter(|&k| res.phi.coeffs()[k] == Rational::from_integer(0.into()))
        .collect();
    if a.json {
        return Ok((
            pretty(&json!({
                "schema": 1,
                "command": "scan",
                "f": a.germ.f,
                "p": p,
                "kmax": a.kmax,
                "input_truncation": need,
                "vanishing": zeros,
            })),
            true,
        ));
    }
    Ok((
        format!(
            "{}\n# f = {}; p = {p}; input truncated at order {need}\n",
            scan_line(p, a.kmax, &zeros),
            a.germ.f
        ),
        true,
    ))
}

fn run_guess(y: &ExactSeries, b: &BoundArgs) -> Result<GuessOutcome, AppError> {
    let bounds = b.bounds();
    Ok(match b.mode {
        Mode::Ade => guess_ade(y, &bounds)?,
        Mode::Ode => guess_linear_ode(y, &bounds, b.affine)?,
    })
}

fn guess_report(
    out: &GuessOutcome,
    series_order: usize,
    extra: &[(&str, Value)],
) -> (String, Value) {
    let b = out.bounds;
    let candidate = out.candidate.as_ref().map(|c| c.to_string());
    let mut text = String::new();
    let _ = writeln!(text, "verdict: {}", out.verdict.as_str());
    if let Some(c) = &candidate {
        let _ = writeln!(text, "candidate: {c}");
    }
    let _ = writeln!(text, "verified_to: {}", out.verified_to);
    let _ = writeln!(
        text,
        "bounds: r={} d={} e={} margin={} (unknowns {}, equations {}, series order {series_order})",
        b.max_order, b.max_total_degree, b.max_z_degree, b.margin, out.unknowns, out.equations
    );
    if let Some(c) = out.caveat() {
        let _ = writeln!(text, "caveat: {c}");
    }
    let mut v = json!({
        "schema": 1,
        "verdict": out.verdict.as_str(),
        "candidate": candidate,
        "verified_to": out.verified_to,
        "series_order": series_order,
        "bounds": {
            "max_order": b.max_order,
            "max_total_degree": b.max_total_degree,
            "max_z_degree": b.max_z_degree,
            "margin": b.margin,
        },
        "caveat": out.caveat(),
    });
    for (k, x) in extra {
        v[*k] = x.clone();
    }
    (text, v)
}

fn cmd_guess(ctx: &Ctx, a: &GuessArgs) -> AppResult {
    let path = Path::new(&a.series);
    let y = if path.is_file() {
        let s = match parse_series_text(&fs::read_to_string(path)?)? {
            AnySeries::Exact(s) => s,
            AnySeries::Float(_) => {
                return Err(AppError::new(
                    "input",
                    "the guesser needs an exact series file",
                ))
            }
        };
        let s = match a.order {
            Some(n) if n < s.order() => s.truncate(n),
            _ => s,
        };
        if a.itlog {
            let n = s.order();
            let f = ParabolicGerm::new(s)?;
            let k = n + 1 - f.p();
            itlog(&f, k)?.phi
        } else {
            s
        }
    } else {
        let order = a.order.ok_or_else(|| {
            AppError::new(
                "input",
                "--order is required when --series is an expression",
            )
        })?;
        let expr = Expr::parse_with(&a.series, &parse_params(&a.params)?)?;
        if a.itlog {
            cached_itlog(ctx, &expr, order)?.1.phi
        } else {
            let s = expr.eval(order)?;
            if s.order() < order {
                return Err(AppError::new(
                    "input",
                    format!("expression is only known to order {}", s.order()),
                ));
            }
            s
        }
    };
    let out = run_guess(&y, &a.bounds)?;
    let mode = match a.bounds.mode {
        Mode::Ade => "ade",
        Mode::Ode => "ode",
    };
    let (text, v) = guess_report(
        &out,
        y.order(),
        &[("command", json!("guess")), ("mode", json!(mode))],
    );
    Ok((if a.json { pretty(&v) } else { text }, true))
}

fn cmd_ogf_probe(ctx: &Ctx, a: &OgfArgs) -> AppResult {
    let expr = parse_germ_expr(&a.germ)?;
    let (_, res, need) = cached_itlog(ctx, &expr, a.order)?;
    let y = egf_ogf_transform(&res.phi, Transform::ToOgf);
    let out = run_guess(&y, &a.bounds)?;
    let note = "open question; the probe records evidence only";
    let (text, v) = guess_report(
        &out,
        y.order(),
        &[
            ("command", json!("ogf-probe")),
            ("f", json!(a.germ.f)),
            ("input_truncation", json!(need)),
            ("note", json!(note)),
        ],
    );
    if a.json {
        return Ok((pretty(&v), true));
    }
    Ok((
        format!("# ogf of itlog({}); {note}\n{text}", a.germ.f),
        true,
    ))
}

fn cmd_verify(a: &VerifyArgs) -> AppResult {
    let (suite, name) = match a.suite {
        SuiteName::Julia => (Suite::Julia, "julia"),
        SuiteName::ChainA => (Suite::ChainA, "chainA"),
        SuiteName::ChainB => (Suite::ChainB, "chainB"),
        SuiteName::Flow => (Suite::Flow, "flow"),
        SuiteName::Scale => (Suite::Scale, "scale"),
    };
    let checks = suite.run();
    let mut text = String::new();
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            let _ = writeln!(text, "{tag} {}", c.name);
        } else {
            let _ = writeln!(text, "{tag} {} ({})", c.name, c.detail);
        }
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(text, "suite {name}: {passed}/{} passed", checks.len());
    Ok((text, all_passed(&checks)))
}

fn parse_complex(s: &str) -> Result<Complex, AppError> {
    let bad = || AppError::new("input", format!("expected RE,IM, got `{s}`"));
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    Ok(Complex::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

fn cmd_poincare(a: &PoincareArgs) -> AppResult {
    let map = parse_germ_expr(&a.germ)?.to_map()?;
    let seed = parse_complex(&a.seed)?;
    let fp = find_repelling_fixed_point(&map, seed, a.period)?;
    eprintln!(
        "# xi = {} ; lambda = {} ; period {}; error estimates are successive differences",
        fp.xi, fp.lambda, fp.period
    );
    let samples = parse_samples_csv(&fs::read_to_string(&a.at)?)?;
    let mut rows = Vec::with_capacity(samples.len());
    for z in samples {
        let r = match a.derivative {
            Some(m) => poincare_derivative(&map, &fp, z, m, a.tol)?,
            None => poincare_eval(&map, &fp, z, a.tol)?,
        };
        rows.push((z, r));
    }
    let ok = rows.iter().all(|(_, r)| r.converged);
    if !ok {
        eprintln!("warning: some samples did not converge to the requested tolerance");
    }
    Ok((reports_to_csv(&rows), true))
}

fn cmd_flow(a: &FlowArgs) -> AppResult {
    let expr = parse_germ_expr(&a.germ)?;
    let t = parse_rational(a.t.trim())
        .ok_or_else(|| AppError::new("input", format!("--t must be rational, got `{}`", a.t)))?;
    let (f, need) = load_germ(&expr, a.order)?;
    let g = flow(&f, &t, a.order)?;
    if a.json {
        return Ok((
            pretty(&json!({
                "schema": 1,
                "command": "flow",
                "f": a.germ.f,
                "t": rational_fraction_string(&t),
                "order": a.order,
                "input_truncation": need,
                "coefficients": rationals_json(&g),
            })),
            true,
        ));
    }
    Ok((
        format!(
            "# flow of {} at t = {}; input truncated at order {need}\n{}",
            a.germ.f,
            rational_fraction_string(&t),
            exact_to_text(&g)
        ),
        true,
    ))
}

fn wants_json(c: &Command) -> bool {
    match c {
        Command::Itlog(a) => a.json,
        Command::Guess(a) => a.json,
        Command::Scan(a) => a.json,
        Command::OgfProbe(a) => a.json,
        Command::Flow(a) => a.json,
        Command::Verify(_) | Command::Poincare(_) => false,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Ctx {
        cache: Cache::resolve(cli.cache_dir.clone(), cli.no_cache),
    };
    let result = match &cli.command {
        Command::Itlog(a) => cmd_itlog(&ctx, a),
        Command::Guess(a) => cmd_guess(&ctx, a),
        Command::Scan(a) => cmd_scan(&ctx, a),
        Command::OgfProbe(a) => cmd_ogf_probe(&ctx, a),
        Command::Verify(a) => cmd_verify(a),
        Command::Poincare(a) => cmd_poincare(a),
        Command::Flow(a) => cmd_flow(a),
    };
    match result {
        Ok((text, ok)) => {
            print!("{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if wants_json(&cli.command) {
                print!(
                    "{}",
                    pretty(&json!({
                        "schema": 1,
                        "error": { "kind": e.kind, "message": e.message },
                    }))
                );
            }
            eprintln!("error ({}): {}", e.kind, e.message);
            ExitCode::from(1)
        }
    }
}
