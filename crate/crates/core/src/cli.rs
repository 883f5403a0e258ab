//! `psmono` command line: argument parsing, dispatch, and the JSON run report.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::fueter::{ck_extension, FueterTable, Side};
use crate::kernel::{kernel_e, slice_cauchy_kernel, QKernelTable};
use crate::mobius::{
    check_vahlen, conformal_transform, grav_generator, jacobian_weight, mobius_apply, GravGenerator, VahlenMatrix,
};
use crate::poly::{apply, CliffordPolynomial, MultiIndex, OperatorSpec, PolyKind};
use crate::quad::{
    build_rule, cauchy_integral_detailed, cauchy_pompeiu, laurent_coefficients, laurent_eval, max_modulus_scan,
    Resolution, RuleKind,
};
use crate::slice::{Point, SliceContext, SliceUnit};
use crate::stem::{extend_from_slice, thetabar_on_stem, StemPolynomial};
use crate::tolerances;
use crate::verify::{run_suite, SuiteOptions};

#[derive(Parser, Debug)]
#[command(
    name = "psmono",
    version,
    about = "Generalized partial-slice monogenic functions: polynomials, kernels, integral formulas, Möbius maps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Number of "real" directions minus one (x_0..x_p).
    #[arg(long, global = true)]
    p: Option<usize>,
    /// Number of slice directions (x_{p+1}..x_{p+q}).
    #[arg(long, global = true)]
    q: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report (makes reports run-dependent).
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Fueter polynomial P_k: coefficients, monogenicity residual, values.
    Fueter(FueterArgs),
    /// CK-extension of a polynomial on R^{p+1}.
    Ck(CkArgs),
    /// Stem function checks and induced values.
    Stem(StemArgs),
    /// Cauchy kernel E, the kernels Q_k, and the slice Cauchy kernel.
    Kernel(KernelArgs),
    /// Cauchy (or Cauchy-Pompeiu) integral by quadrature.
    Cauchy(CauchyArgs),
    /// Laurent coefficients on a sphere and the truncated series.
    Laurent(LaurentArgs),
    /// Vahlen matrices and the conformal transform.
    Mobius(MobiusArgs),
    /// Run a named batch of invariant checks.
    Verify(VerifyArgs),
    /// Maximum-modulus sampling on a ball.
    Maxmod(MaxmodArgs),
}

#[derive(Args, Debug)]
struct FueterArgs {
    /// Multi-index, e.g. 1,1.
    #[arg(long)]
    k: String,
    /// Slice unit η: text (`e2`) or q components.
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    right: bool,
    /// Slice coordinates x_0..x_p, r.
    #[arg(long, allow_hyphen_values = true)]
    eval: Option<String>,
    /// Full coordinates x_0..x_{p+q}.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, default_value_t = tolerances::FUETER_DEGREE_CAP)]
    cap: u32,
    #[arg(long, default_value_t = tolerances::POLY_ZERO)]
    tol: f64,
}

#[derive(Args, Debug)]
struct CkArgs {
    /// Polynomial JSON in x_0..x_p.
    #[arg(long, conflicts_with = "monomial")]
    function: Option<PathBuf>,
    /// Use the monomial x^k instead of a file.
    #[arg(long)]
    monomial: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, default_value_t = tolerances::POLY_ZERO)]
    tol: f64,
}

#[derive(Args, Debug)]
struct StemArgs {
    #[arg(long, value_name = "FILE")]
    check_gsr: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    induce: Option<PathBuf>,
    /// ϑ̄ of the induced function via the stem.
    #[arg(long, value_name = "FILE")]
    thetabar: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[arg(long, default_value_t = tolerances::POLY_ZERO)]
    tol: f64,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long = "E")]
    e: bool,
    #[arg(long = "Q")]
    q_kernel: bool,
    #[arg(long)]
    slice_cauchy: bool,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pole: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    at: String,
    #[arg(long)]
    right: bool,
}

#[derive(Args, Debug)]
struct QuadArgs {
    /// Trapezoid nodes (circle for p = 0, azimuth for p = 1).
    #[arg(long, default_value_t = tolerances::CIRCLE_NODES)]
    nodes: usize,
    /// Gauss-Legendre nodes in cos θ for p = 1.
    #[arg(long, default_value_t = tolerances::SPHERE_THETA)]
    theta_nodes: usize,
    #[arg(long, default_value_t = tolerances::RADIAL_NODES)]
    radial_nodes: usize,
    /// Permit Monte Carlo sphere rules for p >= 2.
    #[arg(long)]
    allow_mc: bool,
    #[arg(long, default_value_t = 20_000)]
    mc_samples: usize,
}

impl QuadArgs {
    fn resolution(&self, seed: u64) -> Resolution {
        Resolution {
            circle: self.nodes,
            theta: self.theta_nodes,
            phi: self.nodes,
            radial: self.radial_nodes,
            mc_samples: self.mc_samples,
            allow_mc: self.allow_mc,
            seed,
        }
    }
}

#[derive(Args, Debug)]
struct CauchyArgs {
    /// Stem JSON, full polynomial JSON, or slice polynomial JSON with "eta".
    #[arg(long)]
    function: PathBuf,
    #[arg(long)]
    slice_eta: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    at: String,
    /// Add the solid term for stems that are not GSR.
    #[arg(long)]
    pompeiu: bool,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct LaurentArgs {
    #[arg(long)]
    function: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 4)]
    max_k: u32,
    #[arg(long)]
    eta: Option<String>,
    /// Compare the truncated series with the function here.
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    #[command(flatten)]
    quad: QuadArgs,
    #[arg(long, default_value_t = tolerances::CAUCHY_REL)]
    tol: f64,
}

#[derive(Args, Debug)]
struct MobiusArgs {
    /// Generator, e.g. translation:1,0, rotation:e2, inversion, dilation:2.
    /// Repeats compose left to right as a matrix product.
    #[arg(long = "gen", allow_hyphen_values = true)]
    generators: Vec<String>,
    /// Matrix JSON instead of generators.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Check the Ahlfors-Vahlen conditions of a matrix JSON file.
    #[arg(long, value_name = "FILE")]
    check_vahlen: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    apply: Option<String>,
    /// Function JSON for the conformal transform, evaluated at --at.
    #[arg(long)]
    transform: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 4)]
    max_deg: u32,
    #[arg(long, default_value_t = 3)]
    samples: usize,
}

#[derive(Args, Debug)]
struct MaxmodArgs {
    #[arg(long)]
    function: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, allow_hyphen_values = true)]
    center: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    /// Interior grid points per slice axis.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Write every sample as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportContext {
    pub p: usize,
    pub q: usize,
}

/// Machine-readable record of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub context: ReportContext,
    pub results: Vec<Value>,
    pub pass: bool,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    /// Text summary: each result's `text` field, or its name and pass flag.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            if let Some(t) = r.get("text").and_then(Value::as_str) {
                s.push_str(t);
            } else {
                let name = r.get("name").and_then(Value::as_str).unwrap_or("result");
                let flag = match r.get("pass").and_then(Value::as_bool) {
                    Some(true) => "pass",
                    Some(false) => "FAIL",
                    None => "-",
                };
                s.push_str(&format!("{name}: {flag}"));
            }
            s.push('\n');
        }
        if let Some(e) = &self.error {
            s.push_str(&format!("error: {e}\n"));
        }
        s
    }
}

/// Result of a parsed invocation: the report, or a usage failure.
pub enum Outcome {
    Report(RunReport),
    Usage(String),
    /// Help or version text; exit 0.
    Info(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Report(r) if r.pass => 0,
            Outcome::Report(_) => 1,
            Outcome::Usage(_) => 2,
            Outcome::Info(_) => 0,
        }
    }
}

/// Errors that come from the input rather than from the computation.
fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_)
            | Error::Dimension(_)
            | Error::IndexOutOfRange(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::KindMismatch(_)
            | Error::Domain(_)
            | Error::DegreeCap { .. }
            | Error::Unsupported(_)
    )
}

struct Session {
    ctx: SliceContext,
    seed: u64,
    results: Vec<Value>,
    tolerances: BTreeMap<String, f64>,
}

impl Session {
    fn push(&mut self, v: Value) {
        self.results.push(v);
    }

    fn tol(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.to_string(), v);
    }
}

fn floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in {s:?}")))
        })
        .collect()
}

fn parse_unit(ctx: SliceContext, s: Option<&str>) -> Result<SliceUnit> {
    match s {
        None => Ok(ctx.default_eta()),
        Some(s) => match floats(s) {
            Ok(c) => SliceUnit::new(ctx, &c),
            Err(_) => SliceUnit::parse(ctx, s),
        },
    }
}

fn parse_point(ctx: SliceContext, s: &str) -> Result<Point> {
    ctx.point(&floats(s)?)
}

fn parse_center(ctx: SliceContext, s: Option<&str>) -> Result<Vec<f64>> {
    match s {
        None => Ok(vec![0.0; ctx.p() + 1]),
        Some(s) => {
            let c = floats(s)?;
            if c.len() != ctx.p() + 1 {
                return Err(Error::Dimension(format!("center needs {} coordinates", ctx.p() + 1)));
            }
            Ok(c)
        }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&s)?)
}

fn json_ctx(v: &Value) -> Option<(usize, usize)> {
    let g = |k: &str| v.get(k).and_then(Value::as_u64).map(|x| x as usize);
    match (g("p"), g("q")) {
        (Some(p), Some(q)) => Some((p, q)),
        _ => v.get("F1").and_then(json_ctx),
    }
}

/// Function read from JSON, evaluated on full points.
enum Function {
    Stem(StemPolynomial),
    Full(CliffordPolynomial),
}

impl Function {
    fn load(ctx: SliceContext, v: &Value) -> Result<Self> {
        if v.get("F1").is_some() {
            let s = StemPolynomial::from_json(v)?;
            if s.ctx() != ctx {
                return Err(Error::Dimension("stem context differs from --p/--q".into()));
            }
            return Ok(Function::Stem(s));
        }
        let poly = CliffordPolynomial::from_json(v)?;
        if poly.ctx() != ctx {
            return Err(Error::Dimension("polynomial context differs from --p/--q".into()));
        }
        match poly.kind() {
            PolyKind::Full => Ok(Function::Full(poly)),
            PolyKind::Slice => {
                let eta = match v.get("eta") {
                    Some(e) => SliceUnit::new(ctx, &serde_json::from_value::<Vec<f64>>(e.clone())?)?,
                    None => ctx.default_eta(),
                };
                Ok(Function::Stem(extend_from_slice(&poly, &eta, tolerances::POLY_ZERO)?))
            }
        }
    }

    fn eval(&self, x: &Point) -> Result<Multivector> {
        match self {
            Function::Stem(s) => s.induce(x),
            Function::Full(f) => f.evaluate(x.coords()),
        }
    }
}

fn mv_json(m: &Multivector) -> Value {
    json!({"json": m.to_json(), "text": m.to_string()})
}

fn resolve_ctx(cli: &Cli, file: Option<&Value>) -> Result<SliceContext> {
    let from_file = file.and_then(json_ctx);
    let (p, q) = match (from_file, cli.p, cli.q) {
        (Some((p, q)), fp, fq) => {
            if fp.is_some_and(|v| v != p) || fq.is_some_and(|v| v != q) {
                return Err(Error::Dimension(format!("file has (p, q) = ({p}, {q}), flags disagree")));
            }
            (p, q)
        }
        (None, p, q) => (p.unwrap_or(1), q.unwrap_or(2)),
    };
    SliceContext::new(p, q)
}

fn input_file(cmd: &Cmd) -> Option<&Path> {
    match cmd {
        Cmd::Ck(a) => a.function.as_deref(),
        Cmd::Stem(a) => a.check_gsr.as_deref().or(a.induce.as_deref()).or(a.thetabar.as_deref()),
        Cmd::Cauchy(a) => Some(&a.function),
        Cmd::Laurent(a) => Some(&a.function),
        Cmd::Mobius(a) => a.transform.as_deref().or(a.matrix.as_deref()).or(a.check_vahlen.as_deref()),
        Cmd::Maxmod(a) => Some(&a.function),
        _ => None,
    }
}

fn cmd_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Fueter(_) => "fueter",
        Cmd::Ck(_) => "ck",
        Cmd::Stem(_) => "stem",
        Cmd::Kernel(_) => "kernel",
        Cmd::Cauchy(_) => "cauchy",
        Cmd::Laurent(_) => "laurent",
        Cmd::Mobius(_) => "mobius",
        Cmd::Verify(_) => "verify",
        Cmd::Maxmod(_) => "maxmod",
    }
}

/// Parses and executes; never prints.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome::Info(e.to_string())
                }
                _ => Outcome::Usage(e.to_string()),
            }
        }
    };
    let start = Instant::now();
    let command: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let file = match input_file(&cli.cmd).map(read_json).transpose() {
        Ok(f) => f,
        Err(e) => return Outcome::Usage(e.to_string()),
    };
    let ctx = match resolve_ctx(&cli, file.as_ref()) {
        Ok(c) => c,
        Err(e) => return Outcome::Usage(e.to_string()),
    };
    let mut s = Session {
        ctx,
        seed: cli.seed,
        results: Vec::new(),
        tolerances: BTreeMap::new(),
    };
    let res = dispatch(&cli, &mut s, file.as_ref());
    let error = match res {
        Ok(()) => None,
        Err(e) if is_usage(&e) => return Outcome::Usage(format!("{}: {e}", cmd_name(&cli.cmd))),
        Err(e) => Some(e.to_string()),
    };
    let pass = error.is_none()
        && s
            .results
            .iter()
            .all(|r| r.get("pass").and_then(Value::as_bool).unwrap_or(true));
    Outcome::Report(RunReport {
        command,
        context: ReportContext { p: ctx.p(), q: ctx.q() },
        results: s.results,
        pass,
        seed: cli.seed,
        tolerances: s.tolerances,
        elapsed_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
        error,
    })
}

/// Full entry point: parses `args` (program name first), writes the report
/// to stdout or `--out`, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let outcome = execute(args.clone());
    let code = outcome.exit_code();
    match outcome {
        Outcome::Info(s) => print!("{s}"),
        Outcome::Usage(s) => eprintln!("{}", s.trim_end()),
        Outcome::Report(r) => {
            // format and out are read again so a report always honors them
            let cli = Cli::try_parse_from(&args).expect("parsed once already");
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&r).expect("report serializes") + "\n",
                Format::Text => r.to_text(),
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &body) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => {
                    let mut out = std::io::stdout().lock();
                    let _ = out.write_all(body.as_bytes());
                }
            }
            if let Some(e) = &r.error {
                eprintln!("error: {e}");
            }
        }
    }
    code
}

fn dispatch(cli: &Cli, s: &mut Session, file: Option<&Value>) -> Result<()> {
    match &cli.cmd {
        Cmd::Fueter(a) => fueter(s, a),
        Cmd::Ck(a) => ck(s, a, file),
        Cmd::Stem(a) => stem(s, a, file),
        Cmd::Kernel(a) => kernel(s, a),
        Cmd::Cauchy(a) => cauchy(s, a, file.expect("function file")),
        Cmd::Laurent(a) => laurent(s, a, file.expect("function file")),
        Cmd::Mobius(a) => mobius(s, a, file),
        Cmd::Verify(a) => verify(s, a),
        Cmd::Maxmod(a) => maxmod(s, a, file.expect("function file")),
    }
}

fn fueter(s: &mut Session, a: &FueterArgs) -> Result<()> {
    let ctx = s.ctx;
    let k = MultiIndex::parse(&a.k)?;
    if k.len() != ctx.p() + 1 {
        return Err(Error::Dimension(format!("k needs {} entries", ctx.p() + 1)));
    }
    let eta = parse_unit(ctx, a.eta.as_deref())?;
    let side = if a.right { Side::Right } else { Side::Left };
    let table = FueterTable::with_cap(ctx, &eta, side, a.cap)?;
    let pk = table.get(&k)?;
    let op = if a.right {
        OperatorSpec::DOmegaRight(eta.clone())
    } else {
        OperatorSpec::DOmega(eta.clone())
    };
    let residual = apply(&op, &pk)?.max_abs_coeff();
    s.tol("monogenic_residual", a.tol);
    let value = match (&a.eval, &a.at) {
        (Some(e), _) => Some(pk.evaluate(&floats(e)?)?),
        (None, Some(x)) => Some(table.evaluate_full(&k, &parse_point(ctx, x)?)?),
        _ => None,
    };
    let mut r = json!({
        "name": "fueter_polynomial",
        "k": k.to_string(),
        "side": if a.right { "right" } else { "left" },
        "eta": eta.to_string(),
        "polynomial": pk.to_json(),
        "monogenic_residual": residual,
        "pass": residual <= a.tol,
    });
    match value {
        Some(v) => {
            r["value"] = mv_json(&v);
            r["text"] = json!(v.to_string());
        }
        None => r["text"] = json!(pk.to_string()),
    }
    s.push(r);
    Ok(())
}

fn ck(s: &mut Session, a: &CkArgs, file: Option<&Value>) -> Result<()> {
    let ctx = s.ctx;
    let f0 = match (file, &a.monomial) {
        (Some(v), _) => CliffordPolynomial::from_json(v)?,
        (None, Some(k)) => {
            let k = MultiIndex::parse(k)?;
            if k.len() != ctx.p() + 1 {
                return Err(Error::Dimension(format!("k needs {} entries", ctx.p() + 1)));
            }
            let mut e = k.as_slice().to_vec();
            e.push(0);
            CliffordPolynomial::monomial(ctx, PolyKind::Slice, &e, Multivector::one(ctx.n()))?
        }
        (None, None) => return Err(Error::Parse("ck needs --function or --monomial".into())),
    };
    let stem = ck_extension(&f0)?;
    let (r1, r2) = stem.gsr_residual()?;
    let residual = r1.max_abs_coeff().max(r2.max_abs_coeff());
    s.tol("gsr_residual", a.tol);
    let mut r = json!({
        "name": "ck_extension",
        "stem": stem.to_json(),
        "gsr_residual": residual,
        "pass": residual <= a.tol,
        "text": format!("F1 = {}\nF2 = {}", stem.f1(), stem.f2()),
    });
    if let Some(x) = &a.at {
        let v = stem.induce(&parse_point(ctx, x)?)?;
        r["value"] = mv_json(&v);
        r["text"] = json!(v.to_string());
    }
    s.push(r);
    Ok(())
}

fn stem(s: &mut Session, a: &StemArgs, file: Option<&Value>) -> Result<()> {
    let ctx = s.ctx;
    let v = file.ok_or_else(|| Error::Parse("stem needs --check-gsr, --induce or --thetabar".into()))?;
    let st = StemPolynomial::from_json(v)?;
    if a.check_gsr.is_some() {
        let (r1, r2) = st.gsr_residual()?;
        let residual = r1.max_abs_coeff().max(r2.max_abs_coeff());
        s.tol("gsr_residual", a.tol);
        s.push(json!({
            "name": "gsr_check",
            "gsr_residual": residual,
            "residual_1": r1.to_json(),
            "residual_2": r2.to_json(),
            "pass": residual <= a.tol,
            "text": format!("gsr residual {residual:e}: {}", if residual <= a.tol { "GSR" } else { "not GSR" }),
        }));
    }
    let at = || -> Result<Point> {
        let x = a.at.as_deref().ok_or_else(|| Error::Parse("--at is required".into()))?;
        parse_point(ctx, x)
    };
    if a.induce.is_some() {
        let v = st.induce(&at()?)?;
        s.push(json!({"name": "induce", "value": mv_json(&v), "text": v.to_string()}));
    }
    if a.thetabar.is_some() {
        let v = thetabar_on_stem(&st, &at()?)?;
        s.push(json!({"name": "thetabar", "value": mv_json(&v), "text": v.to_string()}));
    }
    Ok(())
}

fn kernel(s: &mut Session, a: &KernelArgs) -> Result<()> {
    let ctx = s.ctx;
    let x = parse_point(ctx, &a.at)?;
    let chosen = [a.e, a.q_kernel, a.slice_cauchy].iter().filter(|b| **b).count();
    if chosen != 1 {
        return Err(Error::Parse("choose exactly one of --E, --Q, --slice-cauchy".into()));
    }
    let (name, v) = if a.e {
        ("E", kernel_e(ctx, &x)?)
    } else if a.q_kernel {
        let k = MultiIndex::parse(a.k.as_deref().ok_or_else(|| Error::Parse("--Q needs --k".into()))?)?;
        if k.len() != ctx.p() + 1 {
            return Err(Error::Dimension(format!("k needs {} entries", ctx.p() + 1)));
        }
        let eta = parse_unit(ctx, a.eta.as_deref())?;
        ("Q_k", QKernelTable::new(ctx, &eta)?.evaluate_full(&k, &x)?)
    } else {
        let y = parse_point(ctx, a.pole.as_deref().ok_or_else(|| Error::Parse("--slice-cauchy needs --pole".into()))?)?;
        let side = if a.right { Side::Right } else { Side::Left };
        ("slice_cauchy", slice_cauchy_kernel(ctx, &y, &x, side)?)
    };
    s.push(json!({"name": name, "value": mv_json(&v), "text": v.to_string()}));
    Ok(())
}

fn cauchy(s: &mut Session, a: &CauchyArgs, file: &Value) -> Result<()> {
    let ctx = s.ctx;
    let f = Function::load(ctx, file)?;
    let eta = parse_unit(ctx, a.slice_eta.as_deref())?;
    let x = parse_point(ctx, &a.at)?;
    let center = parse_center(ctx, a.center.as_deref())?;
    let res = a.quad.resolution(s.seed);
    let rule = build_rule(
        ctx.p(),
        RuleKind::BoundarySphere {
            radius: a.radius,
            center,
        },
        &res,
    )?;
    let tol = a.tol.unwrap_or(if ctx.p() == 0 { 1e-10 } else { tolerances::CAUCHY_REL });
    s.tol("cauchy_scaled_error", tol);
    let (value, stderr) = if a.pompeiu {
        let st = match &f {
            Function::Stem(st) => st,
            Function::Full(_) => return Err(Error::Parse("--pompeiu needs a stem function".into())),
        };
        (cauchy_pompeiu(ctx, st, &rule, &res, &eta, &x)?, None)
    } else {
        let d = cauchy_integral_detailed(ctx, &|y| f.eval(y), &rule, &eta, &x)?;
        (d.value, d.stderr)
    };
    let reference = f.eval(&x)?;
    let abs_err = value.dist(&reference);
    let rel_err = abs_err / (1.0 + reference.norm());
    let pass = rel_err <= tol || stderr.is_some_and(|se| abs_err <= 4.0 * se);
    s.push(json!({
        "name": if a.pompeiu { "cauchy_pompeiu" } else { "cauchy" },
        "value": mv_json(&value),
        "reference": mv_json(&reference),
        "abs_err": abs_err,
        "rel_err": rel_err,
        "stderr": stderr,
        "nodes": rule.nodes().len(),
        "monte_carlo": rule.is_monte_carlo(),
        "pass": pass,
        "text": value.to_string(),
    }));
    Ok(())
}

fn laurent(s: &mut Session, a: &LaurentArgs, file: &Value) -> Result<()> {
    let ctx = s.ctx;
    let f = Function::load(ctx, file)?;
    let eta = parse_unit(ctx, a.eta.as_deref())?;
    let res = a.quad.resolution(s.seed);
    let c = laurent_coefficients(ctx, &|y| f.eval(y), a.rho, &eta, a.max_k, &res)?;
    let table = |m: &BTreeMap<MultiIndex, Multivector>| -> Value {
        Value::Object(m.iter().map(|(k, v)| (k.to_string(), v.to_json())).collect())
    };
    let bmax = c.b.values().map(Multivector::norm).fold(0.0, f64::max);
    s.push(json!({
        "name": "laurent_coefficients",
        "rho": a.rho,
        "max_k": a.max_k,
        "a": table(&c.a),
        "b": table(&c.b),
        "max_b_norm": bmax,
        "text": format!("{} regular and {} principal coefficients, max |b_k| = {bmax:e}", c.a.len(), c.b.len()),
    }));
    if let Some(x) = &a.at {
        let x = parse_point(ctx, x)?;
        let v = laurent_eval(ctx, &c, &x, a.max_k)?;
        let reference = f.eval(&x)?;
        let abs_err = v.dist(&reference);
        let rel_err = abs_err / (1.0 + reference.norm());
        s.tol("laurent_scaled_error", a.tol);
        s.push(json!({
            "name": "laurent_series",
            "value": mv_json(&v),
            "reference": mv_json(&reference),
            "abs_err": abs_err,
            "rel_err": rel_err,
            "pass": rel_err <= a.tol,
            "text": v.to_string(),
        }));
    }
    Ok(())
}

fn mobius(s: &mut Session, a: &MobiusArgs, file: Option<&Value>) -> Result<()> {
    let ctx = s.ctx;
    if let Some(path) = &a.check_vahlen {
        let v = if a.transform.is_none() && a.matrix.is_none() { file.cloned() } else { Some(read_json(path)?) };
        let m = VahlenMatrix::from_json(ctx.n(), &v.expect("matrix file"))?;
        let rep = check_vahlen(&m);
        s.push(json!({
            "name": "check_vahlen",
            "matrix": m.to_json(),
            "report": rep,
            "pass": rep.ok,
            "text": format!("{}: {}", m, if rep.ok { "ok".to_string() } else { format!("fails ({})", rep.failed_condition) }),
        }));
    }
    let m = if let Some(path) = &a.matrix {
        let v = if a.transform.is_none() { file.cloned().expect("matrix file") } else { read_json(path)? };
        Some(VahlenMatrix::from_json(ctx.n(), &v)?)
    } else if !a.generators.is_empty() {
        let mut m = VahlenMatrix::identity(ctx);
        for g in &a.generators {
            m = m.mul(&grav_generator(ctx, GravGenerator::parse(ctx, g)?)?)?;
        }
        Some(m)
    } else {
        None
    };
    let Some(m) = m else {
        if a.check_vahlen.is_none() {
            return Err(Error::Parse("mobius needs --gen, --matrix or --check-vahlen".into()));
        }
        return Ok(());
    };
    s.push(json!({
        "name": "matrix",
        "matrix": m.to_json(),
        "text": m.to_string(),
    }));
    if let Some(x) = &a.apply {
        let x = parse_point(ctx, x)?;
        let y = mobius_apply(&m, &x)?;
        let j = jacobian_weight(&m, &x, ctx.p())?;
        s.push(json!({
            "name": "apply",
            "image": y.coords(),
            "jacobian_weight": mv_json(&j),
            "text": y.to_multivector().to_string(),
        }));
    }
    if a.transform.is_some() {
        let f = Function::load(ctx, file.expect("function file"))?;
        let x = parse_point(ctx, a.at.as_deref().ok_or_else(|| Error::Parse("--transform needs --at".into()))?)?;
        let v = conformal_transform(&m, &|y| f.eval(y), &x)?;
        s.push(json!({"name": "conformal_transform", "value": mv_json(&v), "text": v.to_string()}));
    }
    Ok(())
}

fn verify(s: &mut Session, a: &VerifyArgs) -> Result<()> {
    let opts = SuiteOptions {
        max_deg: a.max_deg,
        samples: a.samples,
        seed: s.seed,
    };
    for c in run_suite(&a.suite, &opts)? {
        s.tol(&c.name, c.tol);
        let text = format!("{}: {} ({:e} <= {:e})", c.name, if c.pass { "pass" } else { "FAIL" }, c.value, c.tol);
        let mut v = serde_json::to_value(&c)?;
        v["text"] = json!(text);
        s.push(v);
    }
    Ok(())
}

fn maxmod(s: &mut Session, a: &MaxmodArgs, file: &Value) -> Result<()> {
    let ctx = s.ctx;
    let f = Function::load(ctx, file)?;
    let eta = parse_unit(ctx, a.eta.as_deref())?;
    let center = parse_center(ctx, a.center.as_deref())?;
    let res = a.quad.resolution(s.seed);
    let rep = max_modulus_scan(ctx, &|y| f.eval(y), &center, a.radius, &eta, a.grid, &res)?;
    if let Some(path) = &a.csv {
        std::fs::write(path, rep.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    let pass = rep.classification == "boundary";
    s.push(json!({
        "name": "max_modulus",
        "interior_max": rep.interior_max,
        "interior_argmax": rep.interior_argmax,
        "boundary_max": rep.boundary_max,
        "boundary_argmax": rep.boundary_argmax,
        "classification": rep.classification,
        "samples": rep.rows.len(),
        "pass": pass,
        "text": format!("max |f| on the boundary {:e}, inside {:e}: {}", rep.boundary_max, rep.interior_max, rep.classification),
    }));
    Ok(())
}
