//! Command-line front end: `verify`, `scan`, `gfun`, `fit`, `table`.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::FieldContext;
use crate::bigo::{default_grid, fit_exponent, geometric_grid};
use crate::characters::character_group;
use crate::error::Error;
use crate::identities::{
    lhs_coefficients, verify, CaseKind, RieszCase, SummationOrder, Theta, TruncationPolicy,
    VerificationReport,
};
use crate::meijer::{g_kernel, g_kernel_bessel_m2, KernelMethod, MeijerKernelSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "riesz", version, about = "Verify Riesz-sum identities for Dedekind-zeta divisor sums")]
#[command(args_override_self = true)]
pub struct Cli {
    /// File of `key=value` lines used as default flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate both sides of one identity at one x.
    Verify {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Verify over a geometric x-range, one row per point.
    Scan {
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate one Meijer G kernel.
    Gfun {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        y: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Error term `LHS - main` over a grid and its growth exponent.
    Fit {
        #[command(flatten)]
        case: CaseArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Left-hand arithmetic coefficients for `n <= max-n`.
    Table {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long = "max-n", default_value_t = 30)]
        max_n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CaseArgs {
    #[arg(long = "case", value_parser = parse_kind)]
    pub kind: CaseKind,
    /// `Q` or `Qsqrt:<d>` with squarefree `d > 1`.
    #[arg(long)]
    pub field: Option<String>,
    /// Fundamental discriminant: the field for t3_* cases, `D` for t5_* and corollary.
    #[arg(long, allow_hyphen_values = true)]
    pub disc: Option<i64>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub h: u64,
    /// Character index `j` modulo `q` (even, nonzero) for t3_1 and t5_1.
    #[arg(long)]
    pub chi: Option<u64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub rho: f64,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    #[arg(long = "x-min")]
    pub x_min: Option<f64>,
    #[arg(long = "x-max")]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Cap on the outer index of double series (raw summation only).
    #[arg(long = "max-m")]
    pub max_m: Option<u64>,
    /// Series cap: frequency cap in smooth mode, index cap in raw mode.
    #[arg(long = "max-n")]
    pub max_n: Option<u64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Sharp truncation instead of the smooth window.
    #[arg(long)]
    pub raw: bool,
    /// Sum `m` innermost in raw double series.
    #[arg(long = "inner-m")]
    pub inner_m: bool,
    /// Include wall-clock time in the JSON report.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<CaseKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Usage errors carry exit code 1, everything numerical exit code 2.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

impl CaseArgs {
    fn field(&self) -> Result<FieldContext, Error> {
        match (&self.field, self.disc) {
            (Some(_), Some(_)) => Err(Error::InvalidArgument("give either --field or --disc, not both".into())),
            (Some(f), None) => parse_field(f),
            (None, Some(d)) => FieldContext::real_quadratic(d),
            (None, None) => Ok(FieldContext::rational()),
        }
    }

    fn disc(&self) -> Result<i64, Error> {
        self.disc
            .ok_or_else(|| Error::InvalidArgument(format!("--disc is required for {}", self.kind)))
    }

    fn q(&self) -> Result<u64, Error> {
        self.q
            .ok_or_else(|| Error::InvalidArgument(format!("--q is required for {}", self.kind)))
    }

    fn theta(&self) -> Result<Theta, Error> {
        Theta::new(self.h, self.q()?)
    }

    fn character(&self) -> Result<crate::characters::DirichletCharacter, Error> {
        let q = self.q()?;
        if !crate::characters::is_prime(q) {
            return Err(Error::InvalidArgument(format!("q must be prime, got {q}")));
        }
        let group = character_group(q)?;
        let j = self.chi.unwrap_or(2);
        group
            .into_iter()
            .find(|c| c.index() == j)
            .ok_or_else(|| Error::InvalidArgument(format!("character index must lie in [0, {}], got {j}", q - 2)))
    }

    pub fn build(&self) -> Result<RieszCase, Error> {
        let rho = self.rho;
        match self.kind {
            CaseKind::Voronoi => Ok(RieszCase::voronoi()),
            CaseKind::Ramanujan => Ok(RieszCase::ramanujan(self.theta()?)),
            CaseKind::T3_1 => RieszCase::t3_1(self.field()?, self.character()?, rho),
            CaseKind::T3_2 => RieszCase::t3_2(self.field()?, rho),
            CaseKind::T3_3 => {
                let theta = self.theta()?;
                RieszCase::t3_3(self.field()?, theta, rho)
            }
            CaseKind::T5_1 => RieszCase::t5_1(self.disc()?, self.character()?, rho),
            CaseKind::T5_2 => RieszCase::t5_2(self.disc()?, rho),
            CaseKind::T5_3 => RieszCase::t5_3(self.disc()?, self.theta()?, rho),
            CaseKind::Corollary => RieszCase::corollary(self.disc()?, self.theta()?, rho),
        }
    }
}

fn parse_field(s: &str) -> Result<FieldContext, Error> {
    if s.eq_ignore_ascii_case("q") {
        return Ok(FieldContext::rational());
    }
    let d = s
        .strip_prefix("Qsqrt:")
        .or_else(|| s.strip_prefix("qsqrt:"))
        .and_then(|d| d.parse::<i64>().ok())
        .ok_or_else(|| Error::InvalidArgument(format!("field must be Q or Qsqrt:<d>, got '{s}'")))?;
    FieldContext::from_radicand(d)
}

impl RunArgs {
    fn policy(&self) -> TruncationPolicy {
        let mut p = if self.raw {
            TruncationPolicy::raw(self.max_m.unwrap_or(512), self.max_n.unwrap_or(512))
        } else {
            TruncationPolicy::default()
        };
        if !self.raw {
            if let Some(n) = self.max_n {
                p.max_n = n;
                p.initial_cap = p.initial_cap.min(n);
            }
        }
        if self.inner_m {
            p.order = SummationOrder::InnerMOuterN;
        }
        p
    }
}

impl RangeArgs {
    fn grid(&self, fallback: Option<Vec<f64>>) -> Result<Vec<f64>, Error> {
        match (self.x_min, self.x_max, fallback) {
            (None, None, Some(g)) if self.points.is_none() => Ok(g),
            (Some(lo), Some(hi), _) => geometric_grid(lo, hi, self.points.unwrap_or(24)),
            _ => Err(Error::InvalidArgument("--x-min and --x-max are required".into())),
        }
    }
}

/// Expands `--config` into flags placed right after the subcommand, so that
/// explicit flags, which come later, take precedence.
fn expand_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let pos = argv.iter().position(|a| a == "--config");
    let Some(pos) = pos else {
        if let Some(p) = argv.iter().position(|a| a.to_string_lossy().starts_with("--config=")) {
            let path = argv[p].to_string_lossy()["--config=".len()..].to_string();
            argv.remove(p);
            return insert_config(argv, &path);
        }
        return Ok(argv);
    };
    let path = argv
        .get(pos + 1)
        .ok_or_else(|| Failure::Usage("--config needs a path".into()))?
        .to_string_lossy()
        .into_owned();
    argv.drain(pos..pos + 2);
    insert_config(argv, &path)
}

fn insert_config(mut argv: Vec<OsString>, path: &str) -> Result<Vec<OsString>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read config {path}: {e}")))?;
    let mut extra = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("{path}:{}: expected key=value", i + 1)))?;
        let (k, v) = (k.trim().trim_start_matches("--"), v.trim());
        if matches!(v, "true" | "") {
            extra.push(OsString::from(format!("--{k}")));
        } else {
            extra.push(OsString::from(format!("--{k}={v}")));
        }
    }
    // argv[0] is the program, argv[1] the subcommand
    let at = 2.min(argv.len());
    argv.splice(at..at, extra);
    Ok(argv)
}

struct Sink<'a> {
    file: Option<fs::File>,
    stdout: &'a mut dyn Write,
}

impl<'a> Sink<'a> {
    fn open(out: &OutArgs, stdout: &'a mut dyn Write) -> Result<Self, Failure> {
        let file = match &out.out {
            Some(p) => Some(fs::File::create(p)?),
            None => None,
        };
        Ok(Sink { file, stdout })
    }

    fn line(&mut self, s: &str) -> io::Result<()> {
        let w: &mut dyn Write = match &mut self.file {
            Some(f) => f,
            None => self.stdout,
        };
        writeln!(w, "{s}")?;
        w.flush()
    }
}

const REPORT_CSV_HEADER: &str = "case,x,rho,lhs,lhs_im,rhs_main,rhs_main_im,series,series_im,residual,tail_estimate,converged";

fn report_csv(r: &VerificationReport) -> String {
    let s = r.last_partial();
    format!(
        "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
        r.case, r.x, r.rho, r.lhs, r.lhs_im, r.rhs_main, r.rhs_main_im, s.re, s.im, r.residual, r.tail_estimate,
        r.converged
    )
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Runs one verification, turning a non-converged result into its report
/// plus a failure flag.
fn verify_one(case: &RieszCase, x: f64, run: &RunArgs) -> Result<(VerificationReport, bool), Failure> {
    match verify(case, x, &run.policy(), run.tol) {
        Ok(r) => {
            let ok = r.converged;
            Ok((r, ok))
        }
        Err(Error::NonConvergence { best: Some(best), .. }) => Ok((*best, false)),
        Err(e) => Err(e.into()),
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify { case, x, run } => {
            let case = case.build()?;
            let (report, ok) = verify_one(&case, x, &run)?;
            let mut sink = Sink::open(&run.out, stdout)?;
            match run.out.format {
                Format::Json => sink.line(&pretty(&report.to_json(run.timing)))?,
                Format::Csv => {
                    sink.line(REPORT_CSV_HEADER)?;
                    sink.line(&report_csv(&report))?;
                }
            }
            if !ok {
                writeln!(stderr, "not converged: residual {:e}", report.residual)?;
            }
            Ok(ok)
        }
        Command::Scan { case, range, run } => {
            let case = case.build()?;
            let grid = range.grid(None)?;
            let mut sink = Sink::open(&run.out, stdout)?;
            let mut all_ok = true;
            let mut rows = Vec::new();
            if run.out.format == Format::Csv {
                sink.line(REPORT_CSV_HEADER)?;
            }
            for x in grid {
                let (report, ok) = verify_one(&case, x, &run)?;
                all_ok &= ok;
                match run.out.format {
                    Format::Csv => sink.line(&report_csv(&report))?,
                    Format::Json => rows.push(report.to_json(run.timing)),
                }
            }
            if run.out.format == Format::Json {
                sink.line(&pretty(&Value::Array(rows)))?;
            }
            Ok(all_ok)
        }
        Command::Gfun { m, rho, y, tol, out } => {
            let spec = MeijerKernelSpec::new(m, rho)?.with_tol(tol);
            let v = g_kernel(&spec, y)?;
            let closed = if m == 2 && rho == 0.0 { Some(g_kernel_bessel_m2(rho, y)?) } else { None };
            let s = |v: f64| Value::String(format!("{v:.16e}"));
            let mut sink = Sink::open(&out, stdout)?;
            match out.format {
                Format::Json => {
                    let body = json!({
                        "m": m,
                        "rho": s(rho),
                        "y": s(y),
                        "value": s(v.value),
                        "est_abs_error": s(v.est_abs_error),
                        "method": match v.method {
                            KernelMethod::MellinBarnes => "mellin_barnes",
                            KernelMethod::BesselClosedForm => "bessel_closed_form",
                        },
                        "bessel_closed_form": closed.map(s),
                    });
                    sink.line(&pretty(&body))?;
                }
                Format::Csv => {
                    sink.line("m,rho,y,value,est_abs_error,bessel_closed_form")?;
                    let c = closed.map_or(String::new(), |c| format!("{c:.16e}"));
                    sink.line(&format!("{m},{rho:.16e},{y:.16e},{:.16e},{:.16e},{c}", v.value, v.est_abs_error))?;
                }
            }
            Ok(true)
        }
        Command::Fit { case, range, out } => {
            let case = case.build()?;
            let grid = range.grid(Some(default_grid()))?;
            let fit = fit_exponent(&case, &grid)?;
            let mut sink = Sink::open(&out, stdout)?;
            match out.format {
                Format::Json => sink.line(&pretty(&fit.to_json()))?,
                Format::Csv => sink.line(fit.to_csv().trim_end())?,
            }
            Ok(true)
        }
        Command::Table { case, max_n, out } => {
            let case = case.build()?;
            let coeffs = lhs_coefficients(&case, max_n)?;
            let base = case.base_table(max_n)?;
            let mut sink = Sink::open(&out, stdout)?;
            match out.format {
                Format::Csv => {
                    sink.line("n,base,coefficient,coefficient_im")?;
                    for n in 1..=max_n {
                        let c = coeffs[n];
                        sink.line(&format!("{n},{},{:.16e},{:.16e}", base[n], c.re, c.im))?;
                    }
                }
                Format::Json => {
                    let rows: Vec<Value> = (1..=max_n)
                        .map(|n| {
                            json!({
                                "n": n,
                                "base": base[n],
                                "coefficient": format!("{:.16e}", coeffs[n].re),
                                "coefficient_im": format!("{:.16e}", coeffs[n].im),
                            })
                        })
                        .collect();
                    sink.line(&pretty(&json!({"case": case.kind.label(), "rows": rows})))?;
                }
            }
            Ok(true)
        }
    }
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn run(argv: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(Failure::Usage(m) | Failure::Numeric(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NONCONVERGENCE,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Numeric(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_NONCONVERGENCE
        }
    }
}
