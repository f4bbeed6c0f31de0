//! `qsv`: run verification suites, evaluate single quantities, list case ids.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsv_core::classical::eval_hyper;
use qsv_core::par::{init_threads_from_env, Execution};
use qsv_core::qcore::{eval_series, SeriesSpec};
use qsv_core::qintegral::{
    q_beta_sides, q_curious_beta_m_sides, q_curious_beta_sides, q_integrate, QBetaParams, QIntegrand,
};
use qsv_core::quadrature::{family_request, BetaFamilyParams};
use qsv_core::suite::{parse_selector, selector_name, Report, ReportFormat, SuiteConfig, REGISTRY};
use qsv_core::{Base, TruncationPolicy};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "qsv", version, about = "Numerical verification of q-series and beta-integral identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded verification cases and report every result.
    Verify(VerifyArgs),
    /// Evaluate one series or integral.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Print every case id with a one-line description.
    List,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated case ids, or `all`.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,
    /// Comma-separated bases in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.5,0.8")]
    q: Vec<f64>,
    /// Samples per case id (per q for ids that use one).
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance override as `id=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_override)]
    tol: Vec<(String, f64)>,
    /// Write the full report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Evaluate cases one at a time.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// A basic (`qphi`) or ordinary (`hyper`) hypergeometric series.
    Series(SeriesArgs),
    /// A Jackson q-integral over [0, 1].
    Qintegral(QIntegralArgs),
    /// A beta-family integral by tanh-sinh quadrature.
    Integral(IntegralArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesKindArg {
    Qphi,
    Hyper,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    kind: SeriesKindArg,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    num: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    den: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum QFunction {
    /// f = 1.
    One,
    /// The q-beta integrand.
    QBeta,
    /// The generalized q-beta integrand with an inner 2phi1.
    QCuriousBeta,
    /// The q-beta-type integrand with an inner terminating 3phi2.
    QCuriousBetaM,
}

#[derive(Args)]
struct QIntegralArgs {
    #[arg(long, value_enum)]
    f: QFunction,
    #[arg(long)]
    q: f64,
    #[command(flatten)]
    params: FamilyArgs,
}

#[derive(Args)]
struct IntegralArgs {
    /// One of: euler, curious, curious-succ, curious-diag, curious-c0,
    /// curious-a0, curious-m, curious-m-limit.
    #[arg(long)]
    selector: String,
    #[command(flatten)]
    params: FamilyArgs,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    e: f64,
    #[arg(long, default_value_t = 0)]
    m: usize,
}

fn parse_override(s: &str) -> Result<(String, f64), String> {
    let (id, v) = s.split_once('=').ok_or_else(|| format!("expected id=value, got {s}"))?;
    let v: f64 = v.parse().map_err(|e| format!("bad tolerance {v}: {e}"))?;
    Ok((id.to_string(), v))
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn evaluation(message: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_FAIL, message: message.to_string() }
}

fn base(q: f64) -> Result<Base, Failure> {
    Base::new(q).map_err(|e| usage(e.to_string()))
}

fn verify(args: VerifyArgs) -> Result<u8, Failure> {
    let q_values = args.q.iter().map(|&q| base(q)).collect::<Result<Vec<_>, _>>()?;
    let suites: Vec<String> = args.suite.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let config = SuiteConfig {
        suites,
        q_values,
        seed: args.seed,
        samples_per_identity: args.samples,
        tol_overrides: args.tol.into_iter().collect::<BTreeMap<_, _>>(),
        report_path: args.report.as_ref().map(|p| p.display().to_string()),
        report_format: match args.format {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        },
        execution: if args.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    config.entries().map_err(|e| usage(e.to_string()))?;
    let report = qsv_core::suite::run_suite(&config).map_err(|e| usage(e.to_string()))?;
    print_summary(&report);
    if let Some(path) = &args.report {
        let body = match config.report_format {
            ReportFormat::Json => report.to_json(),
            ReportFormat::Csv => report.to_csv(),
        };
        write_atomic(path, &body)
            .map_err(|e| Failure { code: EXIT_IO, message: format!("{}: {e}", path.display()) })?;
    }
    Ok(if report.summary.clean() { 0 } else { EXIT_FAIL })
}

fn print_summary(report: &Report) {
    let mut per: BTreeMap<&str, [usize; 4]> = BTreeMap::new();
    for r in &report.results {
        let slot = match r.status.as_str() {
            "pass" => 0,
            "fail" => 1,
            "skipped-pole" => 2,
            _ => 3,
        };
        per.entry(r.id).or_default()[slot] += 1;
    }
    println!("{:<28} {:>6} {:>6} {:>8} {:>9}", "id", "pass", "fail", "skipped", "diverged");
    for e in REGISTRY {
        if let Some(c) = per.get(e.id) {
            println!("{:<28} {:>6} {:>6} {:>8} {:>9}", e.id, c[0], c[1], c[2], c[3]);
        }
    }
    for r in report.results.iter().filter(|r| r.status.is_failure()) {
        let params: Vec<String> = r.params.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!(
            "{} {} [{}] rel_err {:.3e} {}",
            r.status.as_str(),
            r.id,
            params.join(", "),
            r.rel_err,
            r.diagnostic.clone().unwrap_or_default()
        );
    }
    let s = &report.summary;
    println!(
        "total {} pass {} fail {} skipped-pole {} diverged {} in {:.2}s",
        s.total, s.pass, s.fail, s.skipped_pole, s.diverged, report.wall_time_s
    );
}

/// Writes through a sibling temporary file and renames it into place.
fn write_atomic(path: &Path, body: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| std::io::Error::other("report path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

fn family(selector: &str, p: &FamilyArgs) -> Result<BetaFamilyParams, Failure> {
    let selector = parse_selector(selector).ok_or_else(|| {
        let names: Vec<_> = qsv_core::quadrature::BetaSelector::ALL.iter().map(|&s| selector_name(s)).collect();
        usage(format!("unknown selector {selector}; expected one of {}", names.join(", ")))
    })?;
    Ok(BetaFamilyParams { selector, alpha: p.alpha, beta: p.beta, a: p.a, c: p.c, e: p.e, m: p.m })
}

fn eval(cmd: EvalCommand) -> Result<u8, Failure> {
    let policy = TruncationPolicy::default();
    match cmd {
        EvalCommand::Series(s) => {
            let value = match s.kind {
                SeriesKindArg::Qphi => {
                    let spec = SeriesSpec::basic(s.num, s.den, base(s.q)?, s.z).map_err(|e| usage(e.to_string()))?;
                    eval_series(&spec, &policy)
                }
                SeriesKindArg::Hyper => {
                    let spec = SeriesSpec::ordinary(s.num, s.den, s.z).map_err(|e| usage(e.to_string()))?;
                    eval_hyper(&spec, &policy)
                }
            }
            .map_err(evaluation)?;
            println!("value {}", fmt(value.value));
            println!("terms {}", value.terms);
        }
        EvalCommand::Qintegral(args) => {
            let q = base(args.q)?;
            let p = &args.params;
            let (value, closed) = match args.f {
                QFunction::One => {
                    let one = QIntegrand::new("one", |_| Ok(1.0));
                    (q_integrate(&one, q, &policy).map_err(evaluation)?, Some(1.0))
                }
                QFunction::QBeta => {
                    let (v, c) = q_beta_sides(p.alpha, p.beta, q, &policy).map_err(evaluation)?;
                    (v, Some(c))
                }
                QFunction::QCuriousBeta => {
                    let qp = QBetaParams::curious(p.alpha, p.beta, p.a, p.c, q);
                    let (v, c) = q_curious_beta_sides(&qp, &policy).map_err(evaluation)?;
                    (v, Some(c))
                }
                QFunction::QCuriousBetaM => {
                    let qp = QBetaParams::curious_m(p.beta, p.a, p.c, p.e, p.m, q);
                    let (v, c) = q_curious_beta_m_sides(&qp, &policy).map_err(evaluation)?;
                    (v, Some(c))
                }
            };
            println!("value {}", fmt(value.value));
            println!("terms {}", value.terms);
            if let Some(c) = closed {
                println!("closed_form {}", fmt(c));
            }
        }
        EvalCommand::Integral(args) => {
            let p = family(&args.selector, &args.params)?;
            let integral = family_request(&p).map_err(evaluation)?;
            let v = integral.evaluate().map_err(evaluation)?;
            println!("value {}", fmt(v.value));
            println!("error {}", fmt(v.error));
            println!("evaluations {}", v.evaluations);
            println!("closed_form {}", fmt(integral.closed_form));
        }
    }
    Ok(0)
}

fn fmt(x: f64) -> String {
    qsv_core::suite::fmt_num(x)
}

fn list() {
    for e in REGISTRY {
        println!("{:<28} {:<12} {}", e.id, e.group.to_string(), e.description);
    }
}

fn main() -> ExitCode {
    init_threads_from_env();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => verify(args),
        Command::Eval(cmd) => eval(cmd),
        Command::List => {
            list();
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
