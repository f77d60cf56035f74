use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use nalab_core::berkovich::{classify_report, DiscChain};
use nalab_core::field::{Field, FrobeniusDirection};
use nalab_core::gauss::{self, GaussParams, ScalingSequence};
use nalab_core::numerics::{parse_rational, ExtRational};
use nalab_core::report::{Check, Report};
use nalab_core::series::{parse_series, HahnSeries};
use nalab_core::verify::verify_report;
use nalab_core::witness::spherical::{self, SeriesEndomorphism, SphericalParams};
use nalab_core::witness::theorem::{self, CoeffMode, TheoremParams};

#[derive(Parser)]
#[command(name = "nalab", version, about = "Exact witnesses for valued fields, Hahn series and Berkovich points")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Directory for reports when --output is not given
    #[arg(long, global = true, env = "NALAB_REPORT_DIR")]
    report_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Disc chain, Frobenius gaps and Kähler bound for the d-sequence construction
    Theorem {
        #[arg(long, default_value_t = 2)]
        p: u64,
        /// Number of approximants N (at least 3); defaults to 10, or to the length of --d
        #[arg(long)]
        n: Option<usize>,
        /// ones | generator-powers[:m]
        #[arg(long, default_value = "ones")]
        coeffs: String,
        /// Comma-separated d_1..d_N instead of the built-in formula
        #[arg(long)]
        d: Option<String>,
    },
    /// Gauss-norm witness for tau(t_n) = t_n - x_n t_{n+1}
    Gauss {
        /// Ground residue characteristic; 0 for the rationals
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Comma-separated exponents e_1..e_{N+1} of x_i = t^{e_i}; default 2^{-i}
        #[arg(long)]
        scaling: Option<String>,
        /// Declared bound on the partial sums of the scaling exponents
        #[arg(long, default_value = "1")]
        bound: String,
    },
    /// Greedy preimage under the endomorphism t -> tau(t) of k((t))
    Spherical {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        /// Work modulo t^precision; exact arithmetic when absent
        #[arg(long)]
        precision: Option<i64>,
    },
    /// Classify a disc chain given as JSON
    Classify {
        #[arg(long)]
        chain: PathBuf,
    },
    /// One series operation
    SeriesCalc {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        degree: u32,
        #[arg(value_enum)]
        op: Op,
        expr: String,
        expr2: Option<String>,
        /// Target precision for invert
        #[arg(long)]
        precision: Option<String>,
    },
    /// Re-check a saved JSON report
    Verify { report: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Normalize,
    Add,
    Sub,
    Mul,
    Invert,
    Frobenius,
    FrobeniusInverse,
    Valuation,
    Distance,
    Derivative,
}

impl Op {
    fn name(self) -> &'static str {
        match self {
            Op::Normalize => "normalize",
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Invert => "invert",
            Op::Frobenius => "frobenius",
            Op::FrobeniusInverse => "frobenius-inverse",
            Op::Valuation => "valuation",
            Op::Distance => "distance",
            Op::Derivative => "derivative",
        }
    }

    fn binary(self) -> bool {
        matches!(self, Op::Add | Op::Sub | Op::Mul | Op::Distance)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Command::Verify { report } = &cli.command {
        return verify(cli, report);
    }
    let report = build_report(&cli.command)?;
    let body = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    emit(cli, &report.witness, &body)?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn build_report(command: &Command) -> Result<Report> {
    Ok(match command {
        Command::Theorem { p, n, coeffs, d } => {
            let mode: CoeffMode = coeffs.parse()?;
            let user_d = d.as_deref().map(parse_int_list).transpose()?;
            let n = n.or(user_d.as_ref().map(Vec::len)).unwrap_or(10);
            theorem::run(&TheoremParams { p: *p, n, mode, user_d })?
        }
        Command::Gauss { p, n, scaling, bound } => {
            let ground = field(*p, 1)?;
            let scaling = match scaling {
                Some(s) => ScalingSequence::new(parse_rational_list(s)?, parse_rational(bound)?)?,
                None => ScalingSequence::dyadic(n + 1),
            };
            gauss::run(&GaussParams { ground, max_n: *n, scaling })?
        }
        Command::Spherical { p, degree, tau, x, steps, precision } => {
            let f = field(*p, *degree)?;
            let tau = SeriesEndomorphism::new(series(tau, &f, "--tau")?);
            let x = series(x, &f, "--x")?;
            spherical::run(&SphericalParams { tau, x, steps: *steps, precision: *precision })?
        }
        Command::Classify { chain } => {
            let text = fs::read_to_string(chain).with_context(|| format!("reading {}", chain.display()))?;
            classify_report(&DiscChain::from_json_str(&text)?)?
        }
        Command::SeriesCalc { p, degree, op, expr, expr2, precision } => {
            series_calc(*p, *degree, *op, expr, expr2.as_deref(), precision.as_deref())?
        }
        Command::Verify { .. } => unreachable!("handled in run"),
    })
}

fn field(p: u64, degree: u32) -> Result<Field> {
    if p == 0 {
        if degree != 1 {
            bail!("the rationals have degree 1");
        }
        return Ok(Field::rationals());
    }
    Ok(Field::galois(p, degree)?)
}

fn series(text: &str, f: &Field, what: &str) -> Result<HahnSeries> {
    parse_series(text, f).with_context(|| format!("{what}: cannot parse {text:?}"))
}

fn parse_int_list(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| anyhow!("not an integer: {x:?}")))
        .collect()
}

fn parse_rational_list(s: &str) -> Result<Vec<BigRational>> {
    s.split(',').map(|x| Ok(parse_rational(x)?)).collect()
}

fn series_calc(
    p: u64,
    degree: u32,
    op: Op,
    expr: &str,
    expr2: Option<&str>,
    precision: Option<&str>,
) -> Result<Report> {
    let f = field(p, degree)?;
    let a = series(expr, &f, "expr")?;
    let b = match (op.binary(), expr2) {
        (true, Some(e)) => Some(series(e, &f, "expr2")?),
        (true, None) => bail!("{} needs two series", op.name()),
        (false, Some(_)) => bail!("{} takes one series", op.name()),
        (false, None) => None,
    };
    let b = b.as_ref();
    let result = match op {
        Op::Normalize => a.to_string(),
        Op::Add => a.checked_add(b.unwrap())?.to_string(),
        Op::Sub => a.checked_sub(b.unwrap())?.to_string(),
        Op::Mul => a.checked_mul(b.unwrap())?.to_string(),
        Op::Invert => {
            let target: ExtRational = match precision {
                Some(s) => s.parse()?,
                None if a.is_exact() && a.terms().len() <= 1 => ExtRational::Infinity,
                None => bail!("invert needs --precision unless the input is an exact monomial"),
            };
            a.invert(&target)?.to_string()
        }
        Op::Frobenius => a.frobenius(FrobeniusDirection::Forward)?.to_string(),
        Op::FrobeniusInverse => a.frobenius(FrobeniusDirection::Inverse)?.to_string(),
        Op::Valuation => a.valuation()?.val().to_string(),
        Op::Distance => a.distance(b.unwrap())?.val().to_string(),
        Op::Derivative => a.derivative()?.to_string(),
    };
    let mut report = Report::new("series-calc").config("field", &f).config("op", op.name());
    let mut check = Check::new("series_eval", op.name(), "single series operation").with("input", &a);
    if let Some(b) = b {
        check = check.with("input2", b);
    }
    report.push(check.with("result", &result).passed_if(true));
    report.derive("result", result);
    Ok(report)
}

fn verify(cli: &Cli, path: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let report = Report::from_json(&text)?;
    let v = verify_report(&report);
    let body = match cli.format {
        Format::Text => v.to_text(),
        Format::Json => {
            let checks: Vec<_> = v
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "outcome": c.outcome.to_string()}))
                .collect();
            let mut s = serde_json::to_string_pretty(&json!({
                "witness": report.witness,
                "checks": checks,
                "verdict_consistent": v.verdict_consistent,
                "schema_ok": v.schema_ok,
                "ok": v.ok(),
            }))?;
            s.push('\n');
            s
        }
    };
    emit(cli, &format!("{}-verify", report.witness), &body)?;
    Ok(if v.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn emit(cli: &Cli, stem: &str, body: &str) -> Result<()> {
    let ext = match cli.format {
        Format::Json => "json",
        Format::Text => "txt",
    };
    let path = match (&cli.output, &cli.report_dir) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            dir.join(format!("{stem}.{ext}"))
        }
        (None, None) => {
            std::io::stdout().write_all(body.as_bytes())?;
            return Ok(());
        }
    };
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
