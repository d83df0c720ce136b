//! `ksum`: Kloosterman sums, their polynomials, Gauss sums, the p-adic gamma
//! function and verification sweeps from the command line.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use kloosterman::kloos::{CheckId, KloosEngine, KloostermanValue};
use kloosterman::padic::{gamma_p, gauss_gk, gauss_sq_mod27, weight_p, GammaArg, PadicInt, UnramCtx};
use kloosterman::verify::{parse_element, FieldSpec, RecordMode};
use kloosterman::{emit_report, parse_field_spec, run_verification, FFElem, FieldCtx, ReportFormat, Scope, VerificationJob};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ksum", version, about = "Kloosterman sums over finite fields as cyclotomic integers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate K_q(a) exactly in Z[zeta_p].
    Kloosterman {
        #[command(flatten)]
        field: FieldArg,
        #[command(flatten)]
        scope: ElementScope,
        #[command(flatten)]
        output: Output,
    },
    /// Minimal polynomial of K_q(a) over Q, with its multiplicity in the characteristic polynomial.
    Minpoly {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long = "a", value_name = "COORDS")]
        a: String,
        #[command(flatten)]
        output: Output,
    },
    /// Characteristic polynomial prod_i (x - K_q(i^2 a)), i = 1..(p-1)/2.
    Charpoly {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long = "a", value_name = "COORDS")]
        a: String,
        #[command(flatten)]
        output: Output,
    },
    /// Gauss sum g(j) via Gross-Koblitz, as pi^e (-p)^k u.
    Gauss {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long = "j", value_name = "INDEX")]
        j: u64,
        #[arg(long, default_value_t = 3)]
        precision: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Morita's p-adic gamma function mod p^precision.
    Gamma {
        #[arg(long)]
        p: u64,
        /// Integer argument.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "frac", required_unless_present = "frac")]
        x: Option<i64>,
        /// Fractional argument m/d with p not dividing d.
        #[arg(long, value_name = "M/D")]
        frac: Option<String>,
        #[arg(long, default_value_t = 3)]
        precision: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Value distribution of K_q over the whole field, with the checksum sum_a K_q(a) = q.
    Spectrum {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run a named check over the field (or one element, exponent or sample).
    Verify {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long)]
        check: CheckId,
        #[command(flatten)]
        scope: ElementScope,
        /// Single Gauss sum index, for checks over exponents.
        #[arg(long = "j", value_name = "INDEX", conflicts_with_all = ["a", "all", "sample"])]
        j: Option<u64>,
        /// Worker count; 0 uses the available parallelism.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        precision: Option<u32>,
        /// Only write failing cases in json-lines and csv output.
        #[arg(long)]
        failures_only: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct FieldArg {
    /// p=<int>,n=<int>[,mod=c0,...,cn]
    #[arg(long, value_name = "SPEC")]
    field: String,
}

#[derive(Args)]
struct ElementScope {
    /// Element coordinates, constant term first.
    #[arg(long = "a", value_name = "COORDS", conflicts_with_all = ["all", "sample"])]
    a: Option<String>,
    #[arg(long)]
    all: bool,
    #[arg(long, value_name = "COUNT", requires = "seed", conflicts_with = "all")]
    sample: Option<u64>,
    #[arg(long, requires = "sample")]
    seed: Option<u64>,
}

#[derive(Args)]
struct Output {
    #[arg(long, default_value = "summary", value_name = "json-lines|csv|summary")]
    format: ReportFormat,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

/// A usage or configuration problem; reported with exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn open_output(output: &Output) -> Result<Box<dyn Write>, Usage> {
    Ok(match &output.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn field_of(arg: &FieldArg) -> Result<(FieldSpec, FieldCtx), Usage> {
    let spec = parse_field_spec(&arg.field).map_err(|e| Usage(format!("--field: {e}")))?;
    let ctx = spec.build()?;
    Ok((spec, ctx))
}

fn element_of(ctx: &FieldCtx, text: &str) -> Result<FFElem, Usage> {
    parse_element(ctx, text).map_err(|e| Usage(format!("--a: {e}")))
}

fn scope_of(scope: &ElementScope, j: Option<u64>) -> Result<Scope, Usage> {
    Ok(match (scope, j) {
        (_, Some(j)) => Scope::Exponent(j),
        (ElementScope { a: Some(a), .. }, _) => {
            let coords = a
                .split(',')
                .map(|t| t.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Usage(format!("--a: cannot parse `{a}` as coordinates")))?;
            Scope::Element(coords)
        }
        (ElementScope { sample: Some(count), seed: Some(seed), .. }, _) => Scope::Sample { count: *count, seed: *seed },
        (ElementScope { all: true, .. }, _) => Scope::All,
        _ => return Err(Usage("choose a scope: --all, --a <coords>, --sample <count> --seed <int> or --j <index>".into())),
    })
}

fn coords_text(c: &[u64]) -> String {
    c.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn value_text(k: &KloostermanValue) -> String {
    k.as_integer().map_or_else(|| k.value().to_string(), |v| v.to_string())
}

/// Six-decimal real value, without a negative zero from rounding noise.
fn real_text(k: &KloostermanValue) -> String {
    let r = (k.to_f64() * 1e6).round() / 1e6 + 0.0;
    format!("{r:.6}")
}

fn single_only(format: ReportFormat) -> Result<(), Usage> {
    if format == ReportFormat::Csv {
        return Err(Usage("csv output is only available for element tables and sweeps".into()));
    }
    Ok(())
}

fn run(command: Command) -> Result<ExitCode, Usage> {
    match command {
        Command::Kloosterman { field, scope, output } => {
            let (_, ctx) = field_of(&field)?;
            let elements: Vec<FFElem> = match scope_of(&scope, None)? {
                Scope::Element(_) => vec![element_of(&ctx, scope.a.as_deref().unwrap_or_default())?],
                Scope::All => ctx.elements().collect(),
                Scope::Sample { .. } => return Err(Usage("kloosterman takes --a or --all; sample through verify".into())),
                Scope::Exponent(_) => unreachable!("no --j on this subcommand"),
            };
            let engine = KloosEngine::new(&ctx);
            let mut out = open_output(&output)?;
            let mut csv = (output.format == ReportFormat::Csv).then(|| csv::Writer::from_writer(Vec::new()));
            if let Some(w) = csv.as_mut() {
                w.write_record(["a", "value", "counts", "real"])?;
            }
            for a in &elements {
                let k = engine.kloosterman(a);
                let a_text = coords_text(a.coeffs());
                match output.format {
                    ReportFormat::Summary => writeln!(out, "a={a_text} K={} ~ {}", value_text(&k), real_text(&k))?,
                    ReportFormat::JsonLines => {
                        let record = json!({
                            "a": a.coeffs(),
                            "value": value_text(&k),
                            "counts": k.counts(),
                            "real": k.to_f64(),
                        });
                        writeln!(out, "{record}")?;
                    }
                    ReportFormat::Csv => csv.as_mut().expect("csv writer").write_record([
                        a_text,
                        value_text(&k),
                        coords_text(k.counts()),
                        real_text(&k),
                    ])?,
                }
            }
            if let Some(w) = csv {
                out.write_all(&w.into_inner().map_err(|e| Usage(e.to_string()))?)?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Minpoly { field, a, output } => {
            single_only(output.format)?;
            let (_, ctx) = field_of(&field)?;
            let a = element_of(&ctx, &a)?;
            let result = KloosEngine::new(&ctx).min_poly(&a)?;
            let mut out = open_output(&output)?;
            if output.format == ReportFormat::JsonLines {
                let record = json!({
                    "a": a.coeffs(),
                    "min_poly": result.min_poly.to_string(),
                    "multiplicity": result.multiplicity,
                    "char_poly": result.char_poly.to_string(),
                });
                writeln!(out, "{record}")?;
            } else {
                writeln!(out, "min_poly {}", result.min_poly)?;
                writeln!(out, "multiplicity {}", result.multiplicity)?;
                writeln!(out, "char_poly {}", result.char_poly)?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Charpoly { field, a, output } => {
            single_only(output.format)?;
            let (_, ctx) = field_of(&field)?;
            let a = element_of(&ctx, &a)?;
            let poly = KloosEngine::new(&ctx).char_poly(&a)?;
            let mut out = open_output(&output)?;
            if output.format == ReportFormat::JsonLines {
                writeln!(out, "{}", json!({ "a": a.coeffs(), "char_poly": poly.to_string() }))?;
            } else {
                writeln!(out, "char_poly {poly}")?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gauss { field, j, precision, output } => {
            single_only(output.format)?;
            let (_, ctx) = field_of(&field)?;
            let uctx = UnramCtx::new(&ctx, precision)?;
            let g = gauss_gk(&uctx, j)?;
            let square = if ctx.p() == 3 && ctx.n() >= 3 { Some(gauss_sq_mod27(&uctx, j)?.residue()) } else { None };
            let weight = weight_p(j, ctx.p());
            let mut out = open_output(&output)?;
            if output.format == ReportFormat::JsonLines {
                let record = json!({
                    "j": j,
                    "weight": weight,
                    "pi_exponent": g.pi_exponent,
                    "p_power": g.p_power,
                    "unit": g.unit.coords(),
                    "modulus": uctx.modulus(),
                    "square_mod27": square,
                });
                writeln!(out, "{record}")?;
            } else {
                writeln!(
                    out,
                    "g({j}) = pi^{} (-{})^{} u, weight {weight}, u = [{}] mod {}",
                    g.pi_exponent,
                    ctx.p(),
                    g.p_power,
                    coords_text(g.unit.coords()),
                    uctx.modulus()
                )?;
                if let Some(s) = square {
                    writeln!(out, "g({j})^2 mod 27 = {s}")?;
                }
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gamma { p, x, frac, precision, output } => {
            single_only(output.format)?;
            let arg = match (x, frac) {
                (Some(x), _) => PadicInt::new(p, precision, x as i128)?,
                (None, Some(f)) => {
                    let (m, d) = f.split_once('/').ok_or_else(|| Usage(format!("--frac: expected M/D, found `{f}`")))?;
                    let m: u64 = m.trim().parse().map_err(|_| Usage(format!("--frac: bad numerator `{m}`")))?;
                    let d: u64 = d.trim().parse().map_err(|_| Usage(format!("--frac: bad denominator `{d}`")))?;
                    GammaArg::fractional(m, d, p, precision)?.residue
                }
                (None, None) => unreachable!("clap requires --x or --frac"),
            };
            let g = gamma_p(&arg);
            let mut out = open_output(&output)?;
            if output.format == ReportFormat::JsonLines {
                let record = json!({
                    "p": p,
                    "precision": precision,
                    "argument": arg.residue(),
                    "gamma": g.residue(),
                    "modulus": g.modulus(),
                });
                writeln!(out, "{record}")?;
            } else {
                writeln!(out, "Gamma_{p}({}) = {} mod {}", arg.residue(), g.residue(), g.modulus())?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum { field, jobs, output } => {
            let (spec, _) = field_of(&field)?;
            let job = VerificationJob::new(spec, CheckId::Spectrum, Scope::All).with_jobs(jobs);
            sweep(&job, &output, RecordMode::Cases)
        }
        Command::Verify { field, check, scope, j, jobs, precision, failures_only, output } => {
            let (spec, ctx) = field_of(&field)?;
            let scope = scope_of(&scope, j)?;
            if let Scope::Element(coords) = &scope {
                ctx.element(coords).map_err(|e| Usage(format!("--a: {e}")))?;
            }
            let mut job = VerificationJob::new(spec, check, scope).with_jobs(jobs);
            if let Some(k) = precision {
                job = job.with_precision(k);
            }
            let mode = if failures_only { RecordMode::Failures } else { RecordMode::Cases };
            sweep(&job, &output, mode)
        }
    }
}

fn sweep(job: &VerificationJob, output: &Output, mode: RecordMode) -> Result<ExitCode, Usage> {
    job.validate()?;
    let start = Instant::now();
    let report = run_verification(job)?;
    let mut out = open_output(output)?;
    emit_report(&report, output.format, mode, &mut out)?;
    out.flush()?;
    eprintln!(
        "{} {} over {}: {} cases, {} failures, {:.3}s",
        job.check,
        job.scope,
        job.field,
        report.total,
        report.failure_count(),
        start.elapsed().as_secs_f64()
    );
    Ok(ExitCode::from(report.exit_code() as u8))
}
