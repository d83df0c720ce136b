//! Verification sweeps: run one check over a field (or a sample of it) on a
//! fixed number of workers and collect a deterministic report.
//!
//! The element domain is cut into contiguous index blocks, one per worker.
//! Results are merged in index order, so the emitted report does not depend
//! on the worker count. Wall time is kept on the report but never written
//! into the formatted output.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cyclo::CycInt;
use crate::ff::{make_field, FFElem, FieldCtx, FieldError};
use crate::kloos::{weil_report, CheckId, CongruenceReport, KloosEngine, KloosError, SpectrumKey, Witness};
use crate::padic::{
    fourier_kloosterman_mod, identity_check, stickelberger_check, teich_check, teich_table, wt1_check,
    FourierCheck, PadicError, TernarySubsets, UnramCtx, UnramElem,
};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Kloos(#[from] KloosError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("check `{check}` is incompatible with this job: {reason}")]
    Incompatible { check: CheckId, reason: String },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("writing report: {0}")]
    Io(#[from] std::io::Error),
    #[error("writing report: {0}")]
    Csv(#[from] csv::Error),
}

/// A parse failure in a field spec or element literal, with the 1-based
/// column where it was detected.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct SpecError {
    pub column: usize,
    pub message: String,
}

fn spec_err(column: usize, message: impl Into<String>) -> SpecError {
    SpecError { column, message: message.into() }
}

/// Parsed `p=<int>,n=<int>[,mod=c0,...,cn]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldSpec {
    pub p: u64,
    pub n: usize,
    pub modulus: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn build(&self) -> Result<FieldCtx, FieldError> {
        make_field(self.p, self.n, self.modulus.as_deref())
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p={},n={}", self.p, self.n)?;
        if let Some(m) = &self.modulus {
            let parts: Vec<String> = m.iter().map(u64::to_string).collect();
            write!(f, ",mod={}", parts.join(","))?;
        }
        Ok(())
    }
}

pub fn parse_field_spec(text: &str) -> Result<FieldSpec, SpecError> {
    let mut p = None;
    let mut n = None;
    let mut modulus: Option<Vec<u64>> = None;
    let mut in_mod = false;
    let mut column = 1;
    for token in text.split(',') {
        let trimmed = token.trim();
        let parse_num = |s: &str, col: usize| -> Result<u64, SpecError> {
            s.trim().parse::<u64>().map_err(|_| spec_err(col, format!("expected a nonnegative integer, found `{}`", s.trim())))
        };
        if let Some((key, value)) = trimmed.split_once('=') {
            let value_col = column + token.find('=').unwrap() + 1;
            match key.trim() {
                "p" if p.is_none() => p = Some(parse_num(value, value_col)?),
                "n" if n.is_none() => n = Some(parse_num(value, value_col)? as usize),
                "mod" if modulus.is_none() => {
                    modulus = Some(vec![parse_num(value, value_col)?]);
                    in_mod = true;
                }
                "p" | "n" | "mod" => return Err(spec_err(column, format!("duplicate key `{}`", key.trim()))),
                other => return Err(spec_err(column, format!("unknown key `{other}`"))),
            }
            if key.trim() != "mod" {
                in_mod = false;
            }
        } else if in_mod {
            modulus.as_mut().unwrap().push(parse_num(token, column)?);
        } else {
            return Err(spec_err(column, format!("expected `key=value`, found `{trimmed}`")));
        }
        column += token.len() + 1;
    }
    let p = p.ok_or_else(|| spec_err(1, "missing `p=`"))?;
    let n = n.ok_or_else(|| spec_err(1, "missing `n=`"))?;
    if p == 2 || !crate::arith::is_prime(p) {
        return Err(spec_err(text.find("p=").map_or(1, |i| i + 3), format!("p = {p} is not an odd prime")));
    }
    if n == 0 {
        return Err(spec_err(text.find("n=").map_or(1, |i| i + 3), "n must be at least 1"));
    }
    if let Some(m) = &modulus {
        let col = text.find("mod=").map_or(1, |i| i + 5);
        if m.len() != n + 1 {
            return Err(spec_err(col, format!("modulus needs {} coefficients for degree {n}, got {}", n + 1, m.len())));
        }
        if let Some(bad) = m.iter().find(|&&c| c >= p) {
            return Err(spec_err(col, format!("coefficient {bad} is not a residue mod {p}")));
        }
    }
    Ok(FieldSpec { p, n, modulus })
}

/// Parses comma-separated coordinates, constant term first.
pub fn parse_element(ctx: &FieldCtx, text: &str) -> Result<FFElem, VerifyError> {
    let mut coords = Vec::new();
    let mut column = 1;
    for token in text.split(',') {
        let v = token
            .trim()
            .parse::<u64>()
            .map_err(|_| spec_err(column, format!("expected a coordinate, found `{}`", token.trim())))?;
        coords.push(v);
        column += token.len() + 1;
    }
    Ok(ctx.element(&coords)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Element(Vec<u64>),
    Exponent(u64),
    Sample { count: u64, seed: u64 },
}

impl std::fmt::Display for Scope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scope::All => f.write_str("all"),
            Scope::Element(c) => {
                let parts: Vec<String> = c.iter().map(u64::to_string).collect();
                write!(f, "a={}", parts.join(","))
            }
            Scope::Exponent(j) => write!(f, "j={j}"),
            Scope::Sample { count, seed } => write!(f, "sample={count},seed={seed}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationJob {
    pub field: FieldSpec,
    pub check: CheckId,
    pub scope: Scope,
    /// Worker count; `0` means the available parallelism.
    pub jobs: usize,
    pub precision: Option<u32>,
}

impl VerificationJob {
    pub fn new(field: FieldSpec, check: CheckId, scope: Scope) -> Self {
        Self { field, check, scope, jobs: 0, precision: None }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = Some(precision);
        self
    }

    /// Default p-adic precision for the check, overridable per job.
    pub fn effective_precision(&self) -> u32 {
        self.precision.unwrap_or(match self.check {
            CheckId::Stickelberger => 2,
            _ => 3,
        })
    }

    fn exponent_domain(&self) -> bool {
        matches!(self.check, CheckId::Stickelberger | CheckId::Wt1)
    }

    /// Field/check/precision compatibility, checked before any work.
    pub fn validate(&self) -> Result<(), VerifyError> {
        let (p, n) = (self.field.p, self.field.n);
        let incompatible = |reason: &str| Err(VerifyError::Incompatible { check: self.check, reason: reason.into() });
        let ternary_cube = p == 3 && n >= 3;
        match self.check {
            CheckId::Mod9 if !(p == 3 && n >= 2) => return incompatible("needs p = 3 and n >= 2"),
            CheckId::Mod27 | CheckId::Fourier | CheckId::Wt1 | CheckId::Identities if !ternary_cube => {
                return incompatible("needs p = 3 and n >= 3")
            }
            _ => {}
        }
        let precision = self.effective_precision();
        let needed = match self.check {
            CheckId::Fourier | CheckId::Wt1 | CheckId::Identities => 3,
            CheckId::Stickelberger => 1,
            _ => 0,
        };
        if precision < needed {
            return incompatible(&format!("precision {precision} is below the required {needed} digits"));
        }
        match (&self.scope, self.exponent_domain()) {
            (Scope::Element(_), true) => return incompatible("ranges over Gauss sum indices; use an exponent scope"),
            (Scope::Exponent(_), false) => return incompatible("ranges over field elements; use an element scope"),
            (Scope::Exponent(j), true) => {
                let max = crate::arith::checked_pow(p, n as u32).unwrap_or(u64::MAX) - 2;
                if *j == 0 || *j > max {
                    return incompatible(&format!("j = {j} outside [1, {max}]"));
                }
            }
            _ => {}
        }
        if self.check == CheckId::Spectrum && self.scope != Scope::All {
            return incompatible("the spectrum is a whole-field aggregate; use --all");
        }
        Ok(())
    }
}

/// The checksum line `sum_a K_q(a) = q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Checksum {
    pub sum: String,
    pub q: u64,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub field: FieldSpec,
    pub check: CheckId,
    pub scope: Scope,
    pub precision: u32,
    /// Number of domain points visited.
    pub total: u64,
    /// Every report, ordered by domain index.
    pub cases: Vec<CongruenceReport>,
    /// Residue histogram of the primary check's `lhs`, for modular checks.
    pub histogram: Option<BTreeMap<i64, u64>>,
    pub checksum: Option<Checksum>,
    pub spectrum: Option<BTreeMap<SpectrumKey, u64>>,
    pub wall_time: Duration,
}

impl SweepReport {
    pub fn failures(&self) -> impl Iterator<Item = &CongruenceReport> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn failure_count(&self) -> usize {
        self.failures().count()
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }

    /// Process exit code: 0 when every case passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

struct SweepState<'a> {
    ctx: &'a FieldCtx,
    engine: KloosEngine<'a>,
    uctx: Option<UnramCtx>,
    ternary: Option<TernarySubsets>,
    teich: Option<Vec<UnramElem>>,
}

struct CaseResult {
    reports: Vec<CongruenceReport>,
    value: Option<CycInt>,
}

fn domain(job: &VerificationJob, ctx: &FieldCtx) -> Vec<u64> {
    let (lo, hi) = if job.exponent_domain() { (1, ctx.q() - 1) } else { (0, ctx.q()) };
    match &job.scope {
        Scope::All => (lo..hi).collect(),
        Scope::Element(coords) => vec![coords.iter().rev().fold(0, |acc, &c| acc * ctx.p() + c)],
        Scope::Exponent(j) => vec![*j],
        Scope::Sample { count, seed } => {
            let size = hi - lo;
            let amount = (*count).min(size) as usize;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut picked: Vec<u64> = rand::seq::index::sample(&mut rng, size as usize, amount)
                .into_iter()
                .map(|i| lo + i as u64)
                .collect();
            picked.sort_unstable();
            picked
        }
    }
}

/// Runs a job to completion.
pub fn run_verification(job: &VerificationJob) -> Result<SweepReport, VerifyError> {
    let start = Instant::now();
    job.validate()?;
    let ctx = job.field.build()?;
    if let Scope::Element(coords) = &job.scope {
        ctx.element(coords)?;
    }
    let precision = job.effective_precision();
    let needs_padic = matches!(
        job.check,
        CheckId::Stickelberger | CheckId::Wt1 | CheckId::Fourier | CheckId::Identities
    );
    let uctx = if needs_padic { Some(UnramCtx::new(&ctx, precision)?) } else { None };
    let ternary = if job.check == CheckId::Identities { Some(TernarySubsets::new(&ctx)?) } else { None };
    let teich = match (&uctx, job.check) {
        (Some(u), CheckId::Identities) => Some(teich_table(u, &ctx)),
        _ => None,
    };
    let state = SweepState { ctx: &ctx, engine: KloosEngine::new(&ctx), uctx, ternary, teich };
    let fourier = match (job.check, &state.uctx) {
        (CheckId::Fourier, Some(u)) => Some(FourierCheck::new(u, &ctx)?),
        _ => None,
    };

    let points = domain(job, &ctx);
    let workers = if job.jobs == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        job.jobs
    };
    let block = points.len().div_ceil(workers).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| VerifyError::Pool(e.to_string()))?;
    let results: Vec<Vec<CaseResult>> = pool.install(|| {
        points
            .par_chunks(block)
            .map(|chunk| {
                chunk
                    .iter()
                    .map(|&idx| evaluate(job, &state, fourier.as_ref(), idx))
                    .collect::<Result<Vec<_>, VerifyError>>()
            })
            .collect::<Result<Vec<_>, VerifyError>>()
    })?;
    let results: Vec<CaseResult> = results.into_iter().flatten().collect();

    let mut cases: Vec<CongruenceReport> = Vec::new();
    let mut histogram = BTreeMap::new();
    let mut spectrum: BTreeMap<SpectrumKey, u64> = BTreeMap::new();
    let with_histogram = matches!(job.check, CheckId::Thm1 | CheckId::Mod9 | CheckId::Mod27 | CheckId::Fourier | CheckId::Wt1);
    for r in &results {
        if with_histogram {
            if let Some(first) = r.reports.first() {
                *histogram.entry(first.lhs).or_insert(0u64) += 1;
            }
        }
        if let Some(v) = &r.value {
            *spectrum.entry(SpectrumKey::of(v)).or_insert(0) += 1;
        }
        cases.extend(r.reports.iter().cloned());
    }

    let full_field = job.scope == Scope::All && !job.exponent_domain();
    let checksum = full_field.then(|| {
        let sum = crate::kloos::spectrum_checksum(ctx.p(), &spectrum);
        let ok = sum == CycInt::from_int(ctx.p(), ctx.q());
        cases.push(CongruenceReport::new(
            CheckId::Spectrum,
            i64::from(!ok),
            0,
            None,
            Witness::Field,
        ));
        Checksum { sum: sum.to_string(), q: ctx.q(), ok }
    });
    if job.check == CheckId::Spectrum {
        let zero_count = spectrum.get(&SpectrumKey::of(&CycInt::zero(ctx.p()))).copied().unwrap_or(0);
        cases.push(CongruenceReport::new(CheckId::Spectrum, i64::from(zero_count == 0), 0, None, Witness::Field));
        if ctx.p() == 3 && ctx.n() > 1 {
            let bad = spectrum
                .keys()
                .filter(|k| !matches!(k, SpectrumKey::Integer(v) if v % 3 == BigInt::from(0)))
                .count() as i64;
            cases.push(CongruenceReport::new(CheckId::Spectrum, bad, 0, None, Witness::Field));
        }
    }

    Ok(SweepReport {
        field: job.field.clone(),
        check: job.check,
        scope: job.scope.clone(),
        precision,
        total: points.len() as u64,
        cases,
        histogram: with_histogram.then_some(histogram),
        checksum,
        spectrum: (job.check == CheckId::Spectrum).then_some(spectrum),
        wall_time: start.elapsed(),
    })
}

fn evaluate(
    job: &VerificationJob,
    st: &SweepState<'_>,
    fourier: Option<&FourierCheck<'_>>,
    idx: u64,
) -> Result<CaseResult, VerifyError> {
    let uctx = || st.uctx.as_ref().expect("p-adic context built for this check");
    if job.exponent_domain() {
        let report = match job.check {
            CheckId::Stickelberger => stickelberger_check(uctx(), idx)?,
            _ => wt1_check(uctx(), idx)?,
        };
        return Ok(CaseResult { reports: vec![report], value: None });
    }
    let a = st.ctx.from_index(idx);
    let engine = &st.engine;
    let mut reports = match job.check {
        CheckId::Thm1 => vec![engine.check_thm1(&a)?],
        CheckId::Mod9 => vec![engine.check_mod9(&a)?],
        CheckId::Mod27 => vec![engine.check_mod27(&a)?],
        CheckId::Moisio => vec![engine.check_moisio(&a)?],
        CheckId::Wan => vec![engine.check_wan(&a)?],
        CheckId::Fourier => {
            fourier_kloosterman_mod(fourier.expect("fourier context built"), engine, &a)?.to_vec()
        }
        CheckId::Identities => {
            let sets = st.ternary.as_ref().expect("subsets built");
            let table = st.teich.as_ref().expect("teichmuller table built");
            vec![
                identity_check(uctx(), st.ctx, sets, &a)?,
                teich_check(uctx(), st.ctx, table, &a),
            ]
        }
        CheckId::Weil | CheckId::Spectrum => Vec::new(),
        CheckId::Stickelberger | CheckId::Wt1 => unreachable!("exponent-domain checks handled above"),
    };
    // Every element sweep also carries the Weil bound and feeds the checksum.
    let k = engine.kloosterman(&a);
    reports.push(weil_report(st.ctx, &k, Witness::element(&a)));
    Ok(CaseResult { reports, value: Some(k.value().clone()) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    JsonLines,
    Csv,
    Summary,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json-lines" | "jsonl" => Ok(ReportFormat::JsonLines),
            "csv" => Ok(ReportFormat::Csv),
            "summary" => Ok(ReportFormat::Summary),
            other => Err(format!("unknown format `{other}` (expected json-lines, csv or summary)")),
        }
    }
}

/// Which cases go into json-lines and csv output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RecordMode {
    #[default]
    Cases,
    Failures,
}

#[derive(Serialize)]
struct JsonHeader {
    record: &'static str,
    field: String,
    check: CheckId,
    scope: String,
    precision: u32,
}

#[derive(Serialize)]
struct JsonCase<'a> {
    record: &'static str,
    #[serde(flatten)]
    case: &'a CongruenceReport,
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    record: &'static str,
    pass: bool,
    total: u64,
    reports: usize,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checksum: Option<&'a Checksum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<BTreeMap<String, u64>>,
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Element(c) => c.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
        Witness::Exponent(j) => format!("j={j}"),
        Witness::Field => "field".into(),
    }
}

/// Writes the report. Output depends only on the job and its results.
pub fn emit_report(
    report: &SweepReport,
    format: ReportFormat,
    mode: RecordMode,
    out: &mut dyn Write,
) -> Result<(), VerifyError> {
    let selected = report.cases.iter().filter(|c| mode == RecordMode::Cases || !c.pass);
    match format {
        ReportFormat::JsonLines => {
            let header = JsonHeader {
                record: "job",
                field: report.field.to_string(),
                check: report.check,
                scope: report.scope.to_string(),
                precision: report.precision,
            };
            writeln!(out, "{}", serde_json::to_string(&header).expect("serializable"))?;
            for case in selected {
                let line = serde_json::to_string(&JsonCase { record: "case", case }).expect("serializable");
                writeln!(out, "{line}")?;
            }
            let summary = JsonSummary {
                record: "summary",
                pass: report.passed(),
                total: report.total,
                reports: report.cases.len(),
                failures: report.failure_count(),
                histogram: report
                    .histogram
                    .as_ref()
                    .map(|h| h.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
                checksum: report.checksum.as_ref(),
                spectrum: report
                    .spectrum
                    .as_ref()
                    .map(|s| s.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
            };
            writeln!(out, "{}", serde_json::to_string(&summary).expect("serializable"))?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "witness", "lhs", "rhs", "modulus", "pass"])?;
            for c in selected {
                w.write_record([
                    c.subject.name().to_string(),
                    witness_text(&c.witness),
                    c.lhs.to_string(),
                    c.rhs.to_string(),
                    c.modulus.map_or(String::new(), |m| m.to_string()),
                    c.pass.to_string(),
                ])?;
            }
            w.flush()?;
        }
        ReportFormat::Summary => {
            writeln!(out, "field {} check {} scope {}", report.field, report.check, report.scope)?;
            if let Some(h) = &report.histogram {
                let parts: Vec<String> = h.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                writeln!(out, "histogram {}", parts.join(" "))?;
            }
            if let Some(s) = &report.spectrum {
                for (k, v) in s {
                    writeln!(out, "value {k} count {v}")?;
                }
            }
            if let Some(c) = &report.checksum {
                writeln!(out, "checksum sum_K={} q={} {}", c.sum, c.q, if c.ok { "ok" } else { "MISMATCH" })?;
            }
            for f in report.failures() {
                writeln!(
                    out,
                    "failure {} witness={} lhs={} rhs={}{}",
                    f.subject,
                    witness_text(&f.witness),
                    f.lhs,
                    f.rhs,
                    f.modulus.map_or(String::new(), |m| format!(" mod={m}"))
                )?;
            }
            if report.passed() {
                writeln!(out, "PASS total={}", report.total)?;
            } else {
                writeln!(out, "FAIL total={} failures={}", report.total, report.failure_count())?;
            }
        }
    }
    Ok(())
}
