//! Command-line surface: `compute`, `verify`, `table` and `check-reference`.
//!
//! Exit codes: 0 when everything checked out, 1 on a mathematical mismatch,
//! 2 on usage or parse errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{rat, rat_int, ExactValue, Int, LPoly, Rat};
use crate::identities::{self, CheckContext, CheckReport, IdentityId};
use crate::sequences::{SequenceCache, SequenceKind};
use crate::series;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_HEADER: [&str; 4] = ["kind", "n", "r", "value"];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Parser, Debug)]
#[command(
    name = "degharm",
    version,
    about = "Exact derangement and (degenerate) harmonic numbers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print one exact value.
    Compute {
        kind: KindArg,
        n: u64,
        #[arg(long)]
        r: Option<u32>,
        /// Evaluate a degenerate value at this rational λ instead of printing
        /// the polynomial.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// Run an identity over a parameter grid.
    Verify {
        /// Identity name, or `all`.
        identity: String,
        #[arg(long, default_value_t = 10)]
        m_max: u64,
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[arg(long)]
        r_max: Option<u64>,
        /// Truncation order for series checks.
        #[arg(long)]
        order: Option<u64>,
        /// λ evaluation points (thm3-at, eq6); repeatable.
        #[arg(long = "lambda", allow_hyphen_values = true)]
        lambdas: Vec<String>,
        /// Reference CSV whose rows replace the computed sequence entries.
        #[arg(long)]
        override_table: Option<PathBuf>,
    },
    /// Emit a sequence table.
    Table {
        kind: KindArg,
        n_max: u64,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recompute every row of a reference CSV and compare exactly.
    CheckReference { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Derangement,
    Harmonic,
    Hyperharmonic,
    DegHarmonic,
    DegHyperharmonic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn resolve_kind(kind: KindArg, r: Option<u32>) -> Result<SequenceKind, CliError> {
    let need_r = |r: Option<u32>| {
        r.ok_or_else(|| CliError::Usage(format!("{kind:?} requires --r").to_lowercase()))
    };
    let reject_r = |r: Option<u32>, k: SequenceKind| match r {
        Some(_) => Err(CliError::Usage(format!(
            "--r does not apply to {}",
            k.name()
        ))),
        None => Ok(k),
    };
    match kind {
        KindArg::Derangement => reject_r(r, SequenceKind::Derangement),
        KindArg::Harmonic => reject_r(r, SequenceKind::Harmonic),
        KindArg::DegHarmonic => reject_r(r, SequenceKind::DegHarmonic),
        KindArg::Hyperharmonic => Ok(SequenceKind::Hyperharmonic(need_r(r)?)),
        KindArg::DegHyperharmonic => Ok(SequenceKind::DegHyperharmonic(need_r(r)?)),
    }
}

pub fn kind_from_name(name: &str, r: Option<u32>) -> Option<SequenceKind> {
    let kind = match name {
        "derangement" => SequenceKind::Derangement,
        "harmonic" => SequenceKind::Harmonic,
        "deg-harmonic" => SequenceKind::DegHarmonic,
        "hyperharmonic" => SequenceKind::Hyperharmonic(r?),
        "deg-hyperharmonic" => SequenceKind::DegHyperharmonic(r?),
        _ => return None,
    };
    match (kind.order(), r) {
        (None, Some(_)) => None,
        _ => Some(kind),
    }
}

fn parse_rat(s: &str) -> Result<Rat, CliError> {
    s.trim()
        .parse::<Rat>()
        .map_err(|_| CliError::Usage(format!("`{s}` is not a rational p/q")))
}

fn ensure_kind(cache: &mut SequenceCache, kind: SequenceKind, n_max: usize) {
    match kind {
        SequenceKind::Derangement => cache.ensure_derangements(n_max),
        SequenceKind::Harmonic => cache.ensure_harmonics(n_max),
        SequenceKind::Hyperharmonic(r) => cache.ensure_hyperharmonic(n_max, r),
        SequenceKind::DegHarmonic => cache.ensure_deg_harmonics(n_max),
        SequenceKind::DegHyperharmonic(r) => cache.ensure_deg_hyperharmonic(n_max, r),
    }
}

/// Entry `n` of `kind`; the cache must already hold it.
pub fn value_of(cache: &SequenceCache, kind: SequenceKind, n: usize) -> ExactValue {
    match kind {
        SequenceKind::Derangement => cache.derangement(n).clone().into(),
        SequenceKind::Harmonic => cache.harmonic(n).clone().into(),
        SequenceKind::Hyperharmonic(r) => cache.hyperharmonic(n, r).clone().into(),
        SequenceKind::DegHarmonic => cache.deg_harmonic(n).clone().into(),
        SequenceKind::DegHyperharmonic(r) => cache.deg_hyperharmonic(n, r).clone().into(),
    }
}

/// Parses value text in the shape `kind` produces.
pub fn parse_value(kind: SequenceKind, text: &str) -> Result<ExactValue, String> {
    let text = text.trim();
    match kind {
        SequenceKind::Derangement => text
            .parse::<Int>()
            .map(ExactValue::Int)
            .map_err(|_| format!("`{text}` is not an integer")),
        SequenceKind::Harmonic | SequenceKind::Hyperharmonic(_) => text
            .parse::<Rat>()
            .map(ExactValue::Rat)
            .map_err(|_| format!("`{text}` is not a rational")),
        SequenceKind::DegHarmonic | SequenceKind::DegHyperharmonic(_) => text
            .parse::<LPoly>()
            .map(ExactValue::Poly)
            .map_err(|e| e.to_string()),
    }
}

pub fn cmd_compute(
    kind: SequenceKind,
    n: u64,
    lambda: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let lambda = match lambda {
        Some(_) if !kind.is_degenerate() => {
            return Err(CliError::Usage(format!(
                "--lambda does not apply to {}",
                kind.name()
            )))
        }
        Some(s) => Some(parse_rat(s)?),
        None => None,
    };
    let mut cache = SequenceCache::new();
    ensure_kind(&mut cache, kind, n as usize);
    let value = match (value_of(&cache, kind, n as usize), lambda) {
        (ExactValue::Poly(p), Some(lam)) => ExactValue::Rat(p.eval(&lam)),
        (v, _) => v,
    };
    writeln!(out, "{value}").map_err(stdout_err)?;
    Ok(EXIT_OK)
}

fn stdout_err(e: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

/// One row of a table file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub kind: String,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    pub value: String,
}

pub fn table_rows(kind: SequenceKind, n_max: u64) -> Vec<TableRow> {
    let mut cache = SequenceCache::new();
    ensure_kind(&mut cache, kind, n_max as usize);
    (0..=n_max)
        .map(|n| TableRow {
            kind: kind.name().to_string(),
            n,
            r: kind.order(),
            value: value_of(&cache, kind, n as usize).to_string(),
        })
        .collect()
}

pub fn render_csv(rows: &[TableRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for row in rows {
        let r = row.r.map(|r| r.to_string()).unwrap_or_default();
        w.write_record([row.kind.as_str(), &row.n.to_string(), &r, &row.value])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn render_json(rows: &[TableRow]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn cmd_table(
    kind: SequenceKind,
    n_max: u64,
    format: Format,
    output: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let rows = table_rows(kind, n_max);
    let text = match format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&rows),
    };
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?,
        None => out.write_all(text.as_bytes()).map_err(stdout_err)?,
    }
    Ok(EXIT_OK)
}

/// A parsed reference row together with its line in the source file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceRow {
    pub line: u64,
    pub kind: SequenceKind,
    pub n: u64,
    pub expected: ExactValue,
}

/// Rows of a `kind,n,r,value` CSV, keyed uniquely by `(kind, n, r)`.
pub fn parse_reference(text: &str) -> Result<Vec<ReferenceRow>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_err(&e, 1))?.clone();
    if header.iter().map(str::trim).ne(CSV_HEADER) {
        return Err(CliError::Parse {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    let mut seen = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |message: String| CliError::Parse { line, message };
        let field = |i: usize| record.get(i).unwrap_or("").trim();

        let r = match field(2) {
            "" => None,
            s => Some(
                s.parse::<u32>()
                    .map_err(|_| parse_err(format!("bad r `{s}`")))?,
            ),
        };
        let kind = kind_from_name(field(0), r).ok_or_else(|| {
            parse_err(format!(
                "bad kind/r combination `{}`,`{}`",
                field(0),
                field(2)
            ))
        })?;
        let n = field(1)
            .parse::<u64>()
            .map_err(|_| parse_err(format!("bad n `{}`", field(1))))?;
        let expected = parse_value(kind, field(3)).map_err(parse_err)?;
        if let Some(first) = seen.insert((kind, n), line) {
            return Err(parse_err(format!(
                "duplicate row for {kind} n={n} (first at line {first})"
            )));
        }
        rows.push(ReferenceRow {
            line,
            kind,
            n,
            expected,
        });
    }
    Ok(rows)
}

fn csv_err(e: &csv::Error, fallback_line: u64) -> CliError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    CliError::Parse {
        line,
        message: e.to_string(),
    }
}

fn cache_for_rows(rows: &[ReferenceRow]) -> SequenceCache {
    let mut cache = SequenceCache::new();
    let mut max_n: BTreeMap<SequenceKind, u64> = BTreeMap::new();
    for row in rows {
        let e = max_n.entry(row.kind).or_default();
        *e = (*e).max(row.n);
    }
    for (kind, n) in max_n {
        ensure_kind(&mut cache, kind, n as usize);
    }
    cache
}

pub fn cmd_check_reference(path: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let rows = parse_reference(&text)?;
    let cache = cache_for_rows(&rows);
    let mut mismatched = 0;
    for row in &rows {
        let actual = value_of(&cache, row.kind, row.n as usize);
        if actual != row.expected {
            mismatched += 1;
            writeln!(
                out,
                "mismatch at line {}: {} n={}: expected {}, actual {}",
                row.line, row.kind, row.n, row.expected, actual
            )
            .map_err(stdout_err)?;
        }
    }
    writeln!(out, "checked {}, mismatched {mismatched}", rows.len()).map_err(stdout_err)?;
    Ok(if mismatched == 0 {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    })
}

/// Which checks to run and over what grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyJob {
    pub identity: IdentityId,
    pub m_max: u64,
    pub n_max: u64,
    pub r_max: u64,
    pub order: u64,
    pub lambdas: Vec<Rat>,
}

impl VerifyJob {
    /// Defaults for the orders and λ points that the grid flags leave open.
    pub fn new(identity: IdentityId, m_max: u64, n_max: u64) -> Self {
        let (order, r_max) = match identity {
            IdentityId::GfDerangement | IdentityId::GfHarmonic => (60, 0),
            IdentityId::GfHyperharmonic => (60, 5),
            IdentityId::GfDegHarmonic => (40, 0),
            IdentityId::GfDegHyperharmonic => (40, 4),
            IdentityId::BivDerangement | IdentityId::BivHarmonic => (20, 0),
            IdentityId::BivDegHarmonic => (12, 0),
            _ => (0, 0),
        };
        let lambdas = match identity {
            IdentityId::DegLogProduct => (-5..=5).filter(|&l| l != 0).map(rat_int).collect(),
            IdentityId::DegHarmonicRecurrenceAt => vec![rat(1, 2), rat(-3, 1), rat(7, 5)],
            _ => Vec::new(),
        };
        VerifyJob {
            identity,
            m_max,
            n_max,
            r_max,
            order,
            lambdas,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.identity == IdentityId::DegLogProduct {
            if let Some(bad) = self
                .lambdas
                .iter()
                .find(|l| !l.is_integer() || *l == &rat_int(0))
            {
                return Err(CliError::Usage(format!(
                    "eq6 needs nonzero integer lambda values, got {bad}"
                )));
            }
        }
        if matches!(
            self.identity,
            IdentityId::DegLogProduct | IdentityId::DegHarmonicRecurrenceAt
        ) && self.lambdas.is_empty()
        {
            return Err(CliError::Usage(format!(
                "{} needs at least one --lambda",
                self.identity
            )));
        }
        Ok(())
    }

    pub fn context(&self) -> CheckContext {
        CheckContext::prepared(
            self.identity,
            self.m_max,
            self.n_max,
            self.r_max,
            self.order,
        )
    }

    /// Number of checks in the grid.
    pub fn len(&self) -> usize {
        let grid = ((self.m_max + 1) * (self.n_max + 1)) as usize;
        match self.identity {
            IdentityId::DegHarmonicRecurrenceAt | IdentityId::DegLogProduct => {
                grid * self.lambdas.len()
            }
            IdentityId::GfHyperharmonic | IdentityId::GfDegHyperharmonic => self.r_max as usize + 1,
            IdentityId::GfDerangement
            | IdentityId::GfHarmonic
            | IdentityId::GfDegHarmonic
            | IdentityId::BivDerangement
            | IdentityId::BivHarmonic
            | IdentityId::BivDegHarmonic => 1,
            _ => grid,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Runs the full grid against `ctx`. Reports come back sorted by
    /// parameters whatever order the workers finished in.
    pub fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckReport>, CliError> {
        self.validate()?;
        let order = self.order as usize;
        let grid: Vec<(u64, u64)> = (0..=self.m_max)
            .flat_map(|m| (0..=self.n_max).map(move |n| (m, n)))
            .collect();
        let mut reports: Vec<CheckReport> = match self.identity {
            IdentityId::DerangementRecurrence => grid
                .par_iter()
                .map(|&(m, n)| identities::derangement_recurrence_check(ctx, m, n))
                .collect(),
            IdentityId::HarmonicRecurrence => grid
                .par_iter()
                .map(|&(m, n)| identities::harmonic_recurrence_check(ctx, m, n))
                .collect(),
            IdentityId::DegHarmonicRecurrence => grid
                .par_iter()
                .map(|&(m, n)| identities::deg_harmonic_recurrence_check(ctx, m, n))
                .collect(),
            IdentityId::DegHarmonicRecurrenceAt => grid
                .par_iter()
                .flat_map_iter(|&(m, n)| {
                    self.lambdas
                        .iter()
                        .map(move |l| identities::deg_harmonic_recurrence_at_check(ctx, m, n, l))
                })
                .collect(),
            IdentityId::HyperharmonicClosedForm => grid
                .par_iter()
                .map(|&(m, n)| identities::hyperharmonic_closed_form_check(ctx, n, m))
                .collect(),
            IdentityId::HyperharmonicSum => grid
                .par_iter()
                .map(|&(m, n)| identities::hyperharmonic_sum_check(ctx, n, m))
                .collect(),
            IdentityId::DegHyperharmonicClosedForm => grid
                .par_iter()
                .map(|&(m, n)| identities::deg_hyperharmonic_closed_form_check(ctx, n, m))
                .collect(),
            IdentityId::DegHyperharmonicSum => grid
                .par_iter()
                .map(|&(m, n)| identities::deg_hyperharmonic_sum_check(ctx, n, m))
                .collect(),
            IdentityId::DegLogProduct => {
                let mut out = Vec::with_capacity(self.len());
                for &(m, n) in &grid {
                    let (x, y) = deg_log_product_point(m, n);
                    for l in &self.lambdas {
                        let lam: i64 = l
                            .to_integer()
                            .try_into()
                            .map_err(|_| CliError::Usage(format!("lambda {l} out of range")))?;
                        out.push(
                            identities::deg_log_product_check(&x, &y, lam)
                                .map_err(|e| CliError::Usage(e.to_string()))?,
                        );
                    }
                }
                out
            }
            IdentityId::GfDerangement => vec![series::gf_derangement_check(ctx, order)],
            IdentityId::GfHarmonic => vec![series::gf_harmonic_check(ctx, order)],
            IdentityId::GfDegHarmonic => vec![series::gf_deg_harmonic_check(ctx, order)],
            IdentityId::GfHyperharmonic => (0..=self.r_max as u32)
                .into_par_iter()
                .map(|r| series::gf_hyperharmonic_check(ctx, order, r))
                .collect(),
            IdentityId::GfDegHyperharmonic => (0..=self.r_max as u32)
                .into_par_iter()
                .map(|r| series::gf_deg_hyperharmonic_check(ctx, order, r))
                .collect(),
            IdentityId::BivDerangement => vec![series::bivariate_derangement_check(ctx, order)],
            IdentityId::BivHarmonic => vec![series::bivariate_harmonic_check(ctx, order)],
            IdentityId::BivDegHarmonic => vec![series::bivariate_deg_harmonic_check(ctx, order)],
        };
        reports.sort_by(|a, b| (a.identity, &a.params).cmp(&(b.identity, &b.params)));
        Ok(reports)
    }
}

/// Sample point for the degenerate-log product rule at grid cell `(m, n)`.
pub fn deg_log_product_point(m: u64, n: u64) -> (Rat, Rat) {
    (rat(m as i64 + 1, 2), rat(n as i64 + 1, 3))
}

/// Replaces computed entries with the rows of a reference table.
pub fn apply_overrides(ctx: &mut CheckContext, rows: &[ReferenceRow]) -> Result<(), CliError> {
    fn replace<T: Clone>(table: &[T], n: usize, v: &T, what: &str) -> Result<Vec<T>, CliError> {
        let mut values = table.to_vec();
        let slot = values.get_mut(n).ok_or_else(|| {
            CliError::Usage(format!(
                "cannot override {what} entry {n}: table not built that far"
            ))
        })?;
        *slot = v.clone();
        Ok(values)
    }
    for row in rows {
        let n = row.n as usize;
        match (&row.kind, &row.expected) {
            (SequenceKind::Harmonic, ExactValue::Rat(v)) => {
                let values = replace(ctx.seq.harmonic_table(), n, v, "harmonic")?;
                ctx.seq.override_harmonics(values);
            }
            (SequenceKind::Derangement, ExactValue::Int(v)) => {
                let values = replace(ctx.seq.derangement_table(), n, v, "derangement")?;
                ctx.seq.override_derangements(values);
            }
            (SequenceKind::DegHarmonic, ExactValue::Poly(v)) => {
                let values = replace(ctx.seq.deg_harmonic_table(), n, v, "deg-harmonic")?;
                ctx.seq.override_deg_harmonics(values);
            }
            (kind, _) => {
                return Err(CliError::Usage(format!(
                    "overrides are not supported for {kind}"
                )));
            }
        }
    }
    Ok(())
}

fn all_jobs(m_max: u64, n_max: u64) -> Vec<VerifyJob> {
    IdentityId::ALL
        .iter()
        .map(|&id| VerifyJob::new(id, m_max, n_max))
        .collect()
}

pub fn cmd_verify(
    jobs: &[VerifyJob],
    overrides: Option<&[ReferenceRow]>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut checked = 0;
    let mut failed = 0;
    for job in jobs {
        let mut ctx = job.context();
        if let Some(rows) = overrides {
            apply_overrides(&mut ctx, rows)?;
        }
        for report in job.run(&ctx)? {
            checked += 1;
            if !report.pass {
                failed += 1;
                writeln!(out, "{report}").map_err(stdout_err)?;
            }
        }
    }
    writeln!(out, "checked {checked}, failed {failed}").map_err(stdout_err)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Compute { kind, n, r, lambda } => {
            cmd_compute(resolve_kind(kind, r)?, n, lambda.as_deref(), out)
        }
        Command::Table {
            kind,
            n_max,
            r,
            format,
            output,
        } => cmd_table(
            resolve_kind(kind, r)?,
            n_max,
            format,
            output.as_deref(),
            out,
        ),
        Command::CheckReference { path } => cmd_check_reference(&path, out),
        Command::Verify {
            identity,
            m_max,
            n_max,
            r_max,
            order,
            lambdas,
            override_table,
        } => {
            let mut jobs = if identity == "all" {
                all_jobs(m_max, n_max)
            } else {
                let id = IdentityId::from_name(&identity)
                    .ok_or_else(|| CliError::Usage(format!("unknown identity `{identity}`")))?;
                vec![VerifyJob::new(id, m_max, n_max)]
            };
            let lambdas = lambdas
                .iter()
                .map(|s| parse_rat(s))
                .collect::<Result<Vec<_>, _>>()?;
            for job in &mut jobs {
                if let Some(r) = r_max {
                    job.r_max = r;
                }
                if let Some(o) = order {
                    job.order = o;
                }
                if !lambdas.is_empty() && !job.lambdas.is_empty() {
                    job.lambdas = lambdas.clone();
                }
            }
            let overrides = match override_table {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .map_err(|source| CliError::Io { path, source })?;
                    Some(parse_reference(&text)?)
                }
                None => None,
            };
            cmd_verify(&jobs, overrides.as_deref(), out)
        }
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("degharm").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn compute_examples() {
        assert_eq!(run_capture(&["compute", "derangement", "6"]).1, "265\n");
        assert_eq!(run_capture(&["compute", "harmonic", "4"]).1, "25/12\n");
        assert_eq!(
            run_capture(&["compute", "deg-harmonic", "2"]).1,
            "3/2 + -1/2*L\n"
        );
        assert_eq!(
            run_capture(&["compute", "hyperharmonic", "3", "--r", "2"]).1,
            "13/3\n"
        );
        assert_eq!(
            run_capture(&["compute", "deg-harmonic", "2", "--lambda", "-1"]).1,
            "2\n"
        );
        assert_eq!(
            run_capture(&[
                "compute",
                "deg-hyperharmonic",
                "2",
                "--r",
                "0",
                "--lambda",
                "1/3"
            ])
            .1,
            "1/3\n"
        );
    }

    #[test]
    fn compute_usage_errors() {
        assert_eq!(
            run_capture(&["compute", "hyperharmonic", "3"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_capture(&["compute", "harmonic", "3", "--r", "1"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_capture(&["compute", "harmonic", "3", "--lambda", "1"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_capture(&["compute", "deg-harmonic", "3", "--lambda", "1/0"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_capture(&["compute", "bogus", "3"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["compute", "harmonic", "-3"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn verify_examples() {
        let (code, out, _) = run_capture(&["verify", "thm1", "--m-max", "10", "--n-max", "10"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "checked 121, failed 0\n");
        let (code, out, _) = run_capture(&["verify", "eq13", "--m-max", "5", "--n-max", "5"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert_eq!(run_capture(&["verify", "nope"]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["verify", "eq6", "--lambda", "1/2"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn verify_with_corrupted_harmonics_fails() {
        let mut job = VerifyJob::new(IdentityId::HarmonicRecurrence, 4, 4);
        job.m_max = 4;
        let mut ctx = job.context();
        let mut h = crate::sequences::harmonics(8).into_values();
        h[3] = rat(11, 7);
        ctx.seq.override_harmonics(h);
        let reports = job.run(&ctx).unwrap();
        let failures: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
        assert!(!failures.is_empty());
        assert!(failures[0].to_string().contains("FAIL"));
        assert_ne!(failures[0].lhs, failures[0].rhs);
    }

    #[test]
    fn verify_reports_are_sorted_and_deterministic() {
        let job = VerifyJob::new(IdentityId::DegHarmonicRecurrence, 3, 3);
        let ctx = job.context();
        let a = job.run(&ctx).unwrap();
        let b = job.run(&ctx).unwrap();
        assert_eq!(a, b);
        let params: Vec<_> = a.iter().map(|r| r.params.clone()).collect();
        let mut sorted = params.clone();
        sorted.sort();
        assert_eq!(params, sorted);
        assert_eq!(a.len(), job.len());
    }

    #[test]
    fn table_examples() {
        let (code, out, _) = run_capture(&["table", "harmonic", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(
            out,
            "kind,n,r,value\nharmonic,0,,0\nharmonic,1,,1\nharmonic,2,,3/2\nharmonic,3,,11/6\n"
        );
        let (_, out, _) = run_capture(&["table", "derangement", "0"]);
        assert_eq!(out, "kind,n,r,value\nderangement,0,,1\n");
        let (_, out, _) = run_capture(&["table", "deg-harmonic", "2", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[2]["value"], "3/2 + -1/2*L");
        assert!(v[2].get("r").is_none());
        let (_, out, _) = run_capture(&[
            "table",
            "hyperharmonic",
            "1",
            "--r",
            "2",
            "--format",
            "json",
        ]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[1]["r"], 2);
    }

    #[test]
    fn reference_parsing_errors_carry_line_numbers() {
        let bad = "kind,n,r,value\nharmonic,1,,1\nharmonic,x,,1\n";
        match parse_reference(bad) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let dup = "kind,n,r,value\nharmonic,1,,1\nharmonic,1,,1\n";
        assert!(matches!(
            parse_reference(dup),
            Err(CliError::Parse { line: 3, .. })
        ));
        let short = "kind,n,r,value\nharmonic,1\n";
        assert!(matches!(
            parse_reference(short),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_reference("a,b\n"),
            Err(CliError::Parse { line: 1, .. })
        ));
        let missing_r = "kind,n,r,value\nhyperharmonic,1,,1\n";
        assert!(matches!(
            parse_reference(missing_r),
            Err(CliError::Parse { line: 2, .. })
        ));
        assert!(parse_reference("kind,n,r,value\n").unwrap().is_empty());
    }

    #[test]
    fn reference_row_values_parse_by_kind() {
        let text = "kind,n,r,value\nderangement,4,,9\ndeg-hyperharmonic,2,0,1/2 + -1/2*L\n";
        let rows = parse_reference(text).unwrap();
        assert_eq!(rows[0].expected, ExactValue::Int(Int::from(9)));
        assert_eq!(rows[1].kind, SequenceKind::DegHyperharmonic(0));
        assert!(parse_reference("kind,n,r,value\nderangement,4,,9/2\n").is_err());
    }
}
