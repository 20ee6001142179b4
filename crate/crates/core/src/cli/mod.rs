//! The `locapprox` command line: flat `key = value` config files, flag
//! overrides, and CSV or JSON reports.
//!
//! Exit codes: 0 on success, 2 on a well-formed negative result (`NotLocal`,
//! failed audit or check, spurious variety points, non-convergent scan), 1 on
//! usage or validation errors.

mod config;

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::logic::{self, EvalMode, LogicError, PrimeLadder};
use crate::metric::{self, audit_metric, DecodeOutcome, LocalityScale, MetricError, Sample};
use crate::poly::{PolyError, PolySystem};
use crate::rational::{q_to_string, BoundedRational, RationalError};
use crate::residue::{Modulus, ResidueError};
use crate::structures::{
    covering_radius, group_hom_check, variety_points, GridSpec, GroupFamily, HeightBound, StructureError,
    VarietyScan,
};

pub use config::Settings;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },
    #[error("missing required setting `{0}`")]
    Missing(String),
    #[error("invalid value {value:?} for `{key}`: {message}")]
    Invalid { key: String, value: String, message: String },
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("writing report: {0}")]
    Output(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "locapprox", version, about = "Emerging metrics on finite fields and finite-scale approximation experiments")]
pub struct Cli {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format; single-value commands print one plain line when unset.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for every sampled mode.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode a residue to its minimal pair.
    Decode(DecodeArgs),
    /// Encode a rational as a residue.
    Encode(EncodeArgs),
    /// Distance between two residues.
    Dist(DistArgs),
    /// Audit the metric axioms on one sort.
    AuditMetric(AuditArgs),
    /// Check that residue images of group points multiply like the points.
    GroupHom(GroupHomArgs),
    /// Covering radius of bounded-height group points against a grid.
    Covering(CoveringArgs),
    /// Decoded points of a polynomial system.
    Variety(VarietyArgs),
    /// Evaluate a formula on one finite structure or at the limit.
    Eval(EvalArgs),
    /// Evaluate a formula along a prime ladder and compare with the limit.
    Los(LosArgs),
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    /// Prime modulus.
    #[arg(long)]
    pub q: Option<u64>,
    /// Feasible unit.
    #[arg(long)]
    pub l: Option<u64>,
    /// Sort level.
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,
    #[arg(long)]
    pub z: Option<u64>,
    /// Read `z` in `Z_n` and project to `F_q` first.
    #[arg(long)]
    pub ring: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub q: Option<u64>,
    /// Encode into `Z_n` instead of `F_q`.
    #[arg(long)]
    pub ring: Option<u64>,
    /// Rational `k1/k2`.
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub y: Option<u64>,
    #[arg(long)]
    pub ring: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,
    /// Sample this many tuples per axiom instead of scanning exhaustively.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Polynomial system whose zero-sets are checked for open complements.
    #[arg(long)]
    pub predicates: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroupHomArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,
    /// `SO(n)`, `SU(n)` or `SL2`.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Common height bound of the sampled points.
    #[arg(long)]
    pub height: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CoveringArgs {
    #[arg(long)]
    pub family: Option<String>,
    /// Comma-separated height bounds.
    #[arg(long)]
    pub heights: Option<String>,
    /// `halton`, `random` or `identity`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub grid_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VarietyArgs {
    #[command(flatten)]
    pub scale: ScaleArgs,
    /// Polynomial system file (`vars:` header, one polynomial per line).
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Inline system: variables, space-separated.
    #[arg(long)]
    pub vars: Option<String>,
    /// Inline system: polynomials separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub polys: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Cap on exhaustively scanned tuples.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    /// Formula text.
    #[arg(long)]
    pub formula: Option<String>,
    /// File holding the formula.
    #[arg(long)]
    pub formula_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub formula: FormulaArgs,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub l: Option<u64>,
    /// Sample this many witnesses per quantifier.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Evaluate over rationals of height at most this instead of `F_q`.
    #[arg(long)]
    pub limit_height: Option<u64>,
}

#[derive(Debug, Args)]
pub struct LosArgs {
    #[command(flatten)]
    pub formula: FormulaArgs,
    /// Comma-separated feasible units, one rung each.
    #[arg(long)]
    pub ls: Option<String>,
    /// Geometric ladder: first unit.
    #[arg(long)]
    pub start: Option<u64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub growth: Option<u64>,
    #[arg(long)]
    pub limit_height: Option<u64>,
}

/// What a command produced, before formatting.
struct Outcome {
    line: Option<String>,
    csv: Vec<u8>,
    rows: Value,
    summary: Value,
    negative: bool,
}

/// Parse `args`, run, print, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(negative) => {
            if negative {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Run the parsed command and write its report; returns whether the
/// result is negative.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    let name = command_name(&cli.command);
    let out = dispatch(&cli.command, cli.seed, &mut cfg)?;
    let bytes = match cli.format {
        Some(Format::Json) => {
            let doc = json!({
                "metadata": {
                    "command": name,
                    "version": env!("CARGO_PKG_VERSION"),
                    "config": cfg.echo(),
                },
                "rows": out.rows,
                "summary": out.summary,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json serializes");
            s.push('\n');
            s.into_bytes()
        }
        Some(Format::Csv) => out.csv,
        None => match out.line {
            Some(l) => format!("{l}\n").into_bytes(),
            None => out.csv,
        },
    };
    match &cli.out {
        Some(p) => fs::write(p, bytes).map_err(|source| CliError::Io { path: p.display().to_string(), source })?,
        None => io::stdout().write_all(&bytes)?,
    }
    Ok(out.negative)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Decode(_) => "decode",
        Command::Encode(_) => "encode",
        Command::Dist(_) => "dist",
        Command::AuditMetric(_) => "audit-metric",
        Command::GroupHom(_) => "group-hom",
        Command::Covering(_) => "covering",
        Command::Variety(_) => "variety",
        Command::Eval(_) => "eval",
        Command::Los(_) => "los",
    }
}

fn dispatch(c: &Command, seed: Option<u64>, cfg: &mut Settings) -> Result<Outcome, CliError> {
    match c {
        Command::Decode(a) => cmd_decode(a, cfg),
        Command::Encode(a) => cmd_encode(a, cfg),
        Command::Dist(a) => cmd_dist(a, cfg),
        Command::AuditMetric(a) => cmd_audit(a, seed, cfg),
        Command::GroupHom(a) => cmd_group_hom(a, seed, cfg),
        Command::Covering(a) => cmd_covering(a, seed, cfg),
        Command::Variety(a) => cmd_variety(a, seed, cfg),
        Command::Eval(a) => cmd_eval(a, seed, cfg),
        Command::Los(a) => cmd_los(a, cfg),
    }
}

fn scale(a: &ScaleArgs, cfg: &mut Settings) -> Result<(Modulus, LocalityScale), CliError> {
    let q = Modulus::field(cfg.req("q", a.q)?)?;
    let s = LocalityScale::new(cfg.req("l", a.l)?, cfg.get("m", a.m)?.unwrap_or(1))?;
    s.check_window(&q)?;
    Ok((q, s))
}

fn single_row_csv(header: &[&str], row: &[String]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(io::Error::from)?;
    w.write_record(row).map_err(io::Error::from)?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn sampled_seed(seed: Option<u64>, cfg: &mut Settings) -> Result<u64, CliError> {
    cfg.req("seed", seed)
}

fn positive_count(key: &str, n: usize) -> Result<usize, CliError> {
    if n == 0 {
        return Err(CliError::Invalid { key: key.into(), value: "0".into(), message: "sample size must be positive".into() });
    }
    Ok(n)
}

fn cmd_decode(a: &DecodeArgs, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let (q, s) = scale(&a.scale, cfg)?;
    let z = cfg.req("z", a.z)?;
    let outcome = match cfg.get("ring", a.ring)? {
        Some(n) => metric::decode_ring(&Modulus::ring(n)?.residue(z), &q, &s)?,
        None => metric::decode(&q.residue(z), &s)?,
    };
    let value = match outcome {
        DecodeOutcome::Local(r) => r.to_string(),
        DecodeOutcome::NotLocal => "NotLocal".to_string(),
    };
    let line = if outcome.is_local() { format!("{z} -> {value}") } else { value.clone() };
    Ok(Outcome {
        csv: single_row_csv(&["z", "value"], &[z.to_string(), value.clone()])?,
        rows: json!([{ "z": z, "value": value }]),
        summary: json!({ "local": outcome.is_local() }),
        negative: !outcome.is_local(),
        line: Some(line),
    })
}

fn cmd_encode(a: &EncodeArgs, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let text: String = cfg.req("r", a.r.clone())?;
    let r: BoundedRational = text.parse()?;
    let modulus = match cfg.get("ring", a.ring)? {
        Some(n) => Modulus::ring(n)?,
        None => Modulus::field(cfg.req("q", a.q)?)?,
    };
    let z = metric::encode(&r, &modulus)?;
    Ok(Outcome {
        line: Some(format!("{r} -> {z}")),
        csv: single_row_csv(&["r", "z"], &[r.to_string(), z.to_string()])?,
        rows: json!([{ "r": r.to_string(), "z": z.value() }]),
        summary: json!({ "modulus": modulus.value() }),
        negative: false,
    })
}

fn cmd_dist(a: &DistArgs, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let (q, s) = scale(&a.scale, cfg)?;
    let x = cfg.req("x", a.x)?;
    let y = cfg.req("y", a.y)?;
    let d = match cfg.get("ring", a.ring)? {
        Some(n) => {
            let ring = Modulus::ring(n)?;
            metric::dist_ring(&ring.residue(x), &ring.residue(y), &q, &s)
        }
        None => metric::dist(&q.residue(x), &q.residue(y), &s),
    };
    let value = match d {
        Ok(d) => Some(d),
        Err(MetricError::NotLocal(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let shown = value.map_or_else(|| "NotLocal".to_string(), |d| d.to_string());
    Ok(Outcome {
        line: Some(match value {
            Some(d) => format!("d({x}, {y}) = {d}"),
            None => shown.clone(),
        }),
        csv: single_row_csv(&["x", "y", "dist"], &[x.to_string(), y.to_string(), shown.clone()])?,
        rows: json!([{ "x": x, "y": y, "dist": shown }]),
        summary: json!({ "local": value.is_some() }),
        negative: value.is_none(),
    })
}

fn read_file(p: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(p).map_err(|source| CliError::Io { path: p.display().to_string(), source })
}

fn cmd_audit(a: &AuditArgs, seed: Option<u64>, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let (q, s) = scale(&a.scale, cfg)?;
    let sample = match cfg.get("samples", a.samples)? {
        Some(n) => Sample::Random { count: positive_count("samples", n)?, seed: sampled_seed(seed, cfg)? },
        None => Sample::Exhaustive,
    };
    let predicates = match cfg.get("predicates", a.predicates.as_ref().map(|p| p.display().to_string()))? {
        Some(p) => PolySystem::from_str(&read_file(&PathBuf::from(p))?)?.polys,
        None => Vec::new(),
    };
    let report = audit_metric(&s, &q, sample, &predicates)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(io::Error::from)?;
    let doc = report.to_json();
    Ok(Outcome {
        line: None,
        csv,
        rows: doc["axioms"].clone(),
        summary: json!({
            "passed": report.passed(),
            "total_failures": report.total_failures(),
            "sort_size": report.sort_size,
            "distance_window": report.distance_window,
        }),
        negative: !report.passed(),
    })
}

fn family(key: &str, value: Option<String>, cfg: &mut Settings) -> Result<GroupFamily, CliError> {
    let text: String = cfg.req(key, value)?;
    text.parse().map_err(|e: StructureError| CliError::Invalid { key: key.into(), value: text, message: e.to_string() })
}

fn cmd_group_hom(a: &GroupHomArgs, seed: Option<u64>, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let fam = family("family", a.family.clone(), cfg)?;
    let (q, s) = scale(&a.scale, cfg)?;
    let pairs = positive_count("pairs", cfg.req("pairs", a.pairs)?)?;
    let h = HeightBound::new(cfg.req("height", a.height)?)?;
    let seed = sampled_seed(seed, cfg)?;
    let report = group_hom_check(&fam, pairs, h, &q, &s, seed)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    Ok(Outcome {
        line: None,
        csv,
        rows: json!([
            { "check": "membership", "checked": 2 * report.pairs, "failed": report.membership_failures },
            { "check": "product", "checked": report.pairs, "failed": report.product_failures },
        ]),
        summary: json!({
            "passed": report.passed(),
            "num_required": report.num_required.to_string(),
            "den_required": report.den_required.to_string(),
            "witnesses": report.witnesses,
        }),
        negative: !report.passed(),
    })
}

/// `x` with six significant digits, without an exponent.
pub fn six_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn parse_list<T: FromStr>(key: &str, text: &str) -> Result<Vec<T>, CliError>
where
    T::Err: Display,
{
    text.split(',')
        .map(|t| {
            t.trim().parse::<T>().map_err(|e| CliError::Invalid {
                key: key.into(),
                value: text.into(),
                message: e.to_string(),
            })
        })
        .collect()
}

fn cmd_covering(a: &CoveringArgs, seed: Option<u64>, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let fam = family("family", a.family.clone(), cfg)?;
    let heights: Vec<u64> = parse_list("heights", &cfg.req::<String>("heights", a.heights.clone())?)?;
    let grid_name = cfg.get("grid", a.grid.clone())?.unwrap_or_else(|| "halton".into());
    let size = positive_count("grid-size", cfg.get("grid-size", a.grid_size)?.unwrap_or(512))?;
    let (grid, seed) = match grid_name.as_str() {
        "halton" => (GridSpec::Halton { count: size }, 0),
        "identity" => (GridSpec::Identity, 0),
        "random" => (GridSpec::Random { count: size }, sampled_seed(seed, cfg)?),
        other => {
            return Err(CliError::Invalid {
                key: "grid".into(),
                value: other.into(),
                message: "expected halton, random or identity".into(),
            })
        }
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(["height", "points", "grid_size", "radius"]).map_err(io::Error::from)?;
    let mut rows = Vec::new();
    let mut radii = Vec::new();
    for h in heights {
        let r = covering_radius(&fam, HeightBound::new(h)?, grid, seed)?;
        let shown = six_significant(r.radius);
        w.write_record([h.to_string(), r.point_count.to_string(), r.grid_size.to_string(), shown.clone()])
            .map_err(io::Error::from)?;
        rows.push(json!({ "height": h, "points": r.point_count, "grid_size": r.grid_size, "radius": shown,
            "worst_grid_index": r.worst_grid_index }));
        radii.push(r.radius);
    }
    let non_increasing = radii.windows(2).all(|p| p[1] <= p[0]);
    Ok(Outcome {
        line: None,
        csv: w.into_inner().map_err(|e| e.into_error())?,
        rows: Value::Array(rows),
        summary: json!({ "family": fam.to_string(), "non_increasing": non_increasing }),
        negative: false,
    })
}

fn cmd_variety(a: &VarietyArgs, seed: Option<u64>, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let system = match cfg.get("system", a.system.as_ref().map(|p| p.display().to_string()))? {
        Some(p) => PolySystem::from_str(&read_file(&PathBuf::from(p))?)?,
        None => {
            let vars: String = cfg.req("vars", a.vars.clone())?;
            let polys: String = cfg.req("polys", a.polys.clone())?;
            let text = format!("vars: {vars}\n{}", polys.split(';').collect::<Vec<_>>().join("\n"));
            PolySystem::from_str(&text)?
        }
    };
    let (q, s) = scale(&a.scale, cfg)?;
    let scan = match cfg.get("samples", a.samples)? {
        Some(n) => VarietyScan::Sampled { count: positive_count("samples", n)?, seed: sampled_seed(seed, cfg)? },
        None => VarietyScan::Exhaustive { budget: cfg.get("budget", a.budget)?.unwrap_or(10_000_000) },
    };
    let report = variety_points(&system, &q, &s, scan)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let rows: Vec<Value> = report
        .points
        .iter()
        .map(|p| Value::Object(report.vars.iter().zip(p).map(|(v, x)| (v.clone(), json!(x.to_string()))).collect()))
        .collect();
    Ok(Outcome {
        line: None,
        csv,
        rows: Value::Array(rows),
        summary: json!({
            "scanned": report.scanned,
            "points": report.points.len(),
            "spurious": report.spurious,
            "certified": report.certified,
            "value_num_bound": report.value_num_bound.to_string(),
            "value_den_bound": report.value_den_bound.to_string(),
        }),
        negative: report.spurious > 0,
    })
}

fn formula(a: &FormulaArgs, cfg: &mut Settings) -> Result<logic::Formula, CliError> {
    let text = match cfg.get("formula", a.formula.clone())? {
        Some(t) => t,
        None => {
            let path: String = cfg.req("formula-file", a.formula_file.as_ref().map(|p| p.display().to_string()))?;
            read_file(&PathBuf::from(path))?
        }
    };
    Ok(logic::parse_formula(&text)?)
}

fn cmd_eval(a: &EvalArgs, seed: Option<u64>, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let f = formula(&a.formula, cfg)?;
    let (value, row) = match cfg.get("limit-height", a.limit_height)? {
        Some(h) => {
            let v = logic::eval_limit(&f, HeightBound::new(h)?)?;
            let row = json!({ "mode": "limit", "height": h, "value": q_to_string(&v) });
            (v, row)
        }
        None => {
            let q = Modulus::field(cfg.req("q", a.q)?)?;
            let l = cfg.req("l", a.l)?;
            let mode = match cfg.get("samples", a.samples)? {
                Some(n) => EvalMode::Sampled { count: positive_count("samples", n)?, seed: sampled_seed(seed, cfg)? },
                None => EvalMode::Exhaustive,
            };
            let v = logic::eval_finite(&f, &q, l, mode)?;
            let row = json!({ "mode": "finite", "q": q.value(), "l": l, "value": q_to_string(&v) });
            (v, row)
        }
    };
    let shown = q_to_string(&value);
    Ok(Outcome {
        line: Some(shown.clone()),
        csv: single_row_csv(&["formula", "value_num", "value_den"], &[f.to_string(), value.numer().to_string(), value.denom().to_string()])?,
        rows: json!([row]),
        summary: json!({ "formula": f.to_string(), "value": shown }),
        negative: false,
    })
}

fn cmd_los(a: &LosArgs, cfg: &mut Settings) -> Result<Outcome, CliError> {
    let f = formula(&a.formula, cfg)?;
    let ladder = match cfg.get("ls", a.ls.clone())? {
        Some(text) => PrimeLadder::windowed(&f, &parse_list::<u64>("ls", &text)?)?,
        None => PrimeLadder::geometric(
            &f,
            cfg.req("start", a.start)?,
            cfg.req("count", a.count)?,
            cfg.req("growth", a.growth)?,
        )?,
    };
    let h = HeightBound::new(cfg.req("limit-height", a.limit_height)?)?;
    let report = logic::los_scan(&f, &ladder, h)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    let doc = report.to_json();
    Ok(Outcome {
        line: None,
        csv,
        rows: doc["rows"].clone(),
        summary: json!({
            "formula": report.formula,
            "limit": q_to_string(&report.limit),
            "final_gap": q_to_string(&report.final_gap),
            "non_convergent": report.non_convergent,
        }),
        negative: report.non_convergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(six_significant(0.793_812_345), "0.793812");
        assert_eq!(six_significant(1.100_712_9), "1.10071");
        assert_eq!(six_significant(0.0), "0");
        assert_eq!(six_significant(0.034_812_345_6), "0.0348123");
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
