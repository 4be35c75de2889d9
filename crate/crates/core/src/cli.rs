//! The `folner-lab` command line.
//!
//! Every subcommand writes one report. The destination is `--out` if given,
//! otherwise a file named after the subcommand in `$FOLNER_LAB_OUT_DIR` if that
//! is set, otherwise stdout. Reports are deterministic, so rerunning with
//! the same arguments rewrites a file byte for byte.
//!
//! Exit codes: 0 when every checked inequality holds (vacuous counts as
//! holding), 1 when one fails, 2 on any error; errors are also written to
//! stderr as `{"error": kind, "message": …}`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::ergodic::{convergence_sweep, BernoulliAction, CylinderFunction, DEFAULT_PATHS};
use crate::error::{LabError, Result};
use crate::exact::to_f64;
use crate::folner::{
    extract_tempered, nested_box_report, sequence_report, tempered_constants, FolnerSequenceSpec, SequenceReport,
    SequenceSpecRecord,
};
use crate::group::{GroupDescriptor, ZdEmbedding};
use crate::inequality::{
    brute_force_oracle, check_discrete_bm, check_lemma_abelian_product, check_lemma_diff_size, check_lemma_same_size,
    growth_from_report, lower_bound_from_report, naive_bm_bound, InequalityReport, OracleVerdict,
};
use crate::setops::{parse_set_literal, render_set_literal, FiniteGroupSet};

pub use crate::group::parse_group_dsl;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FOLNER_LAB_OUT_DIR";

#[derive(Debug, Clone, Parser)]
#[command(name = "folner-lab", version, about = "Følner sets, product-set inequalities and tempered sequences")]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Emit F_n in the set literal format.
    Gen(GenArgs),
    /// Sizes, Tempel'man and tempered constants and defects of F_1..F_max.
    Report(ReportArgs),
    /// Check one of the inequalities.
    Verify(VerifyArgs),
    /// Greedy tempered subsequence.
    ExtractTempered(ExtractArgs),
    /// Monte-Carlo convergence of averages under a Bernoulli shift.
    Ergodic(ErgodicArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Group descriptor, e.g. `Z^2`, `Z/6xZ^2`, `lamplighter`, `wreath-zz`.
    #[arg(long)]
    pub group: Option<String>,
    /// `boxes`, `standard` or `tempelman`.
    #[arg(long, default_value = "standard")]
    pub family: String,
    /// Coefficient bound for the wreath family (default: h(n) = n).
    #[arg(long)]
    pub height: Option<u64>,
    /// JSON sequence spec `{group, family, params, max_index}`; overrides the flags above.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub max: usize,
    /// Dimension of the embedded `Z^d` used for defects (default: the free rank, or 1).
    #[arg(long)]
    pub dim: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Dbm,
    LemmaAb,
    LemmaFf,
    LemmaF1f2,
    LowerBound,
    Growth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OraclePredicate {
    /// The corrected inequality with the `(1−2d²δ)` factor.
    Dbm,
    /// `|A+B| ≥ (|A|^{1/d}+|B|^{1/d})^d`, which is false.
    NaiveBm,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub check: Check,
    #[command(flatten)]
    pub source: SourceArgs,
    /// Check the family members F_1..F_max.
    #[arg(long)]
    pub max: Option<usize>,
    /// Set literal files: `--a`/`--b` for dbm and lemma-ab.
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<PathBuf>,
    /// Set literal files: `--f` for lemma-ff, `--f1`/`--f2` for lemma-f1f2.
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long)]
    pub f1: Option<PathBuf>,
    #[arg(long)]
    pub f2: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Tempered constant for the growth check (default: the measured maximum).
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Box sides `L_1,L_2,…` in `Z^d`, evaluated in closed form.
    #[arg(long, value_delimiter = ',')]
    pub sides: Option<Vec<u64>>,
    /// Run the brute-force oracle: `--exhaustive d=1 side=8`.
    #[arg(long, num_args = 1..)]
    pub exhaustive: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "dbm")]
    pub predicate: OraclePredicate,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub max: usize,
    #[arg(long = "C")]
    pub c: f64,
    /// Number of indices to look for (default: as many as fit below `--max`).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ErgodicArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Indices of the sets to average over.
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 40, 80])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_PATHS)]
    pub paths: usize,
    /// Window of a product cylinder function, `x,y;x,y;…` (default: the origin).
    #[arg(long)]
    pub window: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Report name used when writing into the output directory.
    pub name: &'static str,
    pub body: String,
    /// False when a checked inequality failed.
    pub holds: bool,
    /// Human-readable one-line summary for stderr.
    pub summary: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.holds {
            0
        } else {
            1
        }
    }
}

/// Runs a parsed command without touching the filesystem for output.
pub fn run(config: &CommandConfig) -> Result<Outcome> {
    match &config.command {
        Command::Gen(args) => gen(args),
        Command::Report(args) => report(args),
        Command::Verify(args) => verify(args),
        Command::ExtractTempered(args) => extract(args),
        Command::Ergodic(args) => ergodic(args),
    }
}

/// Parses `args`, runs, writes the report, and returns the exit code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match CommandConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match run(&config).and_then(|outcome| emit(&config, &outcome, stdout).map(|_| outcome)) {
        Ok(outcome) => {
            if let Some(s) = &outcome.summary {
                let _ = writeln!(stderr, "{s}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            let record = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            let _ = writeln!(stderr, "{record}");
            2
        }
    }
}

/// Entry point for the binary.
pub fn main() -> ! {
    let code = main_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code)
}

fn out_flag(config: &CommandConfig) -> Option<&PathBuf> {
    match &config.command {
        Command::Gen(a) => a.out.as_ref(),
        Command::Report(a) => a.output.out.as_ref(),
        Command::Verify(a) => a.out.as_ref(),
        Command::ExtractTempered(a) => a.out.as_ref(),
        Command::Ergodic(a) => a.output.out.as_ref(),
    }
}

fn emit(config: &CommandConfig, outcome: &Outcome, stdout: &mut dyn Write) -> Result<()> {
    let path = match out_flag(config) {
        Some(p) => Some(p.clone()),
        None => std::env::var_os(OUT_DIR_ENV).map(|dir| PathBuf::from(dir).join(outcome.name)),
    };
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&p, &outcome.body)?;
        }
        None => stdout.write_all(outcome.body.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| LabError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn descriptor(source: &SourceArgs) -> Result<GroupDescriptor> {
    match &source.group {
        Some(g) => parse_group_dsl(g),
        None => Err(LabError::InvalidArgument("--group is required".into())),
    }
}

fn sequence_spec(source: &SourceArgs, max_index: usize) -> Result<FolnerSequenceSpec> {
    if let Some(path) = &source.spec {
        let text = std::fs::read_to_string(path)?;
        let record: SequenceSpecRecord =
            serde_json::from_str(&text).map_err(|e| LabError::InvalidArgument(format!("{}: {e}", path.display())))?;
        return SequenceSpecRecord { max_index: max_index.min(record.max_index), ..record }.to_spec();
    }
    let mut params = BTreeMap::new();
    if let Some(h) = source.height {
        params.insert("height".to_string(), serde_json::json!(h));
    }
    SequenceSpecRecord {
        group: descriptor(source)?.to_string(),
        family: source.family.clone(),
        params,
        max_index,
    }
    .to_spec()
}

fn embedding(desc: &GroupDescriptor, dim: Option<usize>) -> Result<ZdEmbedding> {
    let d = dim.unwrap_or_else(|| desc.free_rank().unwrap_or(1));
    ZdEmbedding::standard(desc, d)
}

fn gen(args: &GenArgs) -> Result<Outcome> {
    let spec = sequence_spec(&args.source, args.n)?;
    let set = spec.generate(args.n)?;
    let header = format!("# {} {} n={} size={}\n", spec.descriptor, spec.family.name(), args.n, set.len());
    Ok(Outcome { name: "gen.txt", body: header + &render_set_literal(&set), holds: true, summary: None })
}

fn report(args: &ReportArgs) -> Result<Outcome> {
    let spec = sequence_spec(&args.source, args.max)?;
    let seq = spec.sequence()?;
    let rep = sequence_report(&seq, &embedding(&spec.descriptor, args.dim)?)?;
    Ok(match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => Outcome { name: "report.csv", body: rep.to_csv()?, holds: true, summary: None },
        Format::Json => Outcome { name: "report.json", body: json(&rep)?, holds: true, summary: None },
    })
}

fn read_set(desc: &GroupDescriptor, path: &Option<PathBuf>, flag: &str) -> Result<FiniteGroupSet> {
    let path = path.as_ref().ok_or_else(|| LabError::InvalidArgument(format!("--{flag} is required")))?;
    parse_set_literal(desc, &std::fs::read_to_string(path)?)
}

#[derive(Serialize)]
struct OracleRecord<'a> {
    statement: &'static str,
    pairs: u64,
    violations: u64,
    #[serde(flatten)]
    verdict: &'a OracleVerdict,
}

fn exhaustive(args: &VerifyArgs, items: &[String]) -> Result<Outcome> {
    if args.check != Check::Dbm {
        return Err(LabError::InvalidArgument("--exhaustive applies to `verify dbm` only".into()));
    }
    let mut d = None;
    let mut side = None;
    for item in items {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| LabError::InvalidArgument(format!("expected key=value, got {item:?}")))?;
        let value: usize =
            value.parse().map_err(|_| LabError::InvalidArgument(format!("{key} must be an integer")))?;
        match key {
            "d" => d = Some(value),
            "side" => side = Some(value),
            other => return Err(LabError::InvalidArgument(format!("unknown key {other:?}"))),
        }
    }
    let (Some(d), Some(side)) = (d, side) else {
        return Err(LabError::InvalidArgument("--exhaustive needs d=… and side=…".into()));
    };
    let predicate = args.predicate;
    let verdict = brute_force_oracle(d, side, |pair| {
        let size = pair.sumset_size();
        match predicate {
            OraclePredicate::NaiveBm => size as f64 >= naive_bm_bound(d, pair.a_len(), pair.b_len()) - 1e-9,
            OraclePredicate::Dbm => {
                match (pair.a_set(), pair.b_set()) {
                    (Ok(a), Ok(b)) => check_discrete_bm(&a, &b).is_ok_and(|r| r.holds && r.lhs == size as u128),
                    _ => false,
                }
            }
        }
    })?;
    let summary = format!("{} pairs, {} violations", verdict.pairs, verdict.failures);
    let record = OracleRecord { statement: "DBM", pairs: verdict.pairs, violations: verdict.failures, verdict: &verdict };
    Ok(Outcome { name: "verify-dbm-exhaustive.json", body: json(&record)?, holds: verdict.holds(), summary: Some(summary) })
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    if let Some(items) = &args.exhaustive {
        return exhaustive(args, items);
    }
    let name = match args.check {
        Check::Dbm => "verify-dbm.json",
        Check::LemmaAb => "verify-lemma-ab.json",
        Check::LemmaFf => "verify-lemma-ff.json",
        Check::LemmaF1f2 => "verify-lemma-f1f2.json",
        Check::LowerBound => "verify-lower-bound.json",
        Check::Growth => "verify-growth.json",
    };
    let finish = |reports: Vec<InequalityReport>| -> Result<Outcome> {
        let failures = reports.iter().filter(|r| !r.holds).count();
        let vacuous = reports.iter().filter(|r| r.vacuous).count();
        let summary = format!("{} instances, {failures} violations, {vacuous} vacuous", reports.len());
        Ok(Outcome { name, body: json(&reports)?, holds: failures == 0, summary: Some(summary) })
    };

    if matches!(args.check, Check::LowerBound | Check::Growth) {
        let rep = sequence_source(args)?;
        return match args.check {
            Check::LowerBound => {
                let check = lower_bound_from_report(&rep)?;
                let summary = format!(
                    "{} indices, max c_n = {:.6} against 2^d = {}",
                    check.reports.len(),
                    check.max_constant,
                    check.target
                );
                Ok(Outcome { name, body: json(&check)?, holds: check.all_hold(), summary: Some(summary) })
            }
            _ => {
                let c = match args.c {
                    Some(c) => c,
                    None => rep.max_tempered().map(to_f64).unwrap_or(1.0),
                };
                let check = growth_from_report(&rep, c)?;
                let verdict = check.verdict();
                let summary = format!("growth verdict: {}", serde_json::to_value(verdict).unwrap_or_default());
                let holds = verdict != crate::inequality::GrowthVerdict::Fails;
                Ok(Outcome { name, body: json(&check)?, holds, summary: Some(summary) })
            }
        };
    }

    if let Some(max) = args.max {
        let spec = sequence_spec(&args.source, max)?;
        let seq = spec.sequence()?;
        let emb = embedding(&spec.descriptor, args.dim)?;
        let mut reports = Vec::new();
        match args.check {
            Check::Dbm | Check::LemmaAb => {
                for (i, a) in seq.iter().enumerate() {
                    for b in &seq[..=i] {
                        if args.check == Check::Dbm {
                            reports.push(check_discrete_bm(a, b)?);
                        } else {
                            reports.extend(check_lemma_abelian_product(a, b, &emb)?);
                        }
                    }
                }
            }
            Check::LemmaFf => {
                for f in &seq {
                    reports.push(check_lemma_same_size(f, &emb)?);
                }
            }
            _ => {
                for w in seq.windows(2) {
                    reports.push(check_lemma_diff_size(&w[0], &w[1], &emb)?);
                }
            }
        }
        return finish(reports);
    }

    let desc = descriptor(&args.source)?;
    let emb = embedding(&desc, args.dim)?;
    let reports = match args.check {
        Check::Dbm => vec![check_discrete_bm(&read_set(&desc, &args.a, "a")?, &read_set(&desc, &args.b, "b")?)?],
        Check::LemmaAb => {
            check_lemma_abelian_product(&read_set(&desc, &args.a, "a")?, &read_set(&desc, &args.b, "b")?, &emb)?
                .to_vec()
        }
        Check::LemmaFf => vec![check_lemma_same_size(&read_set(&desc, &args.f, "f")?, &emb)?],
        _ => vec![check_lemma_diff_size(&read_set(&desc, &args.f1, "f1")?, &read_set(&desc, &args.f2, "f2")?, &emb)?],
    };
    finish(reports)
}

/// The sequence report behind `lower-bound` and `growth`: closed form for
/// `--sides`, enumeration of the family otherwise.
fn sequence_source(args: &VerifyArgs) -> Result<SequenceReport> {
    if let Some(sides) = &args.sides {
        let desc = descriptor(&args.source)?;
        let GroupDescriptor::FreeAbelian { d } = desc else {
            return Err(LabError::InvalidArgument("--sides needs a group Z^d".into()));
        };
        return nested_box_report(d, sides);
    }
    let max = args.max.ok_or_else(|| LabError::InvalidArgument("--max or --sides is required".into()))?;
    let spec = sequence_spec(&args.source, max)?;
    sequence_report(&spec.sequence()?, &embedding(&spec.descriptor, args.dim)?)
}

#[derive(Serialize)]
struct ExtractionRecord {
    group: String,
    family: String,
    c: f64,
    max_index: usize,
    complete: bool,
    indices: Vec<usize>,
    constants: Vec<f64>,
    max_constant: f64,
}

fn extract(args: &ExtractArgs) -> Result<Outcome> {
    let spec = sequence_spec(&args.source, args.max)?;
    let count = args.count.unwrap_or(args.max);
    let (indices, complete) = match extract_tempered(|n| spec.generate(n), spec.max_index, args.c, count) {
        Ok(e) => (e.indices, true),
        Err(LabError::Exhausted { found, .. }) if args.count.is_none() => (found, true),
        Err(LabError::Exhausted { found, .. }) => (found, false),
        Err(e) => return Err(e),
    };
    let sub = indices.iter().map(|&n| spec.generate(n)).collect::<Result<Vec<_>>>()?;
    let constants: Vec<f64> = tempered_constants(&sub)?.iter().map(to_f64).collect();
    let max_constant = constants.iter().cloned().fold(1.0, f64::max);
    let summary = format!("indices {indices:?}, max tempered constant {max_constant:.6}");
    let record = ExtractionRecord {
        group: spec.descriptor.to_string(),
        family: spec.family.name().to_string(),
        c: args.c,
        max_index: spec.max_index,
        complete,
        indices,
        constants,
        max_constant,
    };
    Ok(Outcome { name: "extract-tempered.json", body: json(&record)?, holds: complete, summary: Some(summary) })
}

fn parse_window(text: &str) -> Result<Vec<Vec<i64>>> {
    text.split(';')
        .map(|cell| {
            cell.split(',')
                .map(|x| x.trim().parse().map_err(|_| LabError::InvalidArgument(format!("bad window cell {cell:?}"))))
                .collect()
        })
        .collect()
}

fn ergodic(args: &ErgodicArgs) -> Result<Outcome> {
    let max = args.n.iter().copied().max().unwrap_or(0);
    let spec = sequence_spec(&args.source, max.max(1))?;
    let action = BernoulliAction::new(spec.descriptor.clone(), args.p, args.seed)?;
    let phi = match &args.window {
        None => CylinderFunction::origin(action.dim()),
        Some(w) => CylinderFunction::product(parse_window(w)?)?,
    };
    let sweep = convergence_sweep(&action, &phi, &spec, &args.n, args.paths)?;
    let summary = match sweep.slope {
        Some(s) => format!("log-log MSE slope {s:.4}"),
        None => "MSE vanishes at some index; slope undefined".to_string(),
    };
    Ok(match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => Outcome { name: "ergodic.csv", body: sweep.to_csv()?, holds: true, summary: Some(summary) },
        Format::Json => Outcome { name: "ergodic.json", body: json(&sweep)?, holds: true, summary: Some(summary) },
    })
}
