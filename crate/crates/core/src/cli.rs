//! Command-line front end: builds a triple from a catalog entry or a TOML
//! config, runs one command and renders a versioned JSON or Markdown report.
//!
//! Exit codes: 0 certified or plain success, 10 violation found,
//! 20 inconclusive or estimate only, 30 unrealizable entry, 2 input error,
//! 1 internal failure.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog;
use crate::condition::{
    builtin_witness, certify_bracket_intersection_with, certify_positive_curvature, estimate_inf_rho, verify_sequence,
    verify_witness_with, SearchOptions, SparseElement, Thresholds, Verdict, WorkCounters,
};
use crate::error::{Error, Result};
use crate::linalg::{LieSubspace, MatrixElement, DEFAULT_TOL};
use crate::optimize::Execution;
use crate::triple::{decompose_with_seed, Decomposition, Triple, TripleMeta};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VIOLATION: i32 = 10;
pub const EXIT_INCONCLUSIVE: i32 = 20;
pub const EXIT_UNREALIZABLE: i32 = 30;

#[derive(Debug, Parser)]
#[command(
    name = "collar",
    version,
    about = "Check the collar bracket condition on Lie triples h < k < g"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print dimensions, residuals and Phi1/Phi2 flags of the decomposition.
    Decompose(RunArgs),
    /// Try the bracket certificate, then the curvature certificate.
    Certify(RunArgs),
    /// Verify a closed-form witness, else search for a commuting pair.
    Refute(RunArgs),
    /// Multistart estimate of inf rho.
    Estimate(RunArgs),
    /// List catalog entries, optionally filtered by tags such as `rank=8`.
    Catalog(CatalogArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Catalog entry `id[:p=N]`.
    #[arg(value_name = "ENTRY")]
    pub positional: Option<String>,
    /// Catalog entry `id[:p=N]`.
    #[arg(long)]
    pub entry: Option<String>,
    /// TOML config naming an entry or giving raw generators.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rank tolerance for the decomposition.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CatalogArgs {
    /// Filter tags: `rank=N`, `realizable=BOOL`, `certified=BOOL`, `expected=KIND`.
    pub tags: Vec<String>,
    /// Show a single entry.
    #[arg(long)]
    pub entry: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Sparse skew generators: each basis element is a list of `[r, s, value]`.
pub type SparseBasis = Vec<Vec<(usize, usize, f64)>>;

/// `g` is either `"so"` (all of `so(n)`) or an explicit basis.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum AmbientSpec {
    Named(String),
    Basis(SparseBasis),
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawTriple {
    pub name: Option<String>,
    pub n: usize,
    pub g: AmbientSpec,
    pub k: SparseBasis,
    #[serde(default)]
    pub h: SparseBasis,
    pub positively_curved: Option<String>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawPair {
    pub x: Vec<(usize, usize, f64)>,
    pub y: Vec<(usize, usize, f64)>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub entry: Option<String>,
    pub triple: Option<RawTriple>,
    pub tol: Option<f64>,
    pub restarts: Option<usize>,
    pub iters: Option<usize>,
    pub seed: Option<u64>,
    pub thresholds: Option<Thresholds>,
    pub witness: Option<RawPair>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            field: config_field(&e),
            msg: e.message().to_string(),
        })
    }
}

fn config_field(e: &toml::de::Error) -> String {
    let msg = e.message();
    for marker in ["unknown field `", "missing field `"] {
        if let Some(rest) = msg.split_once(marker).map(|(_, r)| r) {
            if let Some((f, _)) = rest.split_once('`') {
                return f.to_string();
            }
        }
    }
    match e.span() {
        Some(span) => format!("config (bytes {}..{})", span.start, span.end),
        None => "config".into(),
    }
}

/// Where the triple comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Entry(String),
    Raw(RawTriple),
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub tol: f64,
    pub search: SearchOptions,
    pub thresholds: Thresholds,
    pub witness: Option<RawPair>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Merges flags over the config file; flags win.
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
                    field: "config".into(),
                    msg: format!("cannot read {}: {e}", path.display()),
                })?;
                ConfigFile::parse(&text)?
            }
            None => ConfigFile::default(),
        };
        let flag_entry = args.entry.clone().or_else(|| args.positional.clone());
        let source = match (flag_entry, file.entry, file.triple) {
            (Some(e), _, _) => Source::Entry(e),
            (None, Some(_), Some(_)) => {
                return Err(Error::Config {
                    field: "entry".into(),
                    msg: "give either `entry` or `[triple]`, not both".into(),
                })
            }
            (None, Some(e), None) => Source::Entry(e),
            (None, None, Some(t)) => Source::Raw(t),
            (None, None, None) => {
                return Err(Error::Config {
                    field: "entry".into(),
                    msg: "no entry given (positional, --entry, or a config with `entry` or `[triple]`)".into(),
                })
            }
        };
        let defaults = SearchOptions::default();
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::Config {
                field: "tol".into(),
                msg: format!("{tol} is not in (0, 1)"),
            });
        }
        let search = SearchOptions {
            restarts: args.restarts.or(file.restarts).unwrap_or(defaults.restarts),
            iters: args.iters.or(file.iters).unwrap_or(defaults.iters),
            seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
            exec: Execution::default(),
        };
        if search.restarts == 0 {
            return Err(Error::Config {
                field: "restarts".into(),
                msg: "must be at least 1".into(),
            });
        }
        Ok(Self {
            source,
            tol,
            search,
            thresholds: file.thresholds.unwrap_or_default(),
            witness: file.witness,
            format: args.format,
            out: args.out.clone(),
        })
    }

    fn entry_spec(&self) -> Option<&str> {
        match &self.source {
            Source::Entry(e) => Some(e),
            Source::Raw(_) => None,
        }
    }
}

fn basis_space(n: usize, basis: &SparseBasis, field: &str, tol: f64) -> Result<LieSubspace> {
    let mut elems = Vec::with_capacity(basis.len());
    for (i, b) in basis.iter().enumerate() {
        let e = SparseElement { n, entries: b.clone() }
            .to_element()
            .map_err(|e| Error::Config {
                field: format!("{field}[{i}]"),
                msg: e.to_string(),
            })?;
        elems.push(e);
    }
    Ok(LieSubspace::span(n, &elems, tol))
}

/// Builds a triple from raw generators.
pub fn build_raw(raw: &RawTriple, tol: f64) -> Result<Triple> {
    if raw.n < 2 {
        return Err(Error::Config {
            field: "triple.n".into(),
            msg: format!("ambient dimension {} is below 2", raw.n),
        });
    }
    let g = match &raw.g {
        AmbientSpec::Named(s) if s == "so" => LieSubspace::so(raw.n),
        AmbientSpec::Named(s) => {
            return Err(Error::Config {
                field: "triple.g".into(),
                msg: format!("`{s}` is not a known ambient (use \"so\" or an explicit basis)"),
            })
        }
        AmbientSpec::Basis(b) => basis_space(raw.n, b, "triple.g", tol)?,
    };
    let k = basis_space(raw.n, &raw.k, "triple.k", tol)?;
    let h = basis_space(raw.n, &raw.h, "triple.h", tol)?;
    let name = raw.name.clone().unwrap_or_else(|| "custom".into());
    let meta = TripleMeta {
        positively_curved: raw.positively_curved.clone(),
        notes: Vec::new(),
    };
    Ok(Triple::new(name, g, k, h)?.with_meta(meta))
}

fn build_triple(cfg: &RunConfig) -> Result<Triple> {
    match &cfg.source {
        Source::Entry(spec) => catalog::build_spec(spec),
        Source::Raw(raw) => build_raw(raw, cfg.tol),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TripleInfo {
    pub name: String,
    pub ambient_dim: usize,
    pub positively_curved: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ComponentInfo {
    pub dim: usize,
    pub eigenvalue: f64,
    pub possibly_reducible: bool,
    pub phi: Option<crate::triple::PhiClass>,
    pub phi_min_value: Option<f64>,
}

/// Report schema shared by all commands; keys absent for a command are null.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub triple: Option<TripleInfo>,
    pub dims: Option<Value>,
    pub verdict: Option<Verdict>,
    pub residuals: Option<Value>,
    pub timing: WorkCounters,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<ComponentInfo>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub catalog: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unrealizable: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            triple: None,
            dims: None,
            verdict: None,
            residuals: None,
            timing: WorkCounters::default(),
            seed: None,
            components: None,
            catalog: None,
            unrealizable: None,
            notes: Vec::new(),
        }
    }

    fn with_decomposition(command: &str, dec: &Decomposition, seed: u64) -> Self {
        let mut r = Self::new(command);
        r.triple = Some(TripleInfo {
            name: dec.triple.name.clone(),
            ambient_dim: dec.triple.ambient_dim(),
            positively_curved: dec.triple.meta.positively_curved.clone(),
        });
        let dims: serde_json::Map<String, Value> = dec
            .dim_summary()
            .into_iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        r.dims = Some(Value::Object(dims));
        r.residuals = Some(serde_json::to_value(dec.residuals()).expect("residuals serialize"));
        r.seed = Some(seed);
        r.notes = dec.triple.meta.notes.iter().chain(&dec.notes).cloned().collect();
        r
    }

    fn add_work(&mut self, w: WorkCounters) {
        self.timing.restarts += w.restarts;
        self.timing.iterations += w.iterations;
        self.timing.evaluations += w.evaluations;
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# collar {}", self.command);
        if let Some(t) = &self.triple {
            let _ = writeln!(s, "\nTriple `{}` in so({})", t.name, t.ambient_dim);
            if let Some(p) = &t.positively_curved {
                let _ = writeln!(s, "\nPositively curved quotient: {p}");
            }
        }
        if let Some(Value::Object(d)) = &self.dims {
            s.push_str("\n## Dimensions\n\n| space | dim |\n|---|---|\n");
            for (k, v) in d {
                let _ = writeln!(s, "| {k} | {v} |");
            }
        }
        if let Some(cs) = &self.components {
            s.push_str("\n## Components of s\n\n| # | dim | eigenvalue | class |\n|---|---|---|---|\n");
            for (i, c) in cs.iter().enumerate() {
                let class = c.phi.map_or("unclassified".to_string(), |p| format!("{p:?}"));
                let _ = writeln!(s, "| {i} | {} | {:.6} | {class} |", c.dim, c.eigenvalue);
            }
        }
        if let Some(v) = &self.verdict {
            let _ = writeln!(s, "\n## Verdict: {}\n", v.kind());
            let data = serde_json::to_value(v).expect("verdict serializes");
            let _ = writeln!(
                s,
                "```json\n{}\n```",
                serde_json::to_string_pretty(&data["data"]).expect("json")
            );
        }
        if let Some(Value::Object(r)) = &self.residuals {
            s.push_str("\n## Residuals\n\n| name | value |\n|---|---|\n");
            for (k, v) in r {
                let _ = writeln!(s, "| {k} | {v} |");
            }
        }
        if let Some(Value::Array(items)) = &self.catalog {
            s.push_str("\n| id | rank | expected | realizable |\n|---|---|---|---|\n");
            for e in items {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} |",
                    e["id"].as_str().unwrap_or(""),
                    e["rank"],
                    e["expected"].as_str().unwrap_or(""),
                    e["realizable"]
                );
            }
        }
        if let Some(u) = &self.unrealizable {
            let _ = writeln!(s, "\n## Unrealizable\n\n{}", u["note"].as_str().unwrap_or(""));
        }
        if !self.notes.is_empty() {
            s.push_str("\n## Notes\n\n");
            for n in &self.notes {
                let _ = writeln!(s, "- {n}");
            }
        }
        let t = &self.timing;
        let _ = writeln!(
            s,
            "\nWork: {} restarts, {} iterations, {} evaluations; seed {}",
            t.restarts,
            t.iterations,
            t.evaluations,
            self.seed.map_or("none".into(), |v| v.to_string())
        );
        s
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }
}

/// A finished command: report plus exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

fn verdict_exit(v: &Verdict) -> i32 {
    if v.is_certified() {
        EXIT_OK
    } else if v.is_violation() {
        EXIT_VIOLATION
    } else {
        EXIT_INCONCLUSIVE
    }
}

fn prepare(cfg: &RunConfig) -> Result<Decomposition> {
    decompose_with_seed(&build_triple(cfg)?, cfg.tol, cfg.search.seed)
}

pub fn cmd_decompose(cfg: &RunConfig) -> Result<Outcome> {
    let mut dec = prepare(cfg)?;
    dec.classify_components(cfg.search.restarts, cfg.search.seed, cfg.search.exec)?;
    let mut r = Report::with_decomposition("decompose", &dec, cfg.search.seed);
    r.components = Some(
        dec.components
            .iter()
            .map(|c| ComponentInfo {
                dim: c.space.dim(),
                eigenvalue: c.eigenvalue,
                possibly_reducible: c.possibly_reducible,
                phi: c.phi.as_ref().map(|p| p.class),
                phi_min_value: c.phi.as_ref().map(|p| p.min_value),
            })
            .collect(),
    );
    Ok(Outcome {
        report: r,
        exit_code: EXIT_OK,
    })
}

pub fn cmd_certify(cfg: &RunConfig) -> Result<Outcome> {
    let dec = prepare(cfg)?;
    let mut r = Report::with_decomposition("certify", &dec, cfg.search.seed);
    let mut v = certify_bracket_intersection_with(&dec, &cfg.search, &cfg.thresholds)?;
    if !v.is_certified() && dec.triple.meta.positively_curved.is_some() {
        let (cv, work) = certify_positive_curvature(&dec, &cfg.search, &cfg.thresholds)?;
        r.add_work(work);
        if cv.is_certified() {
            v = cv;
        }
    }
    let exit_code = verdict_exit(&v);
    r.verdict = Some(v);
    Ok(Outcome { report: r, exit_code })
}

fn catalog_witness(spec: &str) -> Result<Option<(Decomposition, MatrixElement, MatrixElement)>> {
    let (id, p) = catalog::parse_spec(spec)?;
    if !catalog::find(id)?.witness {
        return Ok(None);
    }
    let (t, x, y) = builtin_witness(id, p)?;
    Ok(Some((crate::triple::decompose(&t, DEFAULT_TOL)?, x, y)))
}

pub fn cmd_refute(cfg: &RunConfig) -> Result<Outcome> {
    let dec = prepare(cfg)?;
    let mut r = Report::with_decomposition("refute", &dec, cfg.search.seed);
    let n = dec.triple.ambient_dim();
    if let Some(pair) = &cfg.witness {
        let x = SparseElement {
            n,
            entries: pair.x.clone(),
        }
        .to_element()?;
        let y = SparseElement {
            n,
            entries: pair.y.clone(),
        }
        .to_element()?;
        let v = verify_witness_with(&dec, &x, &y, &cfg.thresholds)?;
        if v.is_violation() {
            r.notes.push("user-supplied witness".into());
            r.verdict = Some(v);
            return Ok(Outcome {
                report: r,
                exit_code: EXIT_VIOLATION,
            });
        }
        r.notes.push("user-supplied witness was not a violation".into());
    }
    if let Some(spec) = cfg.entry_spec() {
        let (id, _) = catalog::parse_spec(spec)?;
        if id == "g2-su2-sequence" {
            let v = verify_sequence(&dec, &[1, 2, 4, 8, 16, 32, 64])?;
            if v.is_violation() {
                r.notes.push("builtin violating sequence".into());
                let exit_code = verdict_exit(&v);
                r.verdict = Some(v);
                return Ok(Outcome { report: r, exit_code });
            }
        }
        if let Some((wdec, x, y)) = catalog_witness(spec)? {
            let v = verify_witness_with(&wdec, &x, &y, &cfg.thresholds)?;
            if v.is_violation() {
                r.notes.push("builtin witness".into());
                r.verdict = Some(v);
                return Ok(Outcome {
                    report: r,
                    exit_code: EXIT_VIOLATION,
                });
            }
            r.notes.push("builtin witness was not a violation; searching".into());
        }
    }
    let (est, work) = estimate_inf_rho(&dec, &cfg.search)?;
    r.add_work(work);
    if let Verdict::NumericalEstimate(e) = &est {
        if let Some((sx, sy)) = &e.argmin {
            let v = verify_witness_with(&dec, &sx.to_element()?, &sy.to_element()?, &cfg.thresholds)?;
            if v.is_violation() {
                r.notes.push(format!("search witness from restart {}", e.best_restart));
                r.verdict = Some(v);
                return Ok(Outcome {
                    report: r,
                    exit_code: EXIT_VIOLATION,
                });
            }
        }
    }
    let exit_code = verdict_exit(&est);
    r.verdict = Some(est);
    Ok(Outcome { report: r, exit_code })
}

pub fn cmd_estimate(cfg: &RunConfig) -> Result<Outcome> {
    let dec = prepare(cfg)?;
    let mut r = Report::with_decomposition("estimate", &dec, cfg.search.seed);
    let (v, work) = estimate_inf_rho(&dec, &cfg.search)?;
    r.add_work(work);
    let exit_code = verdict_exit(&v);
    r.verdict = Some(v);
    Ok(Outcome { report: r, exit_code })
}

pub fn cmd_catalog(args: &CatalogArgs) -> Result<Outcome> {
    let mut r = Report::new("catalog");
    let all = catalog::export_json();
    let items = all.as_array().cloned().unwrap_or_default();
    let selected: Vec<Value> = if let Some(spec) = &args.entry {
        let (id, _) = catalog::parse_spec(spec)?;
        catalog::find(id)?;
        items.into_iter().filter(|e| e["id"] == id).collect()
    } else {
        let tags: Vec<&str> = args.tags.iter().map(String::as_str).collect();
        let f = catalog::Filter::parse(&tags)?;
        let ids: Vec<&str> = catalog::list_entries(&f).iter().map(|e| e.id).collect();
        items
            .into_iter()
            .filter(|e| ids.iter().any(|id| e["id"] == *id))
            .collect()
    };
    r.catalog = Some(Value::Array(selected));
    Ok(Outcome {
        report: r,
        exit_code: EXIT_OK,
    })
}

fn unrealizable_outcome(command: &str, id: &str, note: &str) -> Outcome {
    let mut r = Report::new(command);
    r.unrealizable = Some(json!({ "id": id, "note": note }));
    Outcome {
        report: r,
        exit_code: EXIT_UNREALIZABLE,
    }
}

/// Exit code for an error that ends a command.
pub fn error_exit(e: &Error) -> i32 {
    match e {
        Error::Unrealizable { .. } => EXIT_UNREALIZABLE,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

/// Runs a parsed command. Unrealizable entries become a report with exit 30;
/// other errors are returned.
pub fn run(cli: &Cli) -> Result<(Outcome, Format, Option<PathBuf>)> {
    let (name, args) = match &cli.command {
        Command::Catalog(a) => return Ok((cmd_catalog(a)?, a.format, a.out.clone())),
        Command::Decompose(a) => ("decompose", a),
        Command::Certify(a) => ("certify", a),
        Command::Refute(a) => ("refute", a),
        Command::Estimate(a) => ("estimate", a),
    };
    let cfg = RunConfig::resolve(args)?;
    let result = match name {
        "decompose" => cmd_decompose(&cfg),
        "certify" => cmd_certify(&cfg),
        "refute" => cmd_refute(&cfg),
        _ => cmd_estimate(&cfg),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(Error::Unrealizable { id, note }) => unrealizable_outcome(name, &id, &note),
        Err(e) => return Err(e),
    };
    Ok((outcome, cfg.format, cfg.out))
}

/// Parses `argv`, runs, writes the report and returns the exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok((outcome, format, out)) => {
            let text = outcome.report.render(format);
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_INPUT;
                    }
                }
                None => print!("{text}"),
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_exit(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(entry: &str) -> RunArgs {
        RunArgs {
            positional: Some(entry.into()),
            entry: None,
            config: None,
            tol: None,
            restarts: Some(8),
            iters: Some(200),
            seed: None,
            format: Format::Json,
            out: None,
        }
    }

    #[test]
    fn config_reports_unknown_field() {
        let e = ConfigFile::parse("entry = \"sp-series\"\nrestart = 3\n").unwrap_err();
        match e {
            Error::Config { field, .. } => assert_eq!(field, "restart"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_reports_missing_field() {
        let e = ConfigFile::parse("[triple]\nn = 4\ng = \"so\"\n").unwrap_err();
        match e {
            Error::Config { field, .. } => assert_eq!(field, "k"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn raw_triple_builds() {
        let text = "[triple]\nname = \"so3-so4\"\nn = 4\ng = \"so\"\nk = [[[1, 2, 1]], [[1, 3, 1.0]], [[2, 3, 1.0]]]\nh = [[[1, 2, 1.0]]]\n";
        let cfg = ConfigFile::parse(text).unwrap();
        let t = build_raw(cfg.triple.as_ref().unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!((t.g.dim(), t.k.dim(), t.h.dim()), (6, 3, 1));
    }

    #[test]
    fn raw_triple_rejects_bad_index() {
        let text = "[triple]\nn = 3\ng = \"so\"\nk = [[[1, 4, 1.0]]]\n";
        let cfg = ConfigFile::parse(text).unwrap();
        match build_raw(cfg.triple.as_ref().unwrap(), DEFAULT_TOL).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "triple.k[0]"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn decompose_reports_dims() {
        let cfg = RunConfig::resolve(&args("g2-so0-7-in-so8")).unwrap();
        let o = cmd_decompose(&cfg).unwrap();
        let d = o.report.dims.unwrap();
        assert_eq!(
            (d["h"].as_u64(), d["m"].as_u64(), d["s"].as_u64()),
            (Some(14), Some(7), Some(7))
        );
        assert_eq!(o.exit_code, EXIT_OK);
    }

    #[test]
    fn refute_uses_builtin_witness() {
        let cfg = RunConfig::resolve(&args("spin-octonion-case1:p=0")).unwrap();
        let o = cmd_refute(&cfg).unwrap();
        assert_eq!(o.exit_code, EXIT_VIOLATION);
        assert_eq!(o.report.verdict.unwrap().kind(), "ViolationWitness");
    }

    #[test]
    fn unrealizable_exits_30() {
        let cli = Cli::try_parse_from(["collar", "certify", "f4-case"]).unwrap();
        let (o, _, _) = run(&cli).unwrap();
        assert_eq!(o.exit_code, EXIT_UNREALIZABLE);
        assert!(o.report.unrealizable.is_some());
    }

    #[test]
    fn markdown_renders_verdict() {
        let cfg = RunConfig::resolve(&args("spin-octonion-case1:p=0")).unwrap();
        let md = cmd_refute(&cfg).unwrap().report.to_markdown();
        assert!(md.contains("## Verdict: ViolationWitness"));
    }
}
