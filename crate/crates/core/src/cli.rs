//! Command-line front end.
//!
//! Every run starts with a provenance record (input hash, seed, mode, budget)
//! and then emits one record per result, either as `kind key=value …` text
//! lines or as JSON lines. Matrix-producing commands (`canonicalize`,
//! `spectrum`, `memory`) emit the matrix text format in text mode, with
//! metadata in `#` comments, so their output can be fed back in.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::core::{canonicalize, SpinVector};
use crate::dynamics::{default_max_sweeps, Outcome, Schedule, UpdateMode};
use crate::error::{Error, Result};
use crate::format::{join_reals, parse_graph, parse_matrix, parse_network, parse_patterns, write_matrix};
use crate::mincut::{brute_force_mincut_with_limit, mincut_heuristic, CutScope};
use crate::oracle::{
    brute_force_optimum_with_limit, enumerate_stable_vectors_with_limit, max_energy, Sense, DEFAULT_MAX_DIM,
};
use crate::spectral::{eigen_decompose, spectral_heuristic_with, HeuristicOptions, SpectralAnalysis, EIGEN_TOL};
use crate::stability::{
    eigencorner_stability, independent_count, stability_report, synthesize_memory, EigenCorner, PatternSet,
    StabilityKind,
};

/// Environment variable overriding the exhaustive-search dimension limit.
pub const BUDGET_ENV: &str = "SPINCUBE_BUDGET";

/// Relative tolerance under which a gap is reported as zero and the optimum
/// counts as attained.
const REPORT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "spincube",
    version,
    about = "Quadratic-form optimization over the ±1 hypercube"
)]
pub struct RunConfig {
    /// Seed for every random choice (random schedules, random starts).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Dimension limit for exhaustive scans (default 22, or $SPINCUBE_BUDGET).
    #[arg(long, global = true)]
    pub budget: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Serial, nodes in index order.
    Serial,
    /// Serial, a seeded random permutation per sweep.
    Random,
    /// All nodes at once.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Stable,
    AntiStable,
}

impl From<KindArg> for StabilityKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Stable => StabilityKind::Stable,
            KindArg::AntiStable => StabilityKind::AntiStable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SenseArg {
    Max,
    Min,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetrize and zero the diagonal of a matrix.
    Canonicalize { input: PathBuf },
    /// Eigenvalues and eigenvectors of a symmetric matrix.
    Spectrum { input: PathBuf },
    /// Spectral start followed by serial dynamics.
    Heuristic {
        /// Matrix file, optionally followed by a threshold line.
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Serial)]
        mode: ModeArg,
        #[arg(long)]
        max_sweeps: Option<usize>,
    },
    /// Run the network from a start state.
    Dynamics {
        /// Network file (thresholds line optional).
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Serial)]
        mode: ModeArg,
        /// Update this many nodes at once (serial schedules only).
        #[arg(long)]
        block: Option<usize>,
        /// Start state as a `+`/`-` string; a seeded random corner otherwise.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        max_sweeps: Option<usize>,
        /// Write `step, energy, state` lines to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Stability of one corner, or all stable and anti-stable corners.
    Stable {
        input: PathBuf,
        #[arg(long)]
        vector: Option<String>,
    },
    /// Exhaustive optimum, or exhaustive stable-vector listing with `--kind`.
    Brute {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = SenseArg::Max)]
        sense: SenseArg,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Minimum cut of a weighted graph.
    Mincut {
        input: PathBuf,
        /// Exhaustive minimum.
        #[arg(long)]
        exact: bool,
        /// Spectral search on the graph's network.
        #[arg(long)]
        heuristic: bool,
        /// Exclude the cut with every vertex on one side.
        #[arg(long)]
        nontrivial: bool,
    },
    /// Weight matrix storing orthogonal patterns.
    Memory { input: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Canonicalize { .. } => "canonicalize",
            Command::Spectrum { .. } => "spectrum",
            Command::Heuristic { .. } => "heuristic",
            Command::Dynamics { .. } => "dynamics",
            Command::Stable { .. } => "stable",
            Command::Brute { .. } => "brute",
            Command::Mincut { .. } => "mincut",
            Command::Memory { .. } => "memory",
        }
    }

    fn input(&self) -> &Path {
        match self {
            Command::Canonicalize { input }
            | Command::Spectrum { input }
            | Command::Heuristic { input, .. }
            | Command::Dynamics { input, .. }
            | Command::Stable { input, .. }
            | Command::Brute { input, .. }
            | Command::Mincut { input, .. }
            | Command::Memory { input } => input,
        }
    }

    fn mode_label(&self) -> String {
        match self {
            Command::Heuristic { mode, .. } => mode_name(*mode, None),
            Command::Dynamics { mode, block, .. } => mode_name(*mode, *block),
            _ => "none".into(),
        }
    }
}

fn mode_name(mode: ModeArg, block: Option<usize>) -> String {
    let base = match mode {
        ModeArg::Serial => "serial",
        ModeArg::Random => "serial-random",
        ModeArg::Parallel => "parallel",
    };
    match block {
        Some(b) if mode != ModeArg::Parallel => format!("{base}-block{b}"),
        _ => base.into(),
    }
}

fn schedule(mode: ModeArg, seed: u64) -> Schedule {
    match mode {
        ModeArg::Random => Schedule::RandomPermutation { seed },
        _ => Schedule::RoundRobin,
    }
}

/// Resolves the exhaustive-search limit: flag, then environment, then default.
pub fn resolve_budget(flag: Option<usize>) -> Result<usize> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{BUDGET_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

/// Collects records and renders them in the selected format.
struct Report {
    format: OutputFormat,
    out: String,
}

impl Report {
    fn new(format: OutputFormat) -> Self {
        Self {
            format,
            out: String::new(),
        }
    }

    fn record(&mut self, kind: &str, fields: Value) {
        let Value::Object(fields) = fields else {
            unreachable!("records are built from json objects")
        };
        match self.format {
            OutputFormat::Text => {
                self.out.push_str(kind);
                for (k, v) in &fields {
                    write!(self.out, " {k}={}", text_value(v)).expect("write to String");
                }
                self.out.push('\n');
            }
            OutputFormat::JsonLines => {
                let mut obj = Map::new();
                obj.insert("record".into(), Value::String(kind.into()));
                obj.extend(fields);
                self.out.push_str(&Value::Object(obj).to_string());
                self.out.push('\n');
            }
        }
    }

    /// Verbatim text-mode output; ignored in JSON mode.
    fn text(&mut self, s: &str) {
        if self.format == OutputFormat::Text {
            self.out.push_str(s);
        }
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            // Adding zero turns -0 into 0.
            Some(f) if n.is_f64() => format!("{}", f + 0.0),
            _ => n.to_string(),
        },
        Value::Array(items) => items.iter().map(text_value).collect::<Vec<_>>().join(","),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn snap(gap: f64, scale: f64) -> f64 {
    if gap.abs() <= REPORT_TOL * scale.abs().max(1.0) {
        0.0
    } else {
        gap
    }
}

/// Runs one command, writing the report to `out`. Returns the exit status:
/// 0 on success, 1 for input and precondition errors, 2 for budget and
/// numerical failures. Diagnostics go to `err`.
pub fn run_command(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cfg) {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(e) => {
            let _ = writeln!(
                err,
                "spincube {}: {}: {e}",
                cfg.command.name(),
                cfg.command.input().display()
            );
            if e.is_budget_or_numerical() {
                2
            } else {
                1
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run_command(&cfg, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            code
        }
    }
}

fn read_input(path: &Path) -> Result<(String, String)> {
    let bytes = std::fs::read(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let hash = format!("{:x}", Sha256::digest(&bytes));
    let text =
        String::from_utf8(bytes).map_err(|_| Error::InvalidInput(format!("{} is not valid UTF-8", path.display())))?;
    Ok((text, hash))
}

fn execute(cfg: &RunConfig) -> Result<String> {
    let budget = resolve_budget(cfg.budget)?;
    let (text, hash) = read_input(cfg.command.input())?;
    let mut report = Report::new(cfg.format);
    let provenance = json!({
        "command": cfg.command.name(),
        "input": cfg.command.input().display().to_string(),
        "sha256": hash,
        "seed": cfg.seed,
        "mode": cfg.command.mode_label(),
        "budget": budget,
    });
    match cfg.format {
        OutputFormat::Text => {
            let Value::Object(fields) = &provenance else {
                unreachable!()
            };
            report.out.push_str("# provenance");
            for (k, v) in fields {
                write!(report.out, " {k}={}", text_value(v)).expect("write to String");
            }
            report.out.push('\n');
        }
        OutputFormat::JsonLines => report.record("provenance", provenance),
    }

    match &cfg.command {
        Command::Canonicalize { .. } => canonicalize_cmd(&text, &mut report)?,
        Command::Spectrum { .. } => spectrum_cmd(&text, &mut report)?,
        Command::Heuristic { mode, max_sweeps, .. } => {
            heuristic_cmd(&text, *mode, *max_sweeps, cfg.seed, budget, &mut report)?
        }
        Command::Dynamics {
            mode,
            block,
            start,
            max_sweeps,
            export,
            ..
        } => dynamics_cmd(
            &text,
            DynamicsArgs {
                mode: *mode,
                block: *block,
                start: start.as_deref(),
                max_sweeps: *max_sweeps,
                export: export.as_deref(),
                seed: cfg.seed,
            },
            &mut report,
        )?,
        Command::Stable { vector, .. } => stable_cmd(&text, vector.as_deref(), budget, &mut report)?,
        Command::Brute { sense, kind, .. } => brute_cmd(&text, *sense, *kind, budget, &mut report)?,
        Command::Mincut {
            exact,
            heuristic,
            nontrivial,
            ..
        } => mincut_cmd(&text, *exact, *heuristic, *nontrivial, budget, &mut report)?,
        Command::Memory { .. } => memory_cmd(&text, &mut report)?,
    }
    Ok(report.out)
}

fn rows_json(m: &crate::core::SquareMatrix) -> Value {
    Value::Array(m.rows().map(|r| json!(r)).collect())
}

fn canonicalize_cmd(text: &str, report: &mut Report) -> Result<()> {
    let b = parse_matrix(text)?;
    let sym_trace = b.trace();
    let c = canonicalize(&b);
    report.text(&format!("# trace of the symmetric part: {sym_trace}\n"));
    report.text(&write_matrix(c.as_matrix()));
    if report.format == OutputFormat::JsonLines {
        report.record(
            "canonical",
            json!({ "n": c.n(), "trace": sym_trace, "rows": rows_json(c.as_matrix()) }),
        );
    }
    Ok(())
}

fn spectrum_cmd(text: &str, report: &mut Report) -> Result<()> {
    let m = parse_matrix(text)?;
    let s = eigen_decompose(&m, EIGEN_TOL)?;
    let n = s.n();
    match report.format {
        OutputFormat::Text => {
            report.text("# columns are eigenvectors; the last line holds the eigenvalues, descending\n");
            let p = crate::core::SquareMatrix::from_fn(n, |i, j| s.eigenvectors()[j][i])?;
            report.text(&write_matrix(&p));
            report.text(&format!("{}\n", join_reals(s.eigenvalues())));
        }
        OutputFormat::JsonLines => report.record(
            "spectrum",
            json!({ "eigenvalues": s.eigenvalues(), "eigenvectors": s.eigenvectors() }),
        ),
    }
    Ok(())
}

fn heuristic_cmd(
    text: &str,
    mode: ModeArg,
    max_sweeps: Option<usize>,
    seed: u64,
    budget: usize,
    report: &mut Report,
) -> Result<()> {
    if mode == ModeArg::Parallel {
        return Err(Error::InvalidInput(
            "the heuristic runs serial dynamics; use --mode serial or random".into(),
        ));
    }
    let net = parse_network(text)?;
    let opts = HeuristicOptions {
        schedule: schedule(mode, seed),
        max_sweeps,
    };
    let h = spectral_heuristic_with(&net, opts)?;
    let canonical = canonicalize(net.weights());
    let corner_bound = SpectralAnalysis::new(canonical.as_matrix())?.corner_value_bound();
    // Energy = canonical form + trace(S) − 2·VᵀT, so the corner bound shifts.
    let threshold_mass: f64 = net.thresholds().values().iter().map(|t| t.abs()).sum();
    let bound = corner_bound + net.weights().trace() + 2.0 * threshold_mass;
    let gap = snap(bound - h.energy, bound);
    report.record(
        "heuristic",
        json!({
            "state": h.state.to_string(),
            "energy": h.energy,
            "start": h.start.to_string(),
            "start_energy": h.start_energy,
            "sweeps": h.trajectory.sweeps(),
            "stable": net.is_stable_state(&h.state)?,
            "top_eigenvalue": h.top_eigenvalue,
            "degenerate_top": h.degenerate_top,
            "bound": bound,
            "gap": gap,
        }),
    );
    match max_energy(&net, budget) {
        Ok(best) => {
            let attained = (best.value - h.energy).abs() <= REPORT_TOL * best.value.abs().max(1.0);
            report.record(
                "exact",
                json!({
                    "optimum": best.value,
                    "attained": attained,
                    "relative_gap": snap((best.value - h.energy) / best.value.abs().max(1.0), 1.0),
                    "maximizers": best.maximizers.iter().map(ToString::to_string).collect::<Vec<_>>(),
                }),
            );
        }
        Err(Error::Budget { n, limit }) => {
            report.record("exact", json!({ "skipped": format!("n+1={n} exceeds budget {limit}") }));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

struct DynamicsArgs<'a> {
    mode: ModeArg,
    block: Option<usize>,
    start: Option<&'a str>,
    max_sweeps: Option<usize>,
    export: Option<&'a Path>,
    seed: u64,
}

fn dynamics_cmd(text: &str, args: DynamicsArgs<'_>, report: &mut Report) -> Result<()> {
    let net = parse_network(text)?;
    let n = net.n();
    let start = match args.start {
        Some(s) => s.parse::<SpinVector>()?,
        None => {
            // Decorrelated from the schedule stream, which uses the seed directly.
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0x5EED_57A7);
            SpinVector::new((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())?
        }
    };
    let mode = match (args.mode, args.block) {
        (ModeArg::Parallel, None) => UpdateMode::FullyParallel,
        (ModeArg::Parallel, Some(_)) => {
            return Err(Error::InvalidInput("--block applies to serial schedules only".into()))
        }
        (m, None) => UpdateMode::Serial(schedule(m, args.seed)),
        (m, Some(size)) => UpdateMode::Blocked {
            size,
            schedule: schedule(m, args.seed),
        },
    };
    let max_sweeps = args.max_sweeps.unwrap_or_else(|| default_max_sweeps(n));
    let tr = net.run(&start, mode, max_sweeps)?;
    if let Some(path) = args.export {
        let mut body = tr.export_lines().join("\n");
        body.push('\n');
        std::fs::write(path, body).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    }
    let (outcome, states) = match tr.outcome() {
        Outcome::FixedPoint(v) => ("fixed-point", vec![v.to_string()]),
        Outcome::TwoCycle(a, b) => ("two-cycle", vec![a.to_string(), b.to_string()]),
        Outcome::StepLimit => ("step-limit", vec![]),
    };
    let stable = match tr.outcome() {
        Outcome::FixedPoint(v) => Value::Bool(net.is_stable_state(v)?),
        _ => Value::Null,
    };
    report.record(
        "dynamics",
        json!({
            "outcome": outcome,
            "states": states,
            "start": start.to_string(),
            "initial_energy": tr.initial_energy(),
            "final_energy": tr.final_energy(),
            "sweeps": tr.sweeps(),
            "flips": tr.flips(),
            "monotone": tr.energy_non_decreasing(),
            "stable": stable,
        }),
    );
    Ok(())
}

fn stable_cmd(text: &str, vector: Option<&str>, budget: usize, report: &mut Report) -> Result<()> {
    let m = parse_matrix(text)?;
    m.check_symmetric()?;
    if let Some(v) = vector {
        let x: SpinVector = v.parse()?;
        let r = stability_report(&m, &x)?;
        report.record(
            "report",
            json!({ "vector": r.vector.to_string(), "stable": r.stable, "anti_stable": r.anti_stable, "value": r.value }),
        );
        let eigen = match eigencorner_stability(&m, &x)? {
            EigenCorner::StableByEigen { eigenvalue } => {
                json!({ "class": "stable-by-eigen", "eigenvalue": eigenvalue })
            }
            EigenCorner::AntiStableByEigen { eigenvalue } => {
                json!({ "class": "anti-stable-by-eigen", "eigenvalue": eigenvalue })
            }
            EigenCorner::NotAnEigenvector => json!({ "class": "not-an-eigenvector" }),
        };
        report.record("eigen", eigen);
        return Ok(());
    }
    for kind in [StabilityKind::Stable, StabilityKind::AntiStable] {
        list_stable(&m, kind, budget, report)?;
    }
    Ok(())
}

fn kind_name(kind: StabilityKind) -> &'static str {
    match kind {
        StabilityKind::Stable => "stable",
        StabilityKind::AntiStable => "anti-stable",
    }
}

fn list_stable(m: &crate::core::SquareMatrix, kind: StabilityKind, budget: usize, report: &mut Report) -> Result<()> {
    let entries = enumerate_stable_vectors_with_limit(m, kind, budget)?;
    for e in &entries {
        report.record(
            kind_name(kind),
            json!({ "vector": e.vector.to_string(), "value": e.value, "negation_also": e.negation_also }),
        );
    }
    let vectors: Vec<SpinVector> = entries.iter().map(|e| e.vector.clone()).collect();
    let mut distinct: Vec<f64> = entries.iter().map(|e| e.value).collect();
    distinct.dedup();
    let corners: usize = entries.iter().map(|e| if e.negation_also { 2 } else { 1 }).sum();
    report.record(
        "summary",
        json!({
            "kind": kind_name(kind),
            "classes": entries.len(),
            "corners": corners,
            "independent": independent_count(&vectors),
            "distinct_values": distinct.len(),
        }),
    );
    Ok(())
}

fn brute_cmd(text: &str, sense: SenseArg, kind: Option<KindArg>, budget: usize, report: &mut Report) -> Result<()> {
    let m = parse_matrix(text)?;
    if let Some(kind) = kind {
        m.check_symmetric()?;
        return list_stable(&m, kind.into(), budget, report);
    }
    let sense = match sense {
        SenseArg::Max => Sense::Max,
        SenseArg::Min => Sense::Min,
    };
    let r = brute_force_optimum_with_limit(&m, sense, budget)?;
    report.record(
        "optimum",
        json!({
            "sense": match sense { Sense::Max => "max", Sense::Min => "min" },
            "value": r.optimum_value,
            "corners_scanned": r.corners_scanned,
            "optimizers": r.optimizers.len(),
        }),
    );
    for x in &r.optimizers {
        report.record(
            "optimizer",
            json!({ "vector": x.to_string(), "value": r.optimum_value }),
        );
    }
    Ok(())
}

fn mincut_cmd(
    text: &str,
    exact: bool,
    heuristic: bool,
    nontrivial: bool,
    budget: usize,
    report: &mut Report,
) -> Result<()> {
    let g = parse_graph(text)?;
    let (run_exact, run_heuristic) = if exact || heuristic {
        (exact, heuristic)
    } else {
        (true, true)
    };
    let scope = if nontrivial {
        CutScope::NonTrivial
    } else {
        CutScope::All
    };
    let mut heuristic_weight = None;
    if run_heuristic {
        let h = mincut_heuristic(&g)?;
        report.record(
            "heuristic",
            json!({ "partition": h.cut.partition.to_string(), "weight": h.cut.weight, "energy": h.search.energy }),
        );
        heuristic_weight = Some(h.cut.weight);
    }
    if run_exact {
        let r = brute_force_mincut_with_limit(&g, scope, budget)?;
        report.record(
            "exact",
            json!({
                "partition": r.best.partition.to_string(),
                "weight": r.best.weight,
                "ties": r.minimizers.len(),
                "scope": if nontrivial { "non-trivial" } else { "all" },
                "partitions_scanned": r.partitions_scanned,
            }),
        );
        if let Some(hw) = heuristic_weight {
            report.record("gap", json!({ "value": snap(hw - r.best.weight, r.best.weight) }));
        }
    }
    Ok(())
}

fn memory_cmd(text: &str, report: &mut Report) -> Result<()> {
    let patterns = PatternSet::new(parse_patterns(text)?)?;
    let mem = synthesize_memory(&patterns);
    let (n, s) = (patterns.dim(), patterns.len());
    let mut pattern_records = Vec::new();
    for p in patterns.patterns() {
        let r = stability_report(&mem.weights, p)?;
        pattern_records.push(json!({ "vector": p.to_string(), "stable": r.stable, "value": r.value }));
    }
    match report.format {
        OutputFormat::Text => {
            report.text(&format!(
                "# memory n={n} patterns={s} eigenvalue={} saturated={}\n",
                n - s,
                mem.saturated
            ));
            for r in &pattern_records {
                report.text(&format!(
                    "# pattern {} stable={} value={}\n",
                    r["vector"].as_str().unwrap_or(""),
                    r["stable"],
                    text_value(&r["value"])
                ));
            }
            report.text(&write_matrix(&mem.weights));
        }
        OutputFormat::JsonLines => {
            report.record(
                "memory",
                json!({ "n": n, "patterns": s, "saturated": mem.saturated, "rows": rows_json(&mem.weights) }),
            );
            for r in pattern_records {
                report.record("pattern", r);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_on(args: &[&str], input: &str) -> (i32, String, String) {
        let dir = std::env::temp_dir().join(format!("spincube-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(format!("{}.txt", args.join("_").replace(['-', '/'], "")));
        std::fs::write(&path, input).unwrap();
        let mut full = vec!["spincube"];
        full.extend_from_slice(args);
        full.push(path.to_str().unwrap());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn heuristic_pair_report() {
        let (code, out, _) = run_on(&["heuristic"], "2\n0 2\n2 0\n");
        assert_eq!(code, 0);
        let line = out.lines().find(|l| l.starts_with("heuristic ")).unwrap();
        assert!(line.contains(" state=++ "), "{line}");
        assert!(line.contains(" energy=4 "), "{line}");
        assert!(line.contains(" bound=4"), "{line}");
        assert!(line.contains(" gap=0"), "{line}");
        assert!(out.contains("exact attained=true"), "{out}");
    }

    #[test]
    fn brute_pair_report() {
        let (code, out, _) = run_on(&["brute", "--sense", "max"], "2\n0 2\n2 0\n");
        assert_eq!(code, 0);
        assert!(
            out.contains("optimum corners_scanned=2 optimizers=1 sense=max value=4"),
            "{out}"
        );
        assert!(out.contains("optimizer value=4 vector=++"), "{out}");
    }

    #[test]
    fn mincut_triangle_report() {
        let (code, out, _) = run_on(&["mincut", "--exact", "--nontrivial"], "3 3\n0 1 1\n1 2 1\n0 2 1\n");
        assert_eq!(code, 0);
        assert!(out.contains(" weight=2"), "{out}");
    }

    #[test]
    fn parse_errors_exit_one() {
        let (code, _, err) = run_on(&["brute"], "2\n0 2\n2 zz\n");
        assert_eq!(code, 1);
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn budget_errors_exit_two() {
        let (code, _, err) = run_on(&["--budget", "1", "brute"], "2\n0 2\n2 0\n");
        assert_eq!(code, 2);
        assert!(err.contains("budget"), "{err}");
    }

    #[test]
    fn unknown_subcommand_exits_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(main_with_args(["spincube", "frobnicate"], &mut out, &mut err), 1);
        assert!(!err.is_empty());
    }

    #[test]
    fn json_lines_are_objects() {
        let (code, out, _) = run_on(&["--format", "json-lines", "stable"], "2\n0 2\n2 0\n");
        assert_eq!(code, 0);
        for line in out.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v.get("record").is_some());
        }
    }
}
