//! Command-line front end: `run`, `dict` and `compare`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aggregate::StoreRecord;
use crate::apps::{clique_counting, motif_counting, subgraph_listing, ListingPredicate};
use crate::balance::{BalanceConfig, CLIQUE_THRESHOLD, MOTIF_THRESHOLD};
use crate::canon::{CanonicalDictionary, EdgeBitmap};
use crate::engine::{Backend, EngineConfig, Mode, SimConfig, DEFAULT_LANE_WIDTH};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};
use crate::metrics::{self, Counts, RunReport, DEFAULT_SEGMENT_SIZE};
use crate::synth;

#[derive(Debug, Parser)]
#[command(name = "warpmine", version, about = "Warp-centric subgraph enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one application and print its counts.
    Run(RunArgs),
    /// Build a canonical-pattern dictionary file.
    Dict(DictArgs),
    /// Run dfs, wc and opt on the same input and compare them.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AppKind {
    Clique,
    Motifs,
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Threads,
    Sim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricsFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PredicateKind {
    All,
    Clique,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum)]
    app: AppKind,
    #[arg(long)]
    k: usize,
    /// Edge-list file, or `gen:<spec>` for a synthetic graph
    /// (`gen:er:N:P`, `gen:star:BLOBS:SIZE`, `gen:complete:N`, `gen:path:N`).
    #[arg(long)]
    graph: String,
    #[arg(long)]
    dict: Option<PathBuf>,
    #[arg(long)]
    warps: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_LANE_WIDTH)]
    lane_width: usize,
    #[arg(long, default_value_t = DEFAULT_SEGMENT_SIZE)]
    segment_size: usize,
    /// Defaults to 0.40 for cliques and 0.10 otherwise.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, default_value_t = 10)]
    poll_ms: u64,
    #[arg(long, value_enum, default_value_t = BackendKind::Threads)]
    backend: BackendKind,
    /// Seed for `gen:er` graphs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MetricsFormat::Text)]
    metrics_format: MetricsFormat,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "opt")]
    mode: Mode,
    /// Where listed subgraphs go (standard output if absent).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = PredicateKind::All)]
    predicate: PredicateKind,
}

#[derive(Debug, Args)]
struct DictArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
    /// Permit k = 8 (a 512 MiB table).
    #[arg(long)]
    allow_large: bool,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Perturbs the opt result so the mismatch path can be exercised.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = io::stdout();
    match execute(cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the command given by `args`, writing its standard output to `out`.
pub fn execute_args<I, T, W>(args: I, out: &mut W) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Config(e.to_string()))?;
    execute(cli.command, out)
}

fn execute<W: Write>(command: Command, out: &mut W) -> Result<()> {
    match command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Dict(a) => cmd_dict(&a, out),
        Command::Compare(a) => cmd_compare(&a, out),
    }
}

fn load_graph(spec: &str, seed: u64) -> Result<CsrGraph> {
    match spec.strip_prefix("gen:") {
        Some(g) if g.starts_with("er:") && g.split(':').count() == 3 => synth::from_spec(&format!("{g}:{seed}")),
        Some(g) => synth::from_spec(g),
        None => CsrGraph::from_path(spec),
    }
}

fn engine_config(c: &Common, mode: Mode) -> Result<EngineConfig> {
    let default_threshold = if c.app == AppKind::Clique { CLIQUE_THRESHOLD } else { MOTIF_THRESHOLD };
    let balance = BalanceConfig::new(c.threshold.unwrap_or(default_threshold), Duration::from_millis(c.poll_ms))?;
    let mut cfg = EngineConfig::default().with_mode(mode).with_lane_width(c.lane_width).with_balance(balance);
    if let Some(w) = c.warps {
        cfg = cfg.with_warps(w);
    }
    cfg.segment_size = c.segment_size;
    cfg.backend = match c.backend {
        BackendKind::Threads => Backend::Threads,
        BackendKind::Sim => Backend::Simulated(SimConfig::default()),
    };
    Ok(cfg)
}

fn load_dictionary(c: &Common) -> Result<CanonicalDictionary> {
    let path = c.dict.as_ref().ok_or_else(|| {
        Error::Dictionary("motif counting requires a dictionary (--dict PATH; build one with `dict`)".into())
    })?;
    let dict = CanonicalDictionary::load(path)?;
    if dict.k() != c.k {
        return Err(Error::Dictionary(format!("{} holds a k={} dictionary, expected k={}", path.display(), dict.k(), c.k)));
    }
    Ok(dict)
}

fn predicate(kind: PredicateKind, k: usize) -> Box<ListingPredicate> {
    match kind {
        PredicateKind::All => Box::new(|_: &[VertexId], _: EdgeBitmap| true),
        PredicateKind::Clique => {
            let full = crate::apps::complete_pattern(k);
            Box::new(move |_: &[VertexId], b: EdgeBitmap| b.bits() == full)
        }
    }
}

fn format_record(g: &CsrGraph, r: &StoreRecord) -> String {
    let mut s = String::new();
    for &v in &r.vertices {
        let _ = write!(s, "{} ", g.original_id(v));
    }
    let _ = write!(s, "{:x}", r.bitmap.bits());
    s
}

/// Outcome of a single engine run: the report plus listed records if any.
struct Outcome {
    report: RunReport,
    records: Vec<String>,
}

fn run_once(
    c: &Common,
    mode: Mode,
    graph: &CsrGraph,
    dict: Option<&CanonicalDictionary>,
    pred: PredicateKind,
) -> Result<Outcome> {
    let cfg = engine_config(c, mode)?;
    let name = match c.app {
        AppKind::Clique => "clique",
        AppKind::Motifs => "motifs",
        AppKind::List => "list",
    };
    let (counts, out, records) = match c.app {
        AppKind::Clique => {
            let (n, out) = clique_counting(graph, c.k, &cfg)?;
            (Counts::Cliques(n), out, Vec::new())
        }
        AppKind::Motifs => {
            let dict = dict.expect("dictionary loaded for motifs");
            let (counts, out) = motif_counting(graph, c.k, dict, &cfg)?;
            (Counts::Patterns(counts), out, Vec::new())
        }
        AppKind::List => {
            let p = predicate(pred, c.k);
            let mut records = Vec::new();
            let (n, out) = subgraph_listing(graph, c.k, p.as_ref(), &cfg, 1024, |r| records.push(format_record(graph, &r)))?;
            records.sort();
            (Counts::Listed(n), out, records)
        }
    };
    Ok(Outcome { report: out.to_report(name, c.k, counts), records })
}

fn write_metrics(c: &Common, reports: &[RunReport]) -> Result<()> {
    let Some(path) = &c.metrics else { return Ok(()) };
    let doc = match c.metrics_format {
        MetricsFormat::Text => metrics::report(reports),
        MetricsFormat::Json => serde_json::to_string_pretty(reports).expect("reports serialize"),
    };
    fs::write(path, doc)?;
    Ok(())
}

fn cmd_run<W: Write>(a: &RunArgs, out: &mut W) -> Result<()> {
    let c = &a.common;
    let dict = if c.app == AppKind::Motifs { Some(load_dictionary(c)?) } else { None };
    let graph = load_graph(&c.graph, c.seed)?;
    let o = run_once(c, a.mode, &graph, dict.as_ref(), a.predicate)?;
    match &o.report.counts {
        Counts::Cliques(n) => writeln!(out, "{n}")?,
        Counts::Patterns(p) => {
            for (id, n) in p.iter().enumerate() {
                writeln!(out, "{id} {n}")?;
            }
        }
        Counts::Listed(n) => match &a.output {
            Some(path) => {
                let mut f = io::BufWriter::new(fs::File::create(path)?);
                for r in &o.records {
                    writeln!(f, "{r}")?;
                }
                f.flush()?;
                writeln!(out, "{n}")?;
            }
            None => {
                for r in &o.records {
                    writeln!(out, "{r}")?;
                }
            }
        },
    }
    write_metrics(c, std::slice::from_ref(&o.report))
}

fn cmd_dict<W: Write>(a: &DictArgs, out: &mut W) -> Result<()> {
    let dict = CanonicalDictionary::build_with_limit(a.k, a.allow_large)?;
    dict.save(&a.out)?;
    writeln!(out, "{}", dict.pattern_count())?;
    Ok(())
}

fn cmd_compare<W: Write>(a: &CompareArgs, out: &mut W) -> Result<()> {
    let c = &a.common;
    let dict = if c.app == AppKind::Motifs { Some(load_dictionary(c)?) } else { None };
    let graph = load_graph(&c.graph, c.seed)?;
    let mut runs = Vec::new();
    for mode in Mode::ALL {
        let mut o = run_once(c, mode, &graph, dict.as_ref(), PredicateKind::All)?;
        if a.inject_fault && mode == Mode::Opt {
            perturb(&mut o.report.counts);
        }
        runs.push(o);
    }

    writeln!(out, "{:<5} {:>14} {:>12} {:>16} {:>16} {:>10} {:>14}", "mode", "count", "wall_ms", "instr_per_warp", "load_tx", "rebalances", "makespan")?;
    for o in &runs {
        let r = &o.report;
        let makespan = r.modeled_makespan.map_or_else(|| "-".to_string(), |m| m.to_string());
        writeln!(
            out,
            "{:<5} {:>14} {:>12.3} {:>16.1} {:>16} {:>10} {:>14}",
            r.mode,
            summary(&r.counts),
            r.wall_time_ms,
            r.instructions_per_warp,
            r.total_load_transactions,
            r.balance.rebalance_count,
            makespan
        )?;
    }
    let reports: Vec<RunReport> = runs.iter().map(|o| o.report.clone()).collect();
    let imp = metrics::improvement(&reports[0], &reports[1]);
    writeln!(out, "wc_over_dfs instructions_per_warp={:.3} load_transactions={:.3}", imp.instructions_per_warp, imp.load_transactions)?;
    write_metrics(c, &reports)?;

    let first = &runs[0];
    for o in &runs[1..] {
        if o.report.counts != first.report.counts || o.records != first.records {
            return Err(Error::Internal(format!("{} results differ from {}", o.report.mode, first.report.mode)));
        }
    }
    Ok(())
}

fn summary(c: &Counts) -> String {
    match c {
        Counts::Cliques(n) | Counts::Listed(n) => n.to_string(),
        Counts::Patterns(p) => p.iter().sum::<u64>().to_string(),
    }
}

fn perturb(c: &mut Counts) {
    match c {
        Counts::Cliques(n) | Counts::Listed(n) => *n += 1,
        Counts::Patterns(p) => match p.first_mut() {
            Some(x) => *x += 1,
            None => p.push(1),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<String> {
        let mut out = Vec::new();
        execute_args(std::iter::once("warpmine").chain(args.iter().copied()), &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn clique_on_generated_graph() {
        let out = run(&["run", "--app", "clique", "--k", "3", "--graph", "gen:example", "--mode", "wc", "--warps", "2"]).unwrap();
        assert_eq!(out, "2\n");
    }

    #[test]
    fn motifs_need_a_dictionary() {
        let err = run(&["run", "--app", "motifs", "--k", "3", "--graph", "gen:example"]).unwrap_err();
        assert!(err.to_string().contains("requires a dictionary"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn large_dictionary_needs_opt_in() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k8.dmcd");
        let err = run(&["dict", "--k", "8", "--out", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn injected_fault_is_an_invariant_violation() {
        let err = run(&["compare", "--app", "clique", "--k", "3", "--graph", "gen:example", "--warps", "2", "--inject-fault"])
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
