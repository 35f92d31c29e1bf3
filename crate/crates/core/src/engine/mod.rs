//! Filter-process execution engine: DFS-wide traversal enumerations driven
//! by warps, under one of three execution modes.
//!
//! * `Dfs`: every lane owns an enumeration and explores it alone.
//! * `Wc`: one enumeration per warp, primitives executed in lockstep.
//! * `Opt`: `Wc` plus coordinator-driven load balancing.
//!
//! All three produce identical aggregates; they differ in the modeled cost
//! recorded in each warp's ledger.

mod primitives;
mod queue;
mod runtime;
mod te;
mod warp;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::Serialize;

use crate::aggregate::{Aggregates, StoreProducer};
use crate::balance::BalanceConfig;
use crate::canon::CanonicalDictionary;
use crate::error::{Error, Result};
use crate::graph::CsrGraph;
use crate::metrics::{BalanceStats, CoalescenceLedger, Counts, RunReport, DEFAULT_SEGMENT_SIZE};

pub use primitives::{
    adjacency_mask, aggregate_counter, aggregate_pattern, aggregate_store, compact, control, extend, filter,
    move_step, Lanes,
};
pub use queue::RootQueue;
pub use runtime::{monitor_loop, stop_consistent, Workers};
pub use te::{Level, TraversalEnumeration, INVALID};
pub use warp::{run_warp, Executor, RunShared, WarpState, WarpStatus};

pub const DEFAULT_LANE_WIDTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Dfs,
    Wc,
    Opt,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Dfs, Mode::Wc, Mode::Opt];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Mode::Dfs => "dfs",
            Mode::Wc => "wc",
            Mode::Opt => "opt",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dfs" => Ok(Mode::Dfs),
            "wc" => Ok(Mode::Wc),
            "opt" => Ok(Mode::Opt),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// Virtual-time parameters of the simulated backend, in lockstep instructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub poll_cycles: u64,
    /// Cost charged to every resumed warp after a redistribution.
    pub relaunch_cycles: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { poll_cycles: 10_000, relaunch_cycles: 1_000 }
    }
}

/// Where warps execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// One OS thread per warp plus a polling coordinator.
    Threads,
    /// Deterministic discrete-event interleaving on the calling thread; warps
    /// advance by the instructions their ledger records, so the makespan
    /// models a device where all warps run concurrently.
    Simulated(SimConfig),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Threads => "threads",
            Backend::Simulated(_) => "sim",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub mode: Mode,
    pub warps: usize,
    pub lane_width: usize,
    pub segment_size: usize,
    pub balance: BalanceConfig,
    pub backend: Backend,
    pub stop_timeout: Duration,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            mode: Mode::Opt,
            warps: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            lane_width: DEFAULT_LANE_WIDTH,
            segment_size: DEFAULT_SEGMENT_SIZE,
            balance: BalanceConfig::default(),
            backend: Backend::Threads,
            stop_timeout: Duration::from_secs(30),
        }
    }
}

impl EngineConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_warps(mut self, warps: usize) -> Self {
        self.warps = warps;
        self
    }

    pub fn with_lane_width(mut self, width: usize) -> Self {
        self.lane_width = width;
        self
    }

    pub fn with_balance(mut self, balance: BalanceConfig) -> Self {
        self.balance = balance;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    fn balancing(&self) -> bool {
        self.mode == Mode::Opt && self.balance.enabled
    }

    fn validate(&self) -> Result<()> {
        if self.warps == 0 || self.lane_width == 0 || self.segment_size == 0 {
            return Err(Error::Config("warps, lane width and segment size must be positive".into()));
        }
        if let Backend::Simulated(sim) = self.backend {
            if sim.poll_cycles == 0 {
                return Err(Error::Config("simulated poll interval must be positive".into()));
            }
        }
        BalanceConfig::new(self.balance.threshold, self.balance.poll_interval).map(|_| ())
    }
}

/// An enumeration algorithm written against the phase primitives.
///
/// The engine owns the loop: it runs control, calls [`process`] for the
/// algorithm-specific phases, then moves.
///
/// [`process`]: Application::process
pub trait Application: Sync {
    fn name(&self) -> &str;
    fn k(&self) -> usize;
    fn generates_edges(&self) -> bool;
    /// Extend, filter, compact and aggregate for the current traversal.
    fn process(&self, ex: &mut Executor<'_, '_>) -> Result<()>;
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub mode: Mode,
    pub backend: &'static str,
    pub warps: usize,
    pub lane_width: usize,
    pub segment_size: usize,
    pub aggregates: Aggregates,
    pub ledgers: Vec<CoalescenceLedger>,
    pub balance: BalanceStats,
    pub wall_time: Duration,
    pub modeled_makespan: Option<u64>,
    /// Largest extension footprint of any single enumeration.
    pub peak_extension_storage: usize,
    /// Slots allocated per enumeration.
    pub extension_capacity: usize,
}

impl RunOutput {
    pub fn total_ledger(&self) -> CoalescenceLedger {
        let mut total = self.ledgers[0].clone();
        for l in &self.ledgers[1..] {
            total.merge(l);
        }
        total
    }

    pub fn instructions_per_warp(&self) -> f64 {
        self.total_ledger().lockstep_instructions as f64 / self.warps as f64
    }

    pub fn to_report(&self, app: &str, k: usize, counts: Counts) -> RunReport {
        let total = self.total_ledger();
        RunReport {
            app: app.to_string(),
            k,
            mode: self.mode.to_string(),
            backend: self.backend.to_string(),
            warps: self.warps,
            lane_width: self.lane_width,
            segment_size: self.segment_size,
            total_instructions: total.lockstep_instructions,
            total_load_transactions: total.load_transactions,
            instructions_per_warp: total.lockstep_instructions as f64 / self.warps as f64,
            load_transactions_per_warp: total.load_transactions as f64 / self.warps as f64,
            transactions_by_array: total.transactions_by_array,
            balance: self.balance.clone(),
            wall_time_ms: self.wall_time.as_secs_f64() * 1e3,
            modeled_makespan: self.modeled_makespan,
            peak_extension_storage: self.peak_extension_storage,
            extension_capacity: self.extension_capacity,
            aggregated_traversals: self.aggregates.aggregated,
            counts,
        }
    }
}

/// Enumerates every root of `graph` with `app`.
pub fn run<A: Application + ?Sized>(
    graph: &CsrGraph,
    app: &A,
    dict: Option<&CanonicalDictionary>,
    store: Option<StoreProducer>,
    cfg: &EngineConfig,
) -> Result<RunOutput> {
    run_with_queue(graph, app, dict, store, cfg, RootQueue::all_vertices(graph.vertex_count()))
}

/// As [`run`], starting from an explicit root queue.
pub fn run_with_queue<A: Application + ?Sized>(
    graph: &CsrGraph,
    app: &A,
    dict: Option<&CanonicalDictionary>,
    store: Option<StoreProducer>,
    cfg: &EngineConfig,
    queue: RootQueue,
) -> Result<RunOutput> {
    cfg.validate()?;
    let k = app.k();
    if k < 2 {
        return Err(Error::UnsupportedSize { k, min: 2, max: usize::MAX });
    }
    let pattern_count = dict.map_or(0, CanonicalDictionary::pattern_count);
    let warps: Vec<WarpState> = (0..cfg.warps)
        .map(|id| {
            WarpState::new(id, cfg.mode, cfg.lane_width, cfg.segment_size, k, app.generates_edges(), graph, pattern_count)
        })
        .collect();
    let extension_capacity = warps[0].lanes[0].allocated_storage();
    let shared = RunShared { graph, dict, queue };

    let start = std::time::Instant::now();
    let (warps, balance, makespan) = match cfg.backend {
        Backend::Threads => {
            let (w, b) = runtime::run_threads(&shared, app, warps, store.as_ref(), cfg)?;
            (w, b, None)
        }
        Backend::Simulated(sim) => {
            let (w, b, m) = runtime::run_simulated(&shared, app, warps, store.as_ref(), cfg, sim)?;
            (w, b, Some(m))
        }
    };
    let wall_time = start.elapsed();
    drop(store);

    Ok(RunOutput {
        mode: cfg.mode,
        backend: cfg.backend.name(),
        warps: cfg.warps,
        lane_width: cfg.lane_width,
        segment_size: cfg.segment_size,
        aggregates: crate::aggregate::reduce(warps.iter().map(|w| &w.results)),
        peak_extension_storage: warps.iter().map(WarpState::peak_storage).max().unwrap_or(0),
        ledgers: warps.into_iter().map(|w| w.ledger).collect(),
        balance,
        wall_time,
        modeled_makespan: makespan,
        extension_capacity,
    })
}
