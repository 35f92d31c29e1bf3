//! Warp state and the per-iteration workflow driver.

use serde::Serialize;

use crate::aggregate::{Aggregates, StoreProducer};
use crate::canon::CanonicalDictionary;
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};
use crate::metrics::{CoalescenceLedger, LedgerMode};

use super::primitives::{self, Lanes};
use super::queue::RootQueue;
use super::te::TraversalEnumeration;
use super::{Application, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WarpStatus {
    Active,
    Idle,
    Stopped,
}

/// Everything one warp owns. In DFS mode every lane carries its own
/// traversal enumeration; otherwise the warp shares a single one.
#[derive(Debug, Clone)]
pub struct WarpState {
    pub id: usize,
    pub mode: Mode,
    pub lane_width: usize,
    pub status: WarpStatus,
    pub lanes: Vec<TraversalEnumeration>,
    pub ledger: CoalescenceLedger,
    pub results: Aggregates,
}

/// Read-only state shared by every warp of a run.
pub struct RunShared<'a> {
    pub graph: &'a CsrGraph,
    pub dict: Option<&'a CanonicalDictionary>,
    pub queue: RootQueue,
}

impl WarpState {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: usize,
        mode: Mode,
        lane_width: usize,
        segment_size: usize,
        k: usize,
        genedges: bool,
        graph: &CsrGraph,
        pattern_count: usize,
    ) -> Self {
        let (tes, ledger_mode) = match mode {
            Mode::Dfs => (lane_width, LedgerMode::PerLane),
            Mode::Wc | Mode::Opt => (1, LedgerMode::Lockstep),
        };
        WarpState {
            id,
            mode,
            lane_width,
            status: WarpStatus::Active,
            lanes: (0..tes).map(|_| TraversalEnumeration::new(k, graph.max_degree(), genedges)).collect(),
            ledger: CoalescenceLedger::new(ledger_mode, segment_size),
            results: Aggregates::with_patterns(pattern_count),
        }
    }

    /// The single enumeration of a WC/OPT warp.
    pub fn te(&self) -> &TraversalEnumeration {
        &self.lanes[0]
    }

    pub fn te_mut(&mut self) -> &mut TraversalEnumeration {
        &mut self.lanes[0]
    }

    pub fn has_work(&self) -> bool {
        self.lanes.iter().any(|te| !te.is_empty())
    }

    /// Width of one primitive step: the whole warp in lockstep, one lane otherwise.
    fn step_width(&self) -> usize {
        match self.mode {
            Mode::Dfs => 1,
            Mode::Wc | Mode::Opt => self.lane_width,
        }
    }

    /// Empty enumerations pull a root from the global queue.
    pub fn prime(&mut self, queue: &RootQueue) {
        for te in &mut self.lanes {
            if te.is_empty() {
                self.ledger.record_instruction(1);
                if let Some(root) = queue.pull() {
                    te.start_root(root);
                }
            }
        }
        self.status = if self.has_work() { WarpStatus::Active } else { WarpStatus::Idle };
    }

    /// One pass of the workflow (control, application phases, move) for
    /// every lane that still holds a traversal. Returns whether any work remains.
    pub fn step<A: Application + ?Sized>(
        &mut self,
        app: &A,
        shared: &RunShared<'_>,
        store: Option<&StoreProducer>,
    ) -> Result<bool> {
        let width = self.step_width();
        let genedges = app.generates_edges();
        for te in &mut self.lanes {
            let lanes = Lanes::new(&mut self.ledger, width);
            lanes.ledger.record_instruction(1);
            if !primitives::control(te) {
                continue;
            }
            let mut ex = Executor { te, shared, store, results: &mut self.results, lanes };
            app.process(&mut ex)?;
            let Executor { te, mut lanes, .. } = ex;
            primitives::move_step(te, genedges, &shared.queue, shared.graph, &mut lanes)?;
        }
        let busy = self.has_work();
        if !busy {
            self.status = WarpStatus::Idle;
        }
        Ok(busy)
    }

    /// Largest extension footprint any of this warp's enumerations reached.
    pub fn peak_storage(&self) -> usize {
        self.lanes.iter().map(TraversalEnumeration::peak_storage).max().unwrap_or(0)
    }
}

/// Runs a warp until it goes idle or `stop` is raised at a control boundary.
pub fn run_warp<A: Application + ?Sized>(
    ws: &mut WarpState,
    app: &A,
    shared: &RunShared<'_>,
    store: Option<&StoreProducer>,
    stop: &std::sync::atomic::AtomicBool,
) -> Result<WarpStatus> {
    ws.prime(&shared.queue);
    while ws.has_work() {
        if stop.load(std::sync::atomic::Ordering::Relaxed) {
            ws.status = WarpStatus::Stopped;
            return Ok(ws.status);
        }
        ws.step(app, shared, store)?;
    }
    ws.status = WarpStatus::Idle;
    Ok(ws.status)
}

/// The application's view of one traversal enumeration during a loop
/// iteration: the algorithm-specific primitives (extend, filter, compact,
/// aggregate) plus read access to the traversal.
pub struct Executor<'a, 'r> {
    te: &'a mut TraversalEnumeration,
    shared: &'a RunShared<'r>,
    store: Option<&'a StoreProducer>,
    results: &'a mut Aggregates,
    lanes: Lanes<'a>,
}

impl<'a, 'r> Executor<'a, 'r> {
    pub fn len(&self) -> usize {
        self.te.len()
    }

    pub fn is_empty(&self) -> bool {
        self.te.is_empty()
    }

    pub fn k(&self) -> usize {
        self.te.k()
    }

    pub fn tr(&self) -> &[VertexId] {
        self.te.tr()
    }

    pub fn last(&self) -> VertexId {
        self.te.last().expect("executor runs on non-empty traversals")
    }

    pub fn graph(&self) -> &'r CsrGraph {
        self.shared.graph
    }

    pub fn te(&self) -> &TraversalEnumeration {
        self.te
    }

    /// Extensions from the adjacency of `tr[begin..end]`; `false` if the
    /// current traversal already had them.
    pub fn extend(&mut self, begin: usize, end: usize) -> Result<bool> {
        primitives::extend(self.te, begin, end, self.shared.graph, &mut self.lanes)
    }

    pub fn filter<P>(&mut self, keep: P)
    where
        P: FnMut(&[VertexId], VertexId) -> bool,
    {
        primitives::filter(self.te, keep, &mut self.lanes)
    }

    pub fn compact(&mut self) {
        primitives::compact(self.te, &mut self.lanes)
    }

    pub fn aggregate_counter(&mut self) {
        primitives::aggregate_counter(self.te, self.results, &mut self.lanes)
    }

    pub fn aggregate_pattern(&mut self) -> Result<()> {
        let dict = self
            .shared
            .dict
            .ok_or_else(|| Error::Dictionary("pattern aggregation requires a dictionary".into()))?;
        primitives::aggregate_pattern(self.te, dict, self.shared.graph, self.results, &mut self.lanes)
    }

    pub fn aggregate_store(&mut self) -> Result<()> {
        let store = self.store.ok_or_else(|| Error::Config("store aggregation requires a buffer".into()))?;
        primitives::aggregate_store(self.te, self.shared.graph, store, self.results, &mut self.lanes)
    }
}
