//! Modeled profiling counters: lockstep instructions and global-memory load
//! transactions under an element-granular coalescence model.
//!
//! A lockstep step that touches a set of element indices of one array costs
//! one transaction per distinct aligned segment of `segment_size` elements.
//! Only reads of the graph adjacency, traversal and extension arrays are
//! recorded.

use std::fmt::Write as _;

use serde::Serialize;

pub const DEFAULT_SEGMENT_SIZE: usize = 32;

/// How instructions are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerMode {
    /// One instruction per warp step, however many lanes are active.
    Lockstep,
    /// One instruction per lane step (independent per-thread exploration).
    PerLane,
}

/// Arrays whose reads are ledgered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArrayId {
    Adjacency,
    Traversal,
    Extensions(usize),
}

impl ArrayId {
    fn slot(self) -> usize {
        match self {
            ArrayId::Adjacency => 0,
            ArrayId::Traversal => 1,
            ArrayId::Extensions(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoalescenceLedger {
    pub mode: LedgerMode,
    pub segment_size: usize,
    pub lockstep_instructions: u64,
    pub load_transactions: u64,
    /// Transactions split as adjacency / traversal / extensions.
    pub transactions_by_array: [u64; 3],
}

impl CoalescenceLedger {
    pub fn new(mode: LedgerMode, segment_size: usize) -> Self {
        assert!(segment_size > 0, "segment size must be positive");
        CoalescenceLedger {
            mode,
            segment_size,
            lockstep_instructions: 0,
            load_transactions: 0,
            transactions_by_array: [0; 3],
        }
    }

    /// One step reading `indices` of `array` (active lanes only).
    pub fn record_access<I>(&mut self, array: ArrayId, indices: I)
    where
        I: IntoIterator<Item = usize>,
    {
        let mut segments: Vec<usize> = indices.into_iter().map(|i| i / self.segment_size).collect();
        segments.sort_unstable();
        segments.dedup();
        self.add_transactions(array, segments.len() as u64);
    }

    /// One step reading the contiguous range `start..start + len`.
    #[inline]
    pub fn record_range(&mut self, array: ArrayId, start: usize, len: usize) {
        if len == 0 {
            return;
        }
        let first = start / self.segment_size;
        let last = (start + len - 1) / self.segment_size;
        self.add_transactions(array, (last - first + 1) as u64);
    }

    #[inline]
    pub fn add_transactions(&mut self, array: ArrayId, count: u64) {
        self.load_transactions += count;
        self.transactions_by_array[array.slot()] += count;
    }

    #[inline]
    pub fn record_instruction(&mut self, lanes_active: usize) {
        self.record_instructions(1, lanes_active);
    }

    /// `steps` consecutive steps with the same number of active lanes.
    #[inline]
    pub fn record_instructions(&mut self, steps: u64, lanes_active: usize) {
        self.lockstep_instructions += match self.mode {
            LedgerMode::Lockstep => steps,
            LedgerMode::PerLane => steps * lanes_active as u64,
        };
    }

    pub fn merge(&mut self, other: &CoalescenceLedger) {
        self.lockstep_instructions += other.lockstep_instructions;
        self.load_transactions += other.load_transactions;
        for (a, b) in self.transactions_by_array.iter_mut().zip(other.transactions_by_array) {
            *a += b;
        }
    }
}

/// Final counts of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Counts {
    Cliques(u64),
    Patterns(Vec<u64>),
    Listed(u64),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BalanceStats {
    /// Stop/redistribute/resume cycles that migrated at least one traversal.
    pub rebalance_count: u64,
    pub migrated_traversals: u64,
    /// Cycles that found no donor.
    pub futile_rebalances: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub app: String,
    pub k: usize,
    pub mode: String,
    pub backend: String,
    pub warps: usize,
    pub lane_width: usize,
    pub segment_size: usize,
    pub total_instructions: u64,
    pub total_load_transactions: u64,
    pub instructions_per_warp: f64,
    pub load_transactions_per_warp: f64,
    pub transactions_by_array: [u64; 3],
    pub balance: BalanceStats,
    pub wall_time_ms: f64,
    pub modeled_makespan: Option<u64>,
    pub peak_extension_storage: usize,
    pub extension_capacity: usize,
    pub aggregated_traversals: u64,
    pub counts: Counts,
}

impl RunReport {
    /// Key-value text, one `key=value` per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "app={}", self.app);
        let _ = writeln!(s, "k={}", self.k);
        let _ = writeln!(s, "mode={}", self.mode);
        let _ = writeln!(s, "backend={}", self.backend);
        let _ = writeln!(s, "warps={}", self.warps);
        let _ = writeln!(s, "lane_width={}", self.lane_width);
        let _ = writeln!(s, "segment_size={}", self.segment_size);
        let _ = writeln!(s, "total_instructions={}", self.total_instructions);
        let _ = writeln!(s, "total_load_transactions={}", self.total_load_transactions);
        let _ = writeln!(s, "instructions_per_warp={:.3}", self.instructions_per_warp);
        let _ = writeln!(s, "load_transactions_per_warp={:.3}", self.load_transactions_per_warp);
        let [adj, tr, ext] = self.transactions_by_array;
        let _ = writeln!(s, "transactions_adjacency={adj}");
        let _ = writeln!(s, "transactions_traversal={tr}");
        let _ = writeln!(s, "transactions_extensions={ext}");
        let _ = writeln!(s, "rebalance_count={}", self.balance.rebalance_count);
        let _ = writeln!(s, "migrated_traversals={}", self.balance.migrated_traversals);
        let _ = writeln!(s, "futile_rebalances={}", self.balance.futile_rebalances);
        let _ = writeln!(s, "wall_time_ms={:.3}", self.wall_time_ms);
        if let Some(m) = self.modeled_makespan {
            let _ = writeln!(s, "modeled_makespan={m}");
        }
        let _ = writeln!(s, "peak_extension_storage={}", self.peak_extension_storage);
        let _ = writeln!(s, "extension_capacity={}", self.extension_capacity);
        let _ = writeln!(s, "aggregated_traversals={}", self.aggregated_traversals);
        match &self.counts {
            Counts::Cliques(c) => {
                let _ = writeln!(s, "cliques={c}");
            }
            Counts::Patterns(p) => {
                for (id, c) in p.iter().enumerate() {
                    let _ = writeln!(s, "pattern.{id}={c}");
                }
            }
            Counts::Listed(c) => {
                let _ = writeln!(s, "listed={c}");
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// DFS-over-WC improvement ratios (values above 1 favour WC).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Improvement {
    pub instructions_per_warp: f64,
    pub load_transactions: f64,
}

pub fn improvement(dfs: &RunReport, wc: &RunReport) -> Improvement {
    let ratio = |a: f64, b: f64| if b == 0.0 { f64::INFINITY } else { a / b };
    Improvement {
        instructions_per_warp: ratio(dfs.instructions_per_warp, wc.instructions_per_warp),
        load_transactions: ratio(dfs.total_load_transactions as f64, wc.total_load_transactions as f64),
    }
}

/// Metrics document for one or more runs; improvement ratios appear only
/// when both a DFS and a WC run are supplied.
pub fn report(runs: &[RunReport]) -> String {
    let mut s = String::new();
    for (i, r) in runs.iter().enumerate() {
        if runs.len() > 1 {
            let _ = writeln!(s, "[run.{i}]");
        }
        s.push_str(&r.to_text());
    }
    let dfs = runs.iter().find(|r| r.mode == "dfs");
    let wc = runs.iter().find(|r| r.mode == "wc");
    if let (Some(dfs), Some(wc)) = (dfs, wc) {
        let imp = improvement(dfs, wc);
        let _ = writeln!(s, "[improvement]");
        let _ = writeln!(s, "instructions_per_warp_ratio={:.3}", imp.instructions_per_warp);
        let _ = writeln!(s, "load_transactions_ratio={:.3}", imp.load_transactions);
    }
    s
}
