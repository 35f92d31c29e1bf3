//! Coordinator-driven warp-level load balancing: watch how many warps are
//! still busy, stop everyone at a control boundary, hand pending traversals
//! from donors to idle warps round-robin, resume.

use std::time::Duration;

use crate::engine::{WarpState, WarpStatus};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceConfig {
    /// Rebalance when the fraction of active warps drops below this.
    pub threshold: f64,
    pub poll_interval: Duration,
    pub enabled: bool,
}

pub const CLIQUE_THRESHOLD: f64 = 0.40;
pub const MOTIF_THRESHOLD: f64 = 0.10;
pub const DEFAULT_POLL_INTERVAL: Duration = Duration::from_millis(10);

impl BalanceConfig {
    pub fn new(threshold: f64, poll_interval: Duration) -> Result<Self> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::Config(format!("balance threshold {threshold} outside (0, 1]")));
        }
        Ok(BalanceConfig { threshold, poll_interval, enabled: true })
    }

    pub fn for_cliques() -> Self {
        BalanceConfig { threshold: CLIQUE_THRESHOLD, poll_interval: DEFAULT_POLL_INTERVAL, enabled: true }
    }

    pub fn for_motifs() -> Self {
        BalanceConfig { threshold: MOTIF_THRESHOLD, poll_interval: DEFAULT_POLL_INTERVAL, enabled: true }
    }
}

impl Default for BalanceConfig {
    fn default() -> Self {
        Self::for_cliques()
    }
}

pub fn should_rebalance(active: usize, total: usize, cfg: &BalanceConfig) -> bool {
    debug_assert!(total > 0);
    (active as f64) < cfg.threshold * total as f64
}

/// All warps, captured while stopped, plus the root-queue position.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub warps: Vec<WarpState>,
    pub queue_cursor: usize,
}

impl Snapshot {
    /// Warps that can give away at least one pending traversal.
    pub fn donors(&self) -> Vec<usize> {
        self.warps.iter().filter(|w| w.te().stealable_level().is_some()).map(|w| w.id).collect()
    }

    pub fn idle(&self) -> Vec<usize> {
        self.warps.iter().filter(|w| !w.has_work()).map(|w| w.id).collect()
    }

    /// Multiset of unexplored traversals across all warps, sorted.
    pub fn pending_work(&self) -> Vec<Vec<VertexId>> {
        let mut all: Vec<_> = self.warps.iter().flat_map(|w| w.te().pending_traversals()).collect();
        all.sort();
        all
    }
}

/// Gives each idle warp one traversal taken from donors visited
/// round-robin: the lowest-index pending extension of the donor's
/// shallowest live level. Returns the number of migrated traversals.
pub fn redistribute(snapshot: &mut Snapshot, graph: &CsrGraph) -> Result<usize> {
    let idle = snapshot.idle();
    let mut donors = snapshot.donors();
    let mut migrated = 0;
    let mut turn = 0;
    for thief in idle {
        let donor = loop {
            if donors.is_empty() {
                return Ok(migrated);
            }
            turn %= donors.len();
            let d = donors[turn];
            if snapshot.warps[d].te().stealable_level().is_some() {
                break d;
            }
            donors.remove(turn);
        };
        turn += 1;

        let donor_te = snapshot.warps[donor].te_mut();
        let (level, stolen) = donor_te.steal().expect("donor has a stealable level");
        let prefix = donor_te.tr()[..=level].to_vec();
        let prefix_bitmap = donor_te.bitmap_at(level);
        let thief_ws = &mut snapshot.warps[thief];
        thief_ws.te_mut().adopt(&prefix, prefix_bitmap, stolen, graph)?;
        thief_ws.status = WarpStatus::Active;
        migrated += 1;
    }
    Ok(migrated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Mode;
    use crate::synth;

    #[test]
    fn threshold_examples() {
        let c = BalanceConfig::new(0.40, DEFAULT_POLL_INTERVAL).unwrap();
        assert!(should_rebalance(20, 64, &c));
        assert!(!should_rebalance(64, 64, &c));
        let m = BalanceConfig::new(0.10, DEFAULT_POLL_INTERVAL).unwrap();
        assert!(should_rebalance(6, 64, &m));
        let full = BalanceConfig::new(1.0, DEFAULT_POLL_INTERVAL).unwrap();
        assert!(should_rebalance(63, 64, &full));
        assert!(!should_rebalance(64, 64, &full));
    }

    #[test]
    fn threshold_validation() {
        assert!(BalanceConfig::new(0.0, DEFAULT_POLL_INTERVAL).is_err());
        assert!(BalanceConfig::new(1.5, DEFAULT_POLL_INTERVAL).is_err());
        assert!(BalanceConfig::new(f64::NAN, DEFAULT_POLL_INTERVAL).is_err());
    }

    fn warps(g: &CsrGraph, n: usize, k: usize) -> Vec<WarpState> {
        (0..n).map(|id| WarpState::new(id, Mode::Opt, 32, 32, k, true, g, 0)).collect()
    }

    fn give(ws: &mut WarpState, root: VertexId, ext: &[i32]) {
        let te = ws.te_mut();
        te.start_root(root);
        let level = &mut te.levels[0];
        level.ext[..ext.len()].copy_from_slice(ext);
        level.ext_len = ext.len();
        level.written = ext.len();
        level.generated = true;
        ws.status = WarpStatus::Active;
    }

    #[test]
    fn steal_lowest_index_from_shallowest_level() {
        let g = synth::running_example();
        let mut ws = warps(&g, 2, 4);
        give(&mut ws[0], 0, &[2, 3]);
        let mut snap = Snapshot { warps: ws, queue_cursor: 5 };
        let before = snap.pending_work();
        assert_eq!(redistribute(&mut snap, &g).unwrap(), 1);
        assert_eq!(snap.warps[1].te().tr(), &[0, 2]);
        assert_eq!(snap.warps[0].te().level(0).pending().collect::<Vec<_>>(), vec![3]);
        assert_eq!(snap.pending_work(), before);
        // prefix bitmap re-induced for the thief
        assert_eq!(snap.warps[1].te().bitmap().k(), 2);
    }

    #[test]
    fn no_idle_warps_is_a_no_op() {
        let g = synth::running_example();
        let mut ws = warps(&g, 1, 4);
        give(&mut ws[0], 0, &[1, 2]);
        let mut snap = Snapshot { warps: ws, queue_cursor: 5 };
        assert_eq!(redistribute(&mut snap, &g).unwrap(), 0);
        assert_eq!(snap.warps[0].te().level(0).pending().count(), 2);
    }

    #[test]
    fn donors_visited_round_robin() {
        let g = synth::complete(12);
        let mut ws = warps(&g, 5, 5);
        give(&mut ws[0], 0, &[1, 2, 3]);
        give(&mut ws[1], 4, &[5, 6, 7]);
        let mut snap = Snapshot { warps: ws, queue_cursor: 12 };
        let before = snap.pending_work();
        assert_eq!(redistribute(&mut snap, &g).unwrap(), 3);
        assert_eq!(snap.warps[2].te().tr(), &[0, 1]);
        assert_eq!(snap.warps[3].te().tr(), &[4, 5]);
        assert_eq!(snap.warps[4].te().tr(), &[0, 2]);
        assert_eq!(snap.pending_work(), before);
        assert!(snap.idle().is_empty());
    }

    #[test]
    fn all_idle_has_no_donors() {
        let g = synth::running_example();
        let mut snap = Snapshot { warps: warps(&g, 3, 4), queue_cursor: 5 };
        assert!(snap.donors().is_empty());
        assert_eq!(redistribute(&mut snap, &g).unwrap(), 0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]
        #[test]
        fn redistribution_conserves_pending_work(seed in 0u64..1000, steps in 0usize..60, k in 3usize..6) {
            use crate::apps::MotifCounting;
            use crate::canon::CanonicalDictionary;
            use crate::engine::{RootQueue, RunShared};

            let g = synth::erdos_renyi(18, 0.35, seed);
            let dict = CanonicalDictionary::build(k).unwrap();
            let app = MotifCounting::new(k, &dict).unwrap();
            let shared = RunShared { graph: &g, dict: Some(&dict), queue: RootQueue::all_vertices(g.vertex_count()) };
            let mut ws: Vec<WarpState> =
                (0..6).map(|id| WarpState::new(id, Mode::Opt, 8, 32, k, true, &g, dict.pattern_count())).collect();
            // two warps busy, the rest idle
            for w in &mut ws[..2] {
                w.prime(&shared.queue);
            }
            for i in 0..steps {
                let _ = ws[i % 2].step(&app, &shared, None).unwrap();
            }
            let mut snap = Snapshot { warps: ws, queue_cursor: shared.queue.cursor() };
            let before = snap.pending_work();
            let idle = snap.idle().len();
            let moved = redistribute(&mut snap, &g).unwrap();
            proptest::prop_assert_eq!(snap.pending_work(), before);
            proptest::prop_assert_eq!(snap.idle().len(), idle - moved);
        }
    }

    #[test]
    fn deepest_level_at_aggregation_depth_is_not_stolen() {
        // k = 3: level 0 extensions become size-2 traversals that still
        // need a level; level 1 is aggregated in place and never stolen.
        let g = synth::complete(6);
        let mut ws = warps(&g, 2, 3);
        give(&mut ws[0], 0, &[1, 2]);
        assert_eq!(ws[0].te().stealable_level(), Some(0));
        ws[0].te_mut().push(1);
        let level = &mut ws[0].te_mut().levels[1];
        level.ext[0] = 2;
        level.ext_len = 1;
        level.generated = true;
        assert_eq!(ws[0].te().stealable_level(), Some(0));
    }
}
