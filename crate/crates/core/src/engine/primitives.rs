//! Phase primitives of the filter-process workflow.
//!
//! Each primitive is written against a [`Lanes`] context: in lockstep mode a
//! warp processes `width` consecutive elements per step; in per-lane mode
//! the width is one and every lane pays for its own steps. Functional
//! results never depend on the width.

use crate::aggregate::{Aggregates, StoreProducer, StoreRecord};
use crate::canon::{CanonicalDictionary, EdgeBitmap};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};
use crate::metrics::{ArrayId, CoalescenceLedger};

use super::queue::RootQueue;
use super::te::{TraversalEnumeration, INVALID};

/// Execution width plus the ledger that pays for each step.
pub struct Lanes<'a> {
    pub ledger: &'a mut CoalescenceLedger,
    pub width: usize,
}

impl<'a> Lanes<'a> {
    pub fn new(ledger: &'a mut CoalescenceLedger, width: usize) -> Self {
        assert!(width > 0);
        Lanes { ledger, width }
    }

    #[inline]
    fn sisd(&mut self) {
        self.ledger.record_instruction(1);
    }

    #[inline]
    fn step(&mut self, active: usize) {
        self.ledger.record_instruction(active);
    }

    /// `count` steps in which every lane reads the same element of `array`.
    #[inline]
    fn broadcast(&mut self, array: ArrayId, count: usize, active: usize) {
        self.ledger.record_instructions(count as u64, active);
        self.ledger.add_transactions(array, count as u64);
    }

}

/// Chunks of `start..end` processed one step each.
fn chunks(width: usize, start: usize, end: usize) -> impl Iterator<Item = (usize, usize)> {
    (start..end).step_by(width).map(move |s| (s, (s + width).min(end)))
}

/// Bit `j` set iff `e` is adjacent to `tr[j]`.
#[inline]
pub fn adjacency_mask(tr: &[VertexId], e: VertexId, graph: &CsrGraph) -> u64 {
    tr.iter()
        .enumerate()
        .fold(0u64, |m, (j, &t)| if graph.has_edge(t, e) { m | 1 << j } else { m })
}

/// Termination test: the enumeration continues while the traversal is non-empty.
#[inline]
pub fn control(te: &TraversalEnumeration) -> bool {
    !te.is_empty()
}

/// Writes the deduplicated neighbors of `tr[begin..end]` that are not in
/// `tr` as the extensions of the current traversal. Returns `false` without
/// touching anything when they were already generated.
pub fn extend(
    te: &mut TraversalEnumeration,
    begin: usize,
    end: usize,
    graph: &CsrGraph,
    lanes: &mut Lanes<'_>,
) -> Result<bool> {
    lanes.sisd();
    let len = te.len;
    if !(begin < end && end <= len) {
        return Err(Error::Contract(format!("extend range {begin}..{end} outside traversal of length {len}")));
    }
    let l = len - 1;
    if l >= te.levels.len() {
        return Err(Error::Contract(format!("traversal of length {len} has no extension level")));
    }
    if te.levels[l].generated {
        return Ok(false);
    }
    // a single sorted adjacency list cannot repeat a vertex
    let dedup = end - begin > 1;
    let offsets = graph.offsets();
    let (tr, levels) = (&te.tr[..len], &mut te.levels);
    let level = &mut levels[l];
    let cap = level.ext.len();
    let mut written = 0usize;

    for (p, &v) in tr.iter().enumerate().take(end).skip(begin) {
        lanes.sisd();
        lanes.ledger.record_range(ArrayId::Traversal, p, 1);
        let adj = graph.adj(v);
        let base = offsets[v as usize];
        for (s, e) in chunks(lanes.width, 0, adj.len()) {
            let active = e - s;
            lanes.step(active);
            lanes.ledger.record_range(ArrayId::Adjacency, base + s, active);
            lanes.broadcast(ArrayId::Traversal, len, active);
            if dedup {
                lanes.broadcast(ArrayId::Extensions(l), written, active);
            }
            // ballot + prefix sum + coalesced write
            lanes.step(active);
            let before = written;
            for &cand in &adj[s..e] {
                if tr.contains(&cand) {
                    continue;
                }
                let cand = cand as i32;
                if dedup && level.ext[..before].contains(&cand) {
                    continue;
                }
                if written == cap {
                    return Err(Error::Capacity { level: l, capacity: cap });
                }
                level.ext[written] = cand;
                written += 1;
            }
        }
    }
    lanes.sisd();
    level.ext_len = written;
    level.written = written;
    level.cursor = 0;
    level.generated = true;
    te.note_storage();
    debug_assert!(extensions_well_formed(te), "extend produced duplicate or traversal vertices");
    Ok(true)
}

fn extensions_well_formed(te: &TraversalEnumeration) -> bool {
    let level = &te.levels[te.len - 1];
    let mut seen: Vec<i32> = level.ext[..level.ext_len].iter().copied().filter(|&e| e != INVALID).collect();
    let n = seen.len();
    seen.sort_unstable();
    seen.dedup();
    seen.len() == n && seen.iter().all(|&e| !te.tr().contains(&(e as VertexId)))
}

/// Invalidates every pending extension for which `keep(tr, e)` is false.
pub fn filter<P>(te: &mut TraversalEnumeration, mut keep: P, lanes: &mut Lanes<'_>)
where
    P: FnMut(&[VertexId], VertexId) -> bool,
{
    lanes.sisd();
    let Some(l) = te.len.checked_sub(1).filter(|&l| l < te.levels.len()) else {
        return;
    };
    let (tr, levels) = (&te.tr[..te.len], &mut te.levels);
    let level = &mut levels[l];
    for (s, e) in chunks(lanes.width, level.cursor, level.ext_len) {
        let active = e - s;
        lanes.step(active);
        lanes.ledger.record_range(ArrayId::Extensions(l), s, active);
        lanes.step(active);
        for slot in &mut level.ext[s..e] {
            if *slot != INVALID && !keep(tr, *slot as VertexId) {
                *slot = INVALID;
            }
        }
        lanes.step(active);
    }
}

/// Moves valid pending extensions to a contiguous prefix, preserving order.
pub fn compact(te: &mut TraversalEnumeration, lanes: &mut Lanes<'_>) {
    lanes.sisd();
    let Some(l) = te.len.checked_sub(1).filter(|&l| l < te.levels.len()) else {
        return;
    };
    let level = &mut te.levels[l];
    let mut out = 0usize;
    for (s, e) in chunks(lanes.width, level.cursor, level.ext_len) {
        let active = e - s;
        lanes.step(active);
        lanes.ledger.record_range(ArrayId::Extensions(l), s, active);
        // ballot + popc give every lane its write offset
        lanes.step(active);
        for i in s..e {
            let v = level.ext[i];
            if v != INVALID {
                level.ext[out] = v;
                out += 1;
            }
        }
        lanes.step(active);
    }
    for slot in &mut level.ext[out..level.ext_len] {
        *slot = INVALID;
    }
    level.ext_len = out;
    level.cursor = 0;
    lanes.sisd();
}

/// Moves forward by popping the highest-index pending extension, or
/// backward when the traversal has `k - 1` vertices or nothing is pending.
/// An emptied traversal pulls the next root from `queue`.
pub fn move_step(
    te: &mut TraversalEnumeration,
    genedges: bool,
    queue: &RootQueue,
    graph: &CsrGraph,
    lanes: &mut Lanes<'_>,
) -> Result<()> {
    lanes.sisd();
    if te.len == 0 {
        return Ok(());
    }
    let l = te.len - 1;
    if te.len != te.k() - 1 && l < te.levels.len() {
        let level = &mut te.levels[l];
        let mut popped = None;
        while level.ext_len > level.cursor {
            level.ext_len -= 1;
            lanes.sisd();
            lanes.ledger.record_range(ArrayId::Extensions(l), level.ext_len, 1);
            let e = level.ext[level.ext_len];
            if e != INVALID {
                popped = Some(e as VertexId);
                break;
            }
        }
        if let Some(v) = popped {
            te.push(v);
            if genedges {
                induce(te, graph, lanes)?;
            }
            return Ok(());
        }
    }
    te.len -= 1;
    if te.len == 0 {
        lanes.sisd();
        if let Some(root) = queue.pull() {
            te.start_root(root);
        }
    }
    Ok(())
}

/// Derives the bitmap of the just-extended traversal from its prefix.
fn induce(te: &mut TraversalEnumeration, graph: &CsrGraph, lanes: &mut Lanes<'_>) -> Result<()> {
    let n = te.len;
    let new = te.tr[n - 1];
    for (s, e) in chunks(lanes.width, 0, n - 1) {
        lanes.step(e - s);
        lanes.ledger.record_range(ArrayId::Traversal, s, e - s);
    }
    let mask = adjacency_mask(&te.tr[..n - 1], new, graph);
    te.bitmaps[n - 1] = te.bitmaps[n - 2].extend(mask).map_err(|_| {
        Error::Internal(format!("vertex {new} appended without a neighbor in {:?}", &te.tr[..n - 1]))
    })?;
    Ok(())
}

/// Adds the number of valid pending extensions to the clique counter.
pub fn aggregate_counter(te: &TraversalEnumeration, results: &mut Aggregates, lanes: &mut Lanes<'_>) {
    lanes.sisd();
    let Some(level) = te.current_level() else { return };
    let l = te.len - 1;
    let mut count = 0u64;
    for (s, e) in chunks(lanes.width, level.cursor, level.ext_len) {
        lanes.step(e - s);
        lanes.ledger.record_range(ArrayId::Extensions(l), s, e - s);
        count += level.ext[s..e].iter().filter(|&&x| x != INVALID).count() as u64;
    }
    results.clique_count += count;
    results.aggregated += count;
}

/// Lanes that relabel `tr + e` for every valid pending extension `e` and
/// hand the result to `sink`.
fn for_each_leaf<F>(te: &TraversalEnumeration, graph: &CsrGraph, lanes: &mut Lanes<'_>, mut sink: F) -> Result<()>
where
    F: FnMut(VertexId, EdgeBitmap) -> Result<()>,
{
    lanes.sisd();
    let Some(level) = te.current_level() else { return Ok(()) };
    let l = te.len - 1;
    let tr = te.tr();
    let prefix = te.bitmap();
    for (s, e) in chunks(lanes.width, level.cursor, level.ext_len) {
        let active = e - s;
        lanes.step(active);
        lanes.ledger.record_range(ArrayId::Extensions(l), s, active);
        lanes.broadcast(ArrayId::Traversal, tr.len(), active);
        lanes.step(active);
        for &x in &level.ext[s..e] {
            if x == INVALID {
                continue;
            }
            let v = x as VertexId;
            let bitmap = prefix.extend(adjacency_mask(tr, v, graph)).map_err(|_| {
                Error::Internal(format!("extension {v} not adjacent to traversal {tr:?}"))
            })?;
            sink(v, bitmap)?;
        }
        lanes.step(active);
    }
    Ok(())
}

/// Canonical relabeling of every size-k traversal through the dictionary.
pub fn aggregate_pattern(
    te: &TraversalEnumeration,
    dict: &CanonicalDictionary,
    graph: &CsrGraph,
    results: &mut Aggregates,
    lanes: &mut Lanes<'_>,
) -> Result<()> {
    if !te.generates_edges() {
        return Err(Error::Contract("aggregate_pattern needs edge generation".into()));
    }
    let counts = &mut results.pattern_counts;
    let mut n = 0u64;
    for_each_leaf(te, graph, lanes, |_, bitmap| {
        let id = dict.pattern_id(bitmap)? as usize;
        counts[id] += 1;
        n += 1;
        Ok(())
    })?;
    results.aggregated += n;
    Ok(())
}

/// Enqueues one record per valid pending extension; blocks on a full buffer.
pub fn aggregate_store(
    te: &TraversalEnumeration,
    graph: &CsrGraph,
    store: &StoreProducer,
    results: &mut Aggregates,
    lanes: &mut Lanes<'_>,
) -> Result<()> {
    if !te.generates_edges() {
        return Err(Error::Contract("aggregate_store needs edge generation".into()));
    }
    let tr = te.tr();
    let mut n = 0u64;
    for_each_leaf(te, graph, lanes, |v, bitmap| {
        let mut vertices = Vec::with_capacity(tr.len() + 1);
        vertices.extend_from_slice(tr);
        vertices.push(v);
        store.push(StoreRecord { vertices, bitmap })?;
        n += 1;
        Ok(())
    })?;
    results.aggregated += n;
    results.stored += n;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::LedgerMode;
    use crate::synth;

    fn ledger() -> CoalescenceLedger {
        CoalescenceLedger::new(LedgerMode::Lockstep, 32)
    }

    fn te_with(g: &CsrGraph, k: usize, tr: &[VertexId]) -> TraversalEnumeration {
        let mut te = TraversalEnumeration::new(k, g.max_degree(), true);
        te.start_root(tr[0]);
        for &v in &tr[1..] {
            te.push(v);
            let n = te.len;
            let mask = adjacency_mask(&te.tr[..n - 1], v, g);
            te.bitmaps[n - 1] = te.bitmaps[n - 2].extend(mask).unwrap();
        }
        te
    }

    fn set_ext(te: &mut TraversalEnumeration, ext: &[i32]) {
        let l = te.len - 1;
        let level = &mut te.levels[l];
        level.ext[..ext.len()].copy_from_slice(ext);
        level.ext_len = ext.len();
        level.written = ext.len();
        level.cursor = 0;
        level.generated = true;
    }

    fn ext(te: &TraversalEnumeration) -> Vec<i32> {
        te.current_level().unwrap().extensions().to_vec()
    }

    #[test]
    fn control_examples() {
        let g = synth::running_example();
        let mut te = TraversalEnumeration::new(3, g.max_degree(), false);
        assert!(!control(&te));
        te.start_root(0);
        assert!(control(&te));
    }

    #[test]
    fn extend_single_vertex() {
        let g = synth::running_example();
        let mut te = te_with(&g, 4, &[1]);
        let mut l = ledger();
        assert!(extend(&mut te, 0, 1, &g, &mut Lanes::new(&mut l, 32)).unwrap());
        assert_eq!(ext(&te), vec![0, 2, 3]);
    }

    #[test]
    fn extend_deduplicates_and_excludes_traversal() {
        let g = synth::running_example();
        let mut te = te_with(&g, 4, &[0, 1]);
        let mut l = ledger();
        assert!(extend(&mut te, 0, 2, &g, &mut Lanes::new(&mut l, 32)).unwrap());
        assert_eq!(ext(&te), vec![2, 3]);
        assert!(!extend(&mut te, 0, 2, &g, &mut Lanes::new(&mut l, 32)).unwrap());
        assert_eq!(ext(&te), vec![2, 3]);
    }

    #[test]
    fn extend_result_independent_of_width() {
        let g = synth::erdos_renyi(60, 0.2, 3);
        for w in [1, 3, 32] {
            let mut te = te_with(&g, 5, &[0]);
            let mut l = ledger();
            extend(&mut te, 0, 1, &g, &mut Lanes::new(&mut l, w)).unwrap();
            let want: Vec<i32> = g.adj(0).iter().map(|&v| v as i32).collect();
            assert_eq!(ext(&te), want);
        }
    }

    #[test]
    fn extend_rejects_bad_range() {
        let g = synth::running_example();
        let mut te = te_with(&g, 4, &[0]);
        let mut l = ledger();
        assert!(extend(&mut te, 0, 2, &g, &mut Lanes::new(&mut l, 32)).is_err());
    }

    #[test]
    fn filter_examples() {
        let g = synth::running_example();
        let mut l = ledger();

        let mut te = te_with(&g, 4, &[1]);
        set_ext(&mut te, &[0, 2, 3]);
        filter(&mut te, |_, e| e > 1, &mut Lanes::new(&mut l, 32));
        assert_eq!(ext(&te), vec![-1, 2, 3]);

        let mut te = te_with(&g, 4, &[0, 1]);
        set_ext(&mut te, &[2, 3]);
        filter(&mut te, |tr, e| tr.iter().all(|&t| g.has_edge(t, e)), &mut Lanes::new(&mut l, 32));
        assert_eq!(ext(&te), vec![2, -1]);

        set_ext(&mut te, &[2, 3]);
        filter(&mut te, |_, _| true, &mut Lanes::new(&mut l, 32));
        assert_eq!(ext(&te), vec![2, 3]);
    }

    #[test]
    fn compact_examples() {
        let g = synth::complete(12);
        let mut l = ledger();
        let mut te = te_with(&g, 4, &[0]);
        for (input, want) in [
            (vec![5, -1, 7, -1, 9], vec![5, 7, 9]),
            (vec![-1, -1], vec![]),
            (vec![2, 4], vec![2, 4]),
        ] {
            set_ext(&mut te, &input);
            compact(&mut te, &mut Lanes::new(&mut l, 2));
            assert_eq!(ext(&te), want);
            assert_eq!(te.current_level().unwrap().cursor(), 0);
        }
    }

    proptest::proptest! {
        #[test]
        fn compact_is_stable_and_idempotent(
            slots in proptest::collection::vec(proptest::option::of(1i32..11), 0..11),
            width in 1usize..40,
        ) {
            let g = synth::complete(12);
            let mut l = ledger();
            let mut te = te_with(&g, 4, &[0]);
            let input: Vec<i32> = slots.iter().map(|s| s.unwrap_or(INVALID)).collect();
            set_ext(&mut te, &input);
            compact(&mut te, &mut Lanes::new(&mut l, width));
            let once = ext(&te);
            let want: Vec<i32> = slots.iter().flatten().copied().collect();
            proptest::prop_assert_eq!(&once, &want);
            compact(&mut te, &mut Lanes::new(&mut l, width));
            proptest::prop_assert_eq!(ext(&te), once);
        }

        #[test]
        fn filter_compact_filter_is_conjunction(
            slots in proptest::collection::vec(proptest::option::of(1i32..11), 0..11),
            width in 1usize..40,
        ) {
            let g = synth::complete(12);
            let mut l = ledger();
            let input: Vec<i32> = slots.iter().map(|s| s.unwrap_or(INVALID)).collect();
            let even = |_: &[VertexId], e: VertexId| e % 2 == 0;
            let small = |_: &[VertexId], e: VertexId| e < 7;

            let mut a = te_with(&g, 4, &[0]);
            set_ext(&mut a, &input);
            filter(&mut a, even, &mut Lanes::new(&mut l, width));
            compact(&mut a, &mut Lanes::new(&mut l, width));
            filter(&mut a, small, &mut Lanes::new(&mut l, width));

            let mut b = te_with(&g, 4, &[0]);
            set_ext(&mut b, &input);
            filter(&mut b, |tr, e| even(tr, e) && small(tr, e), &mut Lanes::new(&mut l, width));

            let valid = |te: &TraversalEnumeration| ext(te).into_iter().filter(|&e| e != INVALID).collect::<Vec<_>>();
            proptest::prop_assert_eq!(valid(&a), valid(&b));
        }
    }

    #[test]
    fn move_forward_pops_last() {
        let g = synth::running_example();
        let q = RootQueue::from_roots(vec![]);
        let mut l = ledger();
        let mut te = te_with(&g, 4, &[0]);
        set_ext(&mut te, &[1, 2]);
        move_step(&mut te, true, &q, &g, &mut Lanes::new(&mut l, 32)).unwrap();
        assert_eq!(te.tr(), &[0, 2]);
        assert_eq!(te.bitmap().k(), 2);
    }

    #[test]
    fn move_retreats_when_exhausted() {
        let g = synth::running_example();
        let q = RootQueue::from_roots(vec![]);
        let mut l = ledger();
        let mut te = te_with(&g, 4, &[0, 1]);
        set_ext(&mut te, &[]);
        move_step(&mut te, false, &q, &g, &mut Lanes::new(&mut l, 32)).unwrap();
        assert_eq!(te.len(), 1);
    }

    #[test]
    fn move_pulls_next_root() {
        let g = synth::running_example();
        let q = RootQueue::from_roots(vec![4]);
        let mut l = ledger();
        let mut te = te_with(&g, 4, &[0]);
        set_ext(&mut te, &[]);
        move_step(&mut te, false, &q, &g, &mut Lanes::new(&mut l, 32)).unwrap();
        assert_eq!(te.tr(), &[4]);
        move_step(&mut te, false, &q, &g, &mut Lanes::new(&mut l, 32)).unwrap();
        assert_eq!(te.len(), 0);
    }

    #[test]
    fn move_at_last_level_retreats() {
        let g = synth::running_example();
        let q = RootQueue::from_roots(vec![]);
        let mut l = ledger();
        let mut te = te_with(&g, 3, &[0, 1]);
        set_ext(&mut te, &[2]);
        move_step(&mut te, false, &q, &g, &mut Lanes::new(&mut l, 32)).unwrap();
        assert_eq!(te.tr(), &[0]);
    }

    #[test]
    fn counter_counts_valid_only() {
        let g = synth::running_example();
        let mut l = ledger();
        let mut te = te_with(&g, 3, &[0, 1]);
        let mut r = Aggregates::default();
        set_ext(&mut te, &[2]);
        aggregate_counter(&te, &mut r, &mut Lanes::new(&mut l, 32));
        assert_eq!(r.clique_count, 1);
        set_ext(&mut te, &[-1, 2, -1]);
        aggregate_counter(&te, &mut r, &mut Lanes::new(&mut l, 32));
        assert_eq!(r.clique_count, 2);
        set_ext(&mut te, &[]);
        aggregate_counter(&te, &mut r, &mut Lanes::new(&mut l, 32));
        assert_eq!(r.clique_count, 2);
    }

    #[test]
    fn pattern_examples() {
        let g = synth::running_example();
        let d = CanonicalDictionary::build(3).unwrap();
        let mut l = ledger();
        let mut r = Aggregates::with_patterns(d.pattern_count());

        let mut te = te_with(&g, 3, &[0, 1]);
        set_ext(&mut te, &[2]);
        aggregate_pattern(&te, &d, &g, &mut r, &mut Lanes::new(&mut l, 32)).unwrap();
        assert_eq!(r.pattern_counts, vec![0, 1]);

        let mut te = te_with(&g, 3, &[1, 3]);
        set_ext(&mut te, &[4]);
        aggregate_pattern(&te, &d, &g, &mut r, &mut Lanes::new(&mut l, 32)).unwrap();
        assert_eq!(r.pattern_counts, vec![1, 1]);
    }

    #[test]
    fn store_examples() {
        let g = synth::running_example();
        let (tx, rx) = crate::aggregate::store_buffer(8);
        let mut l = ledger();
        let mut r = Aggregates::default();
        let mut te = te_with(&g, 3, &[0, 1]);
        set_ext(&mut te, &[2, -1]);
        aggregate_store(&te, &g, &tx, &mut r, &mut Lanes::new(&mut l, 32)).unwrap();
        set_ext(&mut te, &[]);
        aggregate_store(&te, &g, &tx, &mut r, &mut Lanes::new(&mut l, 32)).unwrap();
        drop(tx);
        let mut got = Vec::new();
        rx.drain(|rec| got.push(rec));
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].vertices, vec![0, 1, 2]);
        assert_eq!(got[0].bitmap.bits(), 0b11);
    }

    #[test]
    fn lockstep_cheaper_than_per_lane_on_wide_adjacency() {
        let g = synth::complete(100);
        let mut wc = CoalescenceLedger::new(LedgerMode::Lockstep, 32);
        let mut dfs = CoalescenceLedger::new(LedgerMode::PerLane, 32);
        let mut a = te_with(&g, 4, &[0]);
        let mut b = a.clone();
        extend(&mut a, 0, 1, &g, &mut Lanes::new(&mut wc, 32)).unwrap();
        extend(&mut b, 0, 1, &g, &mut Lanes::new(&mut dfs, 1)).unwrap();
        assert_eq!(ext(&a), ext(&b));
        assert!(wc.lockstep_instructions < dfs.lockstep_instructions);
        assert!(wc.load_transactions < dfs.load_transactions);
    }
}
