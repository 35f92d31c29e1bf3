//! Traversal Enumeration: the per-warp DFS-wide stack.

use crate::canon::EdgeBitmap;
use crate::error::Result;
use crate::graph::{CsrGraph, VertexId};

/// Marker for invalidated extension slots.
pub const INVALID: i32 = -1;

/// Extensions of one traversal prefix. Pending (unconsumed) entries live in
/// `ext[cursor..ext_len]`; `move` pops from the back, stealing takes from
/// the front.
#[derive(Debug, Clone)]
pub struct Level {
    pub(crate) ext: Vec<i32>,
    pub(crate) ext_len: usize,
    pub(crate) cursor: usize,
    pub(crate) written: usize,
    pub(crate) generated: bool,
}

impl Level {
    fn with_capacity(cap: usize) -> Self {
        Level { ext: vec![INVALID; cap], ext_len: 0, cursor: 0, written: 0, generated: false }
    }

    fn reset(&mut self) {
        self.ext_len = 0;
        self.cursor = 0;
        self.written = 0;
        self.generated = false;
    }

    /// Marks the level as fully explored (used for prefixes copied from a donor).
    fn exhaust(&mut self) {
        self.reset();
        self.generated = true;
    }

    pub fn capacity(&self) -> usize {
        self.ext.len()
    }

    /// `ext[0..ext_len]`, invalid slots included.
    pub fn extensions(&self) -> &[i32] {
        &self.ext[..self.ext_len]
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn is_generated(&self) -> bool {
        self.generated
    }

    pub fn pending(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.ext[self.cursor..self.ext_len].iter().filter(|&&e| e != INVALID).map(|&e| e as VertexId)
    }
}

#[derive(Debug, Clone)]
pub struct TraversalEnumeration {
    k: usize,
    pub(crate) len: usize,
    pub(crate) tr: Vec<VertexId>,
    pub(crate) levels: Vec<Level>,
    pub(crate) bitmaps: Vec<EdgeBitmap>,
    genedges: bool,
    peak_storage: usize,
}

impl TraversalEnumeration {
    /// Allocates `(l + 1) * max_degree` extension slots for every level `l`
    /// in `0..k-1`.
    pub fn new(k: usize, max_degree: usize, genedges: bool) -> Self {
        assert!(k >= 2, "traversals of size k >= 2 only");
        TraversalEnumeration {
            k,
            len: 0,
            tr: vec![0; k],
            levels: (0..k - 1).map(|l| Level::with_capacity((l + 1) * max_degree)).collect(),
            bitmaps: vec![EdgeBitmap::root(); k],
            genedges,
            peak_storage: 0,
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn generates_edges(&self) -> bool {
        self.genedges
    }

    /// The current traversal `tr[0..len]`.
    #[inline]
    pub fn tr(&self) -> &[VertexId] {
        &self.tr[..self.len]
    }

    pub fn last(&self) -> Option<VertexId> {
        self.tr().last().copied()
    }

    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l]
    }

    /// Extensions of the current traversal (level `len - 1`).
    pub fn current_level(&self) -> Option<&Level> {
        self.len.checked_sub(1).map(|l| &self.levels[l])
    }

    /// Edge bitmap of the current traversal.
    pub fn bitmap(&self) -> EdgeBitmap {
        self.bitmaps[self.len.saturating_sub(1)]
    }

    /// Slots allocated for extensions across all levels.
    pub fn allocated_storage(&self) -> usize {
        self.levels.iter().map(Level::capacity).sum()
    }

    /// Slots currently holding extensions of live levels.
    pub fn current_storage(&self) -> usize {
        self.levels[..self.len.min(self.k - 1)].iter().map(|l| l.written).sum()
    }

    pub fn peak_storage(&self) -> usize {
        self.peak_storage
    }

    pub(crate) fn note_storage(&mut self) {
        self.peak_storage = self.peak_storage.max(self.current_storage());
    }

    /// Replaces the state with the single-vertex traversal `[root]`.
    pub fn start_root(&mut self, root: VertexId) {
        self.len = 1;
        self.tr[0] = root;
        self.levels[0].reset();
        self.bitmaps[0] = EdgeBitmap::root();
    }

    pub(crate) fn push(&mut self, v: VertexId) {
        debug_assert!(self.len < self.k);
        self.tr[self.len] = v;
        self.len += 1;
        if self.len - 1 < self.levels.len() {
            self.levels[self.len - 1].reset();
        }
    }

    /// Traversals not yet explored: the current one when its extensions are
    /// still ungenerated, plus `prefix + e` for every pending extension `e`
    /// of a live level. Redistribution conserves this multiset.
    pub fn pending_traversals(&self) -> Vec<Vec<VertexId>> {
        let mut out = Vec::new();
        if self.len == 0 {
            return out;
        }
        let top = self.len - 1;
        if top >= self.levels.len() || !self.levels[top].generated {
            out.push(self.tr().to_vec());
        }
        for l in 0..self.len.min(self.levels.len()) {
            if !self.levels[l].generated {
                continue;
            }
            for e in self.levels[l].pending() {
                let mut t = self.tr[..=l].to_vec();
                t.push(e);
                out.push(t);
            }
        }
        out
    }

    /// Shallowest live level holding a pending extension that can seed a
    /// new traversal.
    pub fn stealable_level(&self) -> Option<usize> {
        (0..self.len.min(self.levels.len()))
            .filter(|&l| l + 2 < self.k)
            .find(|&l| self.levels[l].generated && self.levels[l].pending().next().is_some())
    }

    /// Removes the lowest-index pending extension of the shallowest
    /// stealable level; returns the level and the vertex.
    pub fn steal(&mut self) -> Option<(usize, VertexId)> {
        let l = self.stealable_level()?;
        let level = &mut self.levels[l];
        while level.cursor < level.ext_len {
            let e = level.ext[level.cursor];
            level.cursor += 1;
            if e != INVALID {
                return Some((l, e as VertexId));
            }
        }
        unreachable!("stealable level has a pending extension")
    }

    /// Becomes `prefix + [stolen]` with the prefix levels marked exhausted,
    /// so retreating past the stolen vertex ends this enumeration.
    pub fn adopt(
        &mut self,
        prefix: &[VertexId],
        prefix_bitmap: EdgeBitmap,
        stolen: VertexId,
        graph: &CsrGraph,
    ) -> Result<()> {
        let l = prefix.len() - 1;
        debug_assert!(l + 2 < self.k);
        self.tr[..=l].copy_from_slice(prefix);
        self.tr[l + 1] = stolen;
        self.len = l + 2;
        for level in &mut self.levels[..=l] {
            level.exhaust();
        }
        self.levels[l + 1].reset();
        if self.genedges {
            self.bitmaps[l] = prefix_bitmap;
            let mask = super::primitives::adjacency_mask(prefix, stolen, graph);
            self.bitmaps[l + 1] = prefix_bitmap.extend(mask)?;
        }
        Ok(())
    }

    /// Bitmaps are meaningful only for `l < len` and when edges are generated.
    pub fn bitmap_at(&self, l: usize) -> EdgeBitmap {
        self.bitmaps[l]
    }
}
