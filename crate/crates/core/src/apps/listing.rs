use std::thread;

use crate::aggregate::{store_buffer, StoreRecord};
use crate::canon::{is_canonical_with_mask, EdgeBitmap, MIN_K, MAX_EDGE_K};
use crate::engine::{self, adjacency_mask, Application, EngineConfig, Executor, RunOutput};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};

/// Decides whether a size-k subgraph (vertices in traversal order plus its
/// edge bitmap) is emitted.
pub type ListingPredicate = dyn Fn(&[VertexId], EdgeBitmap) -> bool + Sync;

/// Emits every connected induced k-subgraph accepted by the predicate.
pub struct SubgraphListing<'p> {
    k: usize,
    predicate: &'p ListingPredicate,
}

impl<'p> SubgraphListing<'p> {
    pub fn new(k: usize, predicate: &'p ListingPredicate) -> Result<Self> {
        if !(MIN_K..=MAX_EDGE_K).contains(&k) {
            return Err(Error::UnsupportedSize { k, min: MIN_K, max: MAX_EDGE_K });
        }
        Ok(SubgraphListing { k, predicate })
    }
}

impl Application for SubgraphListing<'_> {
    fn name(&self) -> &str {
        "list"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn generates_edges(&self) -> bool {
        true
    }

    fn process(&self, ex: &mut Executor<'_, '_>) -> Result<()> {
        let len = ex.len();
        if ex.extend(0, len)? {
            let g = ex.graph();
            ex.filter(|tr, e| is_canonical_with_mask(tr, e, adjacency_mask(tr, e, g)));
            ex.compact();
            if len == self.k - 1 {
                let prefix = ex.te().bitmap();
                let mut vertices = Vec::with_capacity(self.k);
                ex.filter(|tr, e| {
                    let bitmap = prefix.extend(adjacency_mask(tr, e, g)).expect("canonical extensions touch tr");
                    vertices.clear();
                    vertices.extend_from_slice(tr);
                    vertices.push(e);
                    (self.predicate)(&vertices, bitmap)
                });
            }
        }
        if len == self.k - 1 {
            ex.aggregate_store()?;
        }
        Ok(())
    }
}

/// Runs the listing with a bounded buffer drained into `sink` on a
/// separate consumer thread. Returns the number of records delivered.
pub fn subgraph_listing<F>(
    graph: &CsrGraph,
    k: usize,
    predicate: &ListingPredicate,
    cfg: &EngineConfig,
    buffer: usize,
    sink: F,
) -> Result<(u64, RunOutput)>
where
    F: FnMut(StoreRecord) + Send,
{
    let app = SubgraphListing::new(k, predicate)?;
    let (producer, consumer) = store_buffer(buffer);
    thread::scope(|s| {
        let drained = s.spawn(move || consumer.drain(sink));
        let out = engine::run(graph, &app, None, Some(producer), cfg);
        let delivered = drained.join().map_err(|_| Error::Internal("store consumer panicked".into()))?;
        Ok((delivered, out?))
    })
}
