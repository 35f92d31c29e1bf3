use crate::canon::{is_canonical_with_mask, CanonicalDictionary, MIN_K};
use crate::engine::{self, adjacency_mask, Application, EngineConfig, Executor, RunOutput};
use crate::error::{Error, Result};
use crate::graph::CsrGraph;

/// Counts of connected induced k-vertex subgraphs per pattern id.
#[derive(Debug, Clone, Copy)]
pub struct MotifCounting {
    k: usize,
}

impl MotifCounting {
    pub fn new(k: usize, dict: &CanonicalDictionary) -> Result<Self> {
        if k < MIN_K {
            return Err(Error::UnsupportedSize { k, min: MIN_K, max: dict.k() });
        }
        if dict.k() != k {
            return Err(Error::Dictionary(format!("dictionary is for k={}, run asks for k={k}", dict.k())));
        }
        Ok(MotifCounting { k })
    }
}

impl Application for MotifCounting {
    fn name(&self) -> &str {
        "motifs"
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
        }
        if len == self.k - 1 {
            ex.aggregate_pattern()?;
        }
        Ok(())
    }
}

/// Per-pattern counts, indexed by dictionary id.
pub fn motif_counting(
    graph: &CsrGraph,
    k: usize,
    dict: &CanonicalDictionary,
    cfg: &EngineConfig,
) -> Result<(Vec<u64>, RunOutput)> {
    let app = MotifCounting::new(k, dict)?;
    let out = engine::run(graph, &app, Some(dict), None, cfg)?;
    Ok((out.aggregates.pattern_counts.clone(), out))
}
