use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;

use crate::canon::{canonical_form, stored_bits, EdgeBitmap, MIN_K};
use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};

pub const ORACLE_MAX_N: usize = 40;
pub const ORACLE_MAX_K: usize = 6;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleResult {
    /// Canonical bitmap → number of connected induced subgraphs with that shape.
    pub patterns: BTreeMap<u64, u64>,
    /// Vertex sets of those subgraphs, each sorted.
    pub subgraphs: BTreeSet<Vec<VertexId>>,
}

impl OracleResult {
    pub fn count(&self, canonical_bits: u64) -> u64 {
        self.patterns.get(&canonical_bits).copied().unwrap_or(0)
    }
}

/// Canonical bitmap of the k-clique.
pub fn complete_pattern(k: usize) -> u64 {
    (1u64 << stored_bits(k)) - 1
}

/// Classifies every k-subset of vertices by brute force.
pub fn oracle_enumerate(graph: &CsrGraph, k: usize) -> Result<OracleResult> {
    oracle_enumerate_with_guard(graph, k, ORACLE_MAX_N, ORACLE_MAX_K)
}

pub fn oracle_enumerate_with_guard(graph: &CsrGraph, k: usize, max_n: usize, max_k: usize) -> Result<OracleResult> {
    let n = graph.vertex_count();
    if n > max_n || k > max_k {
        return Err(Error::OracleGuard { n, k, max_n, max_k });
    }
    if k < MIN_K {
        return Err(Error::UnsupportedSize { k, min: MIN_K, max: max_k });
    }
    let mut result = OracleResult::default();
    let mut cache: HashMap<EdgeBitmap, u64> = HashMap::new();
    for subset in (0..n as VertexId).combinations(k) {
        let Some(bitmap) = bfs_bitmap(graph, &subset) else { continue };
        let canon = match cache.get(&bitmap) {
            Some(&c) => c,
            None => {
                let c = canonical_form(bitmap)?.bits();
                cache.insert(bitmap, c);
                c
            }
        };
        *result.patterns.entry(canon).or_default() += 1;
        result.subgraphs.insert(subset);
    }
    Ok(result)
}

/// Bitmap of `subset` in breadth-first order from its first vertex, or
/// `None` when the induced subgraph is disconnected.
fn bfs_bitmap(graph: &CsrGraph, subset: &[VertexId]) -> Option<EdgeBitmap> {
    let k = subset.len();
    let mut order = vec![0usize];
    let mut seen = 1u64;
    let mut head = 0;
    while head < order.len() {
        let a = subset[order[head]];
        head += 1;
        for (j, &b) in subset.iter().enumerate() {
            if seen & (1 << j) == 0 && graph.has_edge(a, b) {
                seen |= 1 << j;
                order.push(j);
            }
        }
    }
    if order.len() < k {
        return None;
    }
    let mut bitmap = EdgeBitmap::root();
    for i in 1..k {
        let v = subset[order[i]];
        let mask = (0..i).filter(|&j| graph.has_edge(subset[order[j]], v)).fold(0u64, |m, j| m | 1 << j);
        bitmap = bitmap.extend(mask).ok()?;
    }
    Some(bitmap)
}
