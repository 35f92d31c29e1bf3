//! Deterministic synthetic graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{CsrGraph, VertexId};

fn build(n: usize, edges: Vec<(VertexId, VertexId)>) -> CsrGraph {
    CsrGraph::from_edges(n, edges).expect("generated edges are in range")
}

/// Five vertices: a triangle 0-1-2, a second triangle 1-2-3, and a tail 3-4.
pub fn running_example() -> CsrGraph {
    build(5, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)])
}

pub fn complete(n: usize) -> CsrGraph {
    let n32 = n as VertexId;
    build(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))).collect())
}

pub fn path(n: usize) -> CsrGraph {
    build(n, (1..n as VertexId).map(|v| (v - 1, v)).collect())
}

/// G(n, p) with a seeded ChaCha stream; the same seed always yields the same graph.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> CsrGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n32 = n as VertexId;
    let mut edges = Vec::new();
    for u in 0..n32 {
        for v in u + 1..n32 {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build(n, edges)
}

/// Vertex 0 joined to every vertex of `blobs` disjoint cliques of `size`
/// vertices each. Nearly all the work of a clique count sits under root 0.
pub fn star_of_cliques(blobs: usize, size: usize) -> CsrGraph {
    let n = 1 + blobs * size;
    let mut edges = Vec::new();
    for b in 0..blobs {
        let base = (1 + b * size) as VertexId;
        for i in 0..size as VertexId {
            edges.push((0, base + i));
            for j in i + 1..size as VertexId {
                edges.push((base + i, base + j));
            }
        }
    }
    build(n, edges)
}

/// Parses a generator spec: `er:N:P[:SEED]`, `star:BLOBS:SIZE`,
/// `complete:N`, `path:N` or `example`.
pub fn from_spec(spec: &str) -> Result<CsrGraph> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("bad generator spec {spec:?}"));
    let num = |i: usize| -> Result<usize> { parts.get(i).and_then(|s| s.parse().ok()).ok_or_else(bad) };
    match parts[0] {
        "example" if parts.len() == 1 => Ok(running_example()),
        "complete" if parts.len() == 2 => Ok(complete(num(1)?)),
        "path" if parts.len() == 2 => Ok(path(num(1)?)),
        "star" if parts.len() == 3 => Ok(star_of_cliques(num(1)?, num(2)?)),
        "er" if parts.len() == 3 || parts.len() == 4 => {
            let p: f64 = parts[2].parse().map_err(|_| bad())?;
            if !(0.0..=1.0).contains(&p) {
                return Err(bad());
            }
            let seed = if parts.len() == 4 { num(3)? as u64 } else { 0 };
            Ok(erdos_renyi(num(1)?, p, seed))
        }
        _ => Err(bad()),
    }
}
