//! Undirected simple graphs in compressed-sparse-row layout.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Vertex identifier after remapping to `0..n`.
pub type VertexId = u32;

/// Immutable undirected graph. Every adjacency slice is strictly ascending
/// and symmetric; self-loops and parallel edges never survive construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    original_ids: Vec<u64>,
    edge_count: usize,
    max_degree: usize,
}

impl CsrGraph {
    /// Builds a graph on `n` vertices. Duplicate edges (in either direction)
    /// and self-loops are dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        if n > i32::MAX as usize {
            return Err(Error::Config(format!("{n} vertices exceeds the supported id range")));
        }
        let mut pairs = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::VertexOutOfRange { vertex: w as u64, n });
                }
            }
            if u != v {
                pairs.push((u, v));
                pairs.push((v, u));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors: Vec<VertexId> = pairs.iter().map(|&(_, v)| v).collect();
        let max_degree = (0..n).map(|v| offsets[v + 1] - offsets[v]).max().unwrap_or(0);

        Ok(CsrGraph {
            edge_count: neighbors.len() / 2,
            offsets,
            neighbors,
            original_ids: (0..n as u64).collect(),
            max_degree,
        })
    }

    /// Parses a whitespace-separated edge list. Lines starting with `#` or
    /// `%` are comments. Vertex ids are remapped to `0..n` preserving their
    /// ascending order.
    pub fn load_edge_list<R: BufRead>(source: R) -> Result<Self> {
        let mut raw = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let mut endpoint = || -> Result<u64> {
                let token = tokens.next().ok_or_else(|| Error::Parse {
                    line: idx + 1,
                    message: "expected two vertex ids".into(),
                })?;
                token.parse::<u64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("malformed vertex id {token:?}"),
                })
            };
            let u = endpoint()?;
            let v = endpoint()?;
            raw.push((u, v));
        }

        let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
        ids.sort_unstable();
        ids.dedup();
        let remap = |x: u64| ids.binary_search(&x).expect("id collected above") as VertexId;
        let edges: Vec<_> = raw.iter().map(|&(u, v)| (remap(u), remap(v))).collect();

        let mut graph = CsrGraph::from_edges(ids.len(), edges)?;
        if graph.edge_count == 0 {
            return Err(Error::EmptyGraph);
        }
        graph.original_ids = ids;
        Ok(graph)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = File::open(path)?;
        CsrGraph::load_edge_list(BufReader::new(file))
    }

    /// Writes the graph as an ascending `u v` edge list with `u < v`, using
    /// the remapped ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// The concatenated adjacency array (length `2m`).
    pub fn adjacency_array(&self) -> &[VertexId] {
        &self.neighbors
    }

    /// Id the vertex carried in the source file.
    pub fn original_id(&self, v: VertexId) -> u64 {
        self.original_ids[v as usize]
    }

    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId]> {
        if v as usize >= self.vertex_count() {
            return Err(Error::VertexOutOfRange { vertex: v as u64, n: self.vertex_count() });
        }
        Ok(self.adj(v))
    }

    /// Unchecked variant of [`neighbors`](Self::neighbors); panics when `v` is out of range.
    #[inline]
    pub fn adj(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.adj(a).binary_search(&b).is_ok()
    }

    /// Every undirected edge once, as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.vertex_count() as VertexId)
            .flat_map(move |u| self.adj(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }
}
