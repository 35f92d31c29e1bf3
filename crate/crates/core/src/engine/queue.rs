use std::sync::atomic::{AtomicUsize, Ordering};

use crate::graph::VertexId;

/// Global queue of single-vertex root traversals, popped atomically.
#[derive(Debug)]
pub struct RootQueue {
    roots: Vec<VertexId>,
    next: AtomicUsize,
}

impl RootQueue {
    /// One root per vertex, ascending.
    pub fn all_vertices(n: usize) -> Self {
        Self::from_roots((0..n as VertexId).collect())
    }

    pub fn from_roots(roots: Vec<VertexId>) -> Self {
        RootQueue { roots, next: AtomicUsize::new(0) }
    }

    pub fn pull(&self) -> Option<VertexId> {
        let i = self.next.fetch_add(1, Ordering::Relaxed);
        self.roots.get(i).copied()
    }

    /// Index of the next root to hand out.
    pub fn cursor(&self) -> usize {
        self.next.load(Ordering::Relaxed).min(self.roots.len())
    }

    pub fn remaining(&self) -> usize {
        self.roots.len() - self.cursor()
    }

    pub fn is_empty(&self) -> bool {
        self.remaining() == 0
    }
}
