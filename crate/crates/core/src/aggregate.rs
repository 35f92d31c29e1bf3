//! Warp-local aggregation results, the bounded store buffer, and the
//! host-side reduction.

use std::fmt;
use std::sync::mpsc::{self, Receiver, SyncSender};

use serde::Serialize;

use crate::canon::EdgeBitmap;
use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Per-warp results. Counters are 64-bit; nothing here is shared between
/// warps while a run is in flight.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Aggregates {
    pub clique_count: u64,
    /// Indexed by pattern id.
    pub pattern_counts: Vec<u64>,
    /// Size-k traversals that reached any aggregation primitive.
    pub aggregated: u64,
    pub stored: u64,
}

impl Aggregates {
    pub fn with_patterns(pattern_count: usize) -> Self {
        Aggregates { pattern_counts: vec![0; pattern_count], ..Default::default() }
    }

    pub fn merge(&mut self, other: &Aggregates) {
        self.clique_count += other.clique_count;
        self.aggregated += other.aggregated;
        self.stored += other.stored;
        if self.pattern_counts.len() < other.pattern_counts.len() {
            self.pattern_counts.resize(other.pattern_counts.len(), 0);
        }
        for (a, b) in self.pattern_counts.iter_mut().zip(&other.pattern_counts) {
            *a += b;
        }
    }
}

/// Elementwise sum of warp-local results.
pub fn reduce<'a, I>(locals: I) -> Aggregates
where
    I: IntoIterator<Item = &'a Aggregates>,
{
    locals.into_iter().fold(Aggregates::default(), |mut acc, l| {
        acc.merge(l);
        acc
    })
}

/// One listed subgraph: vertices in traversal order plus its edge bitmap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoreRecord {
    pub vertices: Vec<VertexId>,
    pub bitmap: EdgeBitmap,
}

impl StoreRecord {
    pub fn sorted_vertices(&self) -> Vec<VertexId> {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for StoreRecord {
    /// Ascending vertex ids, then the bitmap in hexadecimal.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.sorted_vertices() {
            write!(f, "{v} ")?;
        }
        write!(f, "{:x}", self.bitmap.bits())
    }
}

/// Producer side of the store buffer; cloned once per warp.
#[derive(Debug, Clone)]
pub struct StoreProducer(SyncSender<StoreRecord>);

impl StoreProducer {
    /// Blocks while the buffer is full.
    pub fn push(&self, record: StoreRecord) -> Result<()> {
        self.0.send(record).map_err(|_| Error::Shutdown)
    }
}

#[derive(Debug)]
pub struct StoreConsumer(Receiver<StoreRecord>);

impl StoreConsumer {
    /// Hands every record to `sink` until all producers are dropped.
    pub fn drain<F: FnMut(StoreRecord)>(self, mut sink: F) -> u64 {
        let mut n = 0;
        for record in self.0 {
            sink(record);
            n += 1;
        }
        n
    }
}

/// Bounded multi-producer, single-consumer buffer.
pub fn store_buffer(capacity: usize) -> (StoreProducer, StoreConsumer) {
    let (tx, rx) = mpsc::sync_channel(capacity.max(1));
    (StoreProducer(tx), StoreConsumer(rx))
}

#[cfg(test)]
mod tests {
    use std::thread;
    use std::time::Duration;

    use super::*;

    #[test]
    fn reduce_sums_elementwise() {
        let a = Aggregates { pattern_counts: vec![0, 2], clique_count: 1, ..Default::default() };
        let b = Aggregates { pattern_counts: vec![0, 3], clique_count: 4, ..Default::default() };
        let g = reduce([&a, &b]);
        assert_eq!(g.pattern_counts, vec![0, 5]);
        assert_eq!(g.clique_count, 5);
        assert_eq!(reduce([&a]), a);
    }

    #[test]
    fn record_line_format() {
        let r = StoreRecord { vertices: vec![2, 0, 1], bitmap: EdgeBitmap::new(0b11, 3).unwrap() };
        assert_eq!(r.to_string(), "0 1 2 3");
    }

    #[test]
    fn back_pressure_loses_nothing() {
        let (tx, rx) = store_buffer(1);
        let producer = thread::spawn(move || {
            for i in 0..20u32 {
                tx.push(StoreRecord { vertices: vec![i], bitmap: EdgeBitmap::root() }).unwrap();
            }
        });
        thread::sleep(Duration::from_millis(20));
        let mut seen = Vec::new();
        let n = rx.drain(|r| {
            thread::sleep(Duration::from_millis(1));
            seen.push(r.vertices[0]);
        });
        producer.join().unwrap();
        assert_eq!(n, 20);
        assert_eq!(seen, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn consumer_gone_is_shutdown() {
        let (tx, rx) = store_buffer(4);
        drop(rx);
        let err = tx.push(StoreRecord { vertices: vec![0], bitmap: EdgeBitmap::root() });
        assert!(matches!(err, Err(Error::Shutdown)));
    }
}
