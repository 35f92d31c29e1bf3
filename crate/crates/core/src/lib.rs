//! Warp-centric subgraph enumeration.
//!
//! Traversals are explored depth-first, but every step materializes all
//! extensions of the current traversal at once so a whole warp of lanes can
//! work on them in lockstep. Applications (clique counting, motif counting,
//! subgraph listing) are short pipelines of extend, filter, compact and
//! aggregate primitives; the engine runs them in DFS, warp-centric or
//! load-balanced mode and records a modeled cost of each.

pub mod aggregate;
pub mod apps;
pub mod balance;
pub mod canon;
pub mod cli;
pub mod engine;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod synth;

pub use canon::{CanonicalDictionary, EdgeBitmap};
pub use engine::{Backend, EngineConfig, Mode, RunOutput, SimConfig};
pub use error::{Error, Result};
pub use graph::{CsrGraph, VertexId};
