use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: u64, n: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("bitmap {bits:#x} is not a connected traversal encoding for k={k}")]
    InvalidEncoding { bits: u64, k: usize },

    #[error("unsupported subgraph size k={k} (supported {min}..={max})")]
    UnsupportedSize { k: usize, min: usize, max: usize },

    #[error("extension capacity exceeded at level {level}: capacity {capacity}")]
    Capacity { level: usize, capacity: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("dictionary format: {0}")]
    DictionaryFormat(String),

    #[error("{0}")]
    Dictionary(String),

    #[error("oracle guard exceeded: n={n}, k={k} (limits n<={max_n}, k<={max_k})")]
    OracleGuard { n: usize, k: usize, max_n: usize, max_k: usize },

    #[error("worker(s) failed to stop within {0:?}")]
    StopTimeout(std::time::Duration),

    #[error("store consumer disconnected")]
    Shutdown,

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit status for this error: 2 for broken invariants, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 2,
            _ => 1,
        }
    }
}
