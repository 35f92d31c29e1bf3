//! Reference applications built on the engine primitives, and a
//! brute-force oracle to check them against.

mod clique;
mod listing;
mod motif;
mod oracle;

pub use clique::{clique_counting, CliqueCounting, MAX_CLIQUE_K};
pub use listing::{subgraph_listing, ListingPredicate, SubgraphListing};
pub use motif::{motif_counting, MotifCounting};
pub use oracle::{complete_pattern, oracle_enumerate, oracle_enumerate_with_guard, OracleResult, ORACLE_MAX_K, ORACLE_MAX_N};
