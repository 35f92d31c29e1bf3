//! Motif census: how many connected induced k-vertex subgraphs of each shape.
//!
//! cargo run --release --example motif_counting -- [GRAPH] [K]

use warpmine::apps::motif_counting;
use warpmine::{synth, CanonicalDictionary, CsrGraph, EdgeBitmap, EngineConfig};

fn main() -> warpmine::Result<()> {
    let mut args = std::env::args().skip(1);
    let graph = match args.next() {
        Some(path) => CsrGraph::from_path(path)?,
        None => synth::erdos_renyi(300, 0.04, 2),
    };
    let k: usize = args.next().map_or(4, |s| s.parse().expect("K must be an integer"));
    let dict = CanonicalDictionary::build(k)?;
    let (counts, out) = motif_counting(&graph, k, &dict, &EngineConfig::default())?;

    println!("{} patterns of {k} vertices, {} subgraphs", dict.pattern_count(), out.aggregates.aggregated);
    for (id, &count) in counts.iter().enumerate() {
        let bits = dict.canonical_bitmaps()[id];
        let edges = 1 + EdgeBitmap::new(bits, k)?.bits().count_ones();
        println!("pattern {id:>3}  bitmap {bits:#06x}  {edges:>2} edges  {count}");
    }
    Ok(())
}
