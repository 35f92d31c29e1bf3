//! Streams every induced 4-vertex cycle of a small graph through the
//! bounded store buffer.

use warpmine::apps::subgraph_listing;
use warpmine::canon::canonical_form;
use warpmine::{synth, EdgeBitmap, EngineConfig, VertexId};

fn main() -> warpmine::Result<()> {
    let graph = synth::erdos_renyi(40, 0.15, 9);
    let k = 4;
    // the canonical bitmap of C4, taken from an explicit traversal 0-1-2-3-0
    let cycle = canonical_form(EdgeBitmap::root().extend(0b1)?.extend(0b010)?.extend(0b101)?)?;
    let is_cycle = move |_: &[VertexId], b: EdgeBitmap| canonical_form(b).is_ok_and(|c| c == cycle);

    let mut found = Vec::new();
    let (n, _) = subgraph_listing(&graph, k, &is_cycle, &EngineConfig::default(), 256, |record| {
        found.push(record.sorted_vertices())
    })?;
    found.sort();
    println!("{n} induced 4-cycles");
    for vs in found.iter().take(10) {
        println!("  {vs:?}");
    }
    Ok(())
}
