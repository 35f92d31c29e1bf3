//! Counts k-cliques of an edge-list file (or a generated graph) in every mode.
//!
//! cargo run --release --example clique_counting -- [GRAPH] [K]

use warpmine::apps::clique_counting;
use warpmine::{synth, CsrGraph, EngineConfig, Mode};

fn main() -> warpmine::Result<()> {
    let mut args = std::env::args().skip(1);
    let graph = match args.next() {
        Some(path) => CsrGraph::from_path(path)?,
        None => synth::erdos_renyi(500, 0.05, 1),
    };
    let k: usize = args.next().map_or(4, |s| s.parse().expect("K must be an integer"));
    println!("{} vertices, {} edges, max degree {}", graph.vertex_count(), graph.edge_count(), graph.max_degree());

    for mode in Mode::ALL {
        let cfg = EngineConfig::default().with_mode(mode);
        let (count, out) = clique_counting(&graph, k, &cfg)?;
        println!("{mode:>3}: {count} {k}-cliques in {:.1} ms", out.wall_time.as_secs_f64() * 1e3);
    }
    Ok(())
}
