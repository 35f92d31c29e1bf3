//! One hub vertex joined to many dense blobs: without balancing, the warp
//! that draws the hub does nearly all the work.

use warpmine::apps::clique_counting;
use warpmine::balance::BalanceConfig;
use warpmine::{synth, Backend, EngineConfig, Mode, SimConfig};

fn main() -> warpmine::Result<()> {
    let graph = synth::star_of_cliques(48, 9);
    let k = 5;
    println!("simulated device, 16 warps:");
    for mode in [Mode::Wc, Mode::Opt] {
        let cfg = EngineConfig::default()
            .with_mode(mode)
            .with_warps(16)
            .with_balance(BalanceConfig::for_cliques())
            .with_backend(Backend::Simulated(SimConfig::default()));
        let (count, out) = clique_counting(&graph, k, &cfg)?;
        println!(
            "  {mode:>3}: {count} cliques, makespan {:>8} cycles, {} rebalances, {} traversals migrated",
            out.modeled_makespan.unwrap_or(0),
            out.balance.rebalance_count,
            out.balance.migrated_traversals
        );
    }

    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    println!("threads, {threads} warps:");
    for mode in [Mode::Wc, Mode::Opt] {
        let cfg = EngineConfig::default().with_mode(mode).with_warps(threads);
        let (count, out) = clique_counting(&graph, k, &cfg)?;
        println!(
            "  {mode:>3}: {count} cliques in {:.1} ms, {} rebalances",
            out.wall_time.as_secs_f64() * 1e3,
            out.balance.rebalance_count
        );
    }
    Ok(())
}
