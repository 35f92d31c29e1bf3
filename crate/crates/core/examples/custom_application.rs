//! A new application from the engine primitives: count induced paths on
//! k vertices. Same exploration as motif counting, but the last level is
//! filtered by shape and counted instead of classified.

use warpmine::apps::oracle_enumerate;
use warpmine::canon::{canonical_form, is_canonical_with_mask, EdgeBitmap};
use warpmine::engine::{adjacency_mask, run, Application, Executor};
use warpmine::{synth, EngineConfig};

struct InducedPaths {
    k: usize,
    path: EdgeBitmap,
}

impl InducedPaths {
    fn new(k: usize) -> warpmine::Result<Self> {
        let mut b = EdgeBitmap::root();
        for i in 1..k {
            b = b.extend(1 << (i - 1))?;
        }
        Ok(InducedPaths { k, path: canonical_form(b)? })
    }
}

impl Application for InducedPaths {
    fn name(&self) -> &str {
        "induced-paths"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn generates_edges(&self) -> bool {
        true
    }

    fn process(&self, ex: &mut Executor<'_, '_>) -> warpmine::Result<()> {
        let len = ex.len();
        if ex.extend(0, len)? {
            let g = ex.graph();
            ex.filter(|tr, e| is_canonical_with_mask(tr, e, adjacency_mask(tr, e, g)));
            if len == self.k - 1 {
                let prefix = ex.te().bitmap();
                ex.filter(|tr, e| {
                    let b = prefix.extend(adjacency_mask(tr, e, g)).expect("extension touches tr");
                    canonical_form(b).is_ok_and(|c| c == self.path)
                });
            }
            ex.compact();
        }
        if len == self.k - 1 {
            ex.aggregate_counter();
        }
        Ok(())
    }
}

fn main() -> warpmine::Result<()> {
    let graph = synth::erdos_renyi(25, 0.2, 5);
    for k in 3..=5 {
        let app = InducedPaths::new(k)?;
        let out = run(&graph, &app, None, None, &EngineConfig::default())?;
        let expected = oracle_enumerate(&graph, k)?.count(app.path.bits());
        println!("induced P{k}: {} (brute force {expected})", out.aggregates.clique_count);
        assert_eq!(out.aggregates.clique_count, expected);
    }
    Ok(())
}
