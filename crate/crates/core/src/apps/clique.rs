use crate::canon::MIN_K;
use crate::engine::{self, Application, EngineConfig, Executor, RunOutput};
use crate::error::{Error, Result};
use crate::graph::CsrGraph;

pub const MAX_CLIQUE_K: usize = 12;

/// k-clique counting. Traversals grow in ascending vertex order through the
/// neighbors of their first vertex, so each clique is reached exactly once.
#[derive(Debug, Clone, Copy)]
pub struct CliqueCounting {
    k: usize,
}

impl CliqueCounting {
    pub fn new(k: usize) -> Result<Self> {
        if !(MIN_K..=MAX_CLIQUE_K).contains(&k) {
            return Err(Error::UnsupportedSize { k, min: MIN_K, max: MAX_CLIQUE_K });
        }
        Ok(CliqueCounting { k })
    }
}

impl Application for CliqueCounting {
    fn name(&self) -> &str {
        "clique"
    }

    fn k(&self) -> usize {
        self.k
    }

    fn generates_edges(&self) -> bool {
        false
    }

    fn process(&self, ex: &mut Executor<'_, '_>) -> Result<()> {
        if ex.extend(0, 1)? {
            let g = ex.graph();
            let last = ex.last();
            ex.filter(|_, e| e > last);
            ex.compact();
            ex.filter(|tr, e| tr[1..].iter().all(|&t| g.has_edge(t, e)));
        }
        if ex.len() == self.k - 1 {
            ex.aggregate_counter();
        }
        Ok(())
    }
}

/// Number of `k`-cliques in `graph`.
pub fn clique_counting(graph: &CsrGraph, k: usize, cfg: &EngineConfig) -> Result<(u64, RunOutput)> {
    let app = CliqueCounting::new(k)?;
    let out = engine::run(graph, &app, None, None, cfg)?;
    Ok((out.aggregates.clique_count, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Backend, Mode};
    use crate::synth;

    fn count(g: &CsrGraph, k: usize, mode: Mode) -> u64 {
        let cfg = EngineConfig::default().with_mode(mode).with_warps(3).with_lane_width(4);
        clique_counting(g, k, &cfg).unwrap().0
    }

    #[test]
    fn running_example_triangles() {
        for mode in Mode::ALL {
            assert_eq!(count(&synth::running_example(), 3, mode), 2);
        }
    }

    #[test]
    fn complete_graph_binomials() {
        let k5 = synth::complete(5);
        assert_eq!(count(&k5, 4, Mode::Wc), 5);
        assert_eq!(count(&k5, 5, Mode::Dfs), 1);
        assert_eq!(count(&synth::complete(13), 12, Mode::Opt), 13);
    }

    #[test]
    fn k_bounds() {
        assert!(CliqueCounting::new(2).is_err());
        assert!(CliqueCounting::new(13).is_err());
    }

    #[test]
    fn simulated_backend_agrees() {
        let g = synth::erdos_renyi(40, 0.4, 5);
        let cfg = EngineConfig::default()
            .with_mode(Mode::Opt)
            .with_warps(4)
            .with_backend(Backend::Simulated(Default::default()));
        let sim = clique_counting(&g, 4, &cfg).unwrap();
        assert_eq!(sim.0, count(&g, 4, Mode::Wc));
        assert!(sim.1.modeled_makespan.unwrap() > 0);
    }
}
