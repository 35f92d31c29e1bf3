//! Test-side helpers: an oracle that shares no code with the engine or the
//! canonical-labeling module, and a fixed random-graph corpus.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use warpmine::balance::BalanceConfig;
use warpmine::{Backend, CsrGraph, EdgeBitmap, EngineConfig, Mode, SimConfig};

pub const DENSITIES: [f64; 3] = [0.1, 0.3, 0.6];
pub const SEEDS: u64 = 20;

pub struct Case {
    pub name: String,
    pub graph: CsrGraph,
}

/// 60 Erdős–Rényi graphs with 10 to 25 vertices.
pub fn corpus() -> Vec<Case> {
    let mut out = Vec::new();
    for (d, &p) in DENSITIES.iter().enumerate() {
        for seed in 0..SEEDS {
            let n = 10 + ((seed as usize) * 7 + d * 5) % 16;
            out.push(Case {
                name: format!("er(n={n},p={p},seed={seed})"),
                graph: warpmine::synth::erdos_renyi(n, p, 1000 * d as u64 + seed),
            });
        }
    }
    out
}

pub fn config(mode: Mode) -> EngineConfig {
    let balance = BalanceConfig::new(0.4, std::time::Duration::from_millis(1)).unwrap();
    EngineConfig::default().with_mode(mode).with_warps(4).with_lane_width(8).with_balance(balance)
}

/// Deterministic backend with a balancer that fires at the first idle warp.
pub fn eager_sim(mode: Mode, warps: usize) -> EngineConfig {
    let balance = BalanceConfig::new(1.0, std::time::Duration::from_millis(1)).unwrap();
    EngineConfig::default()
        .with_mode(mode)
        .with_warps(warps)
        .with_lane_width(8)
        .with_balance(balance)
        .with_backend(Backend::Simulated(SimConfig { poll_cycles: 200, relaunch_cycles: 20 }))
}

fn adjacent(g: &CsrGraph, a: u32, b: u32) -> bool {
    g.adj(a).contains(&b)
}

/// Upper-triangle adjacency bits of `vs` in the given order.
fn matrix_bits(adj: &[Vec<bool>], order: &[usize]) -> u64 {
    let mut bits = 0u64;
    let mut pos = 0;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if adj[order[i]][order[j]] {
                bits |= 1 << pos;
            }
            pos += 1;
        }
    }
    bits
}

/// Isomorphism-class label: the smallest upper-triangle bit string over
/// every vertex order.
pub fn matrix_canon(adj: &[Vec<bool>]) -> u64 {
    let k = adj.len();
    (0..k).permutations(k).map(|p| matrix_bits(adj, &p)).min().unwrap()
}

fn connected(adj: &[Vec<bool>]) -> bool {
    let k = adj.len();
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(a) = stack.pop() {
        for b in 0..k {
            if adj[a][b] && !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for v in start..n {
        if n - v < k - cur.len() {
            break;
        }
        cur.push(v as u32);
        subsets(n, k, v + 1, cur, f);
        cur.pop();
    }
}

#[derive(Default)]
pub struct BruteForce {
    /// Isomorphism label → number of connected induced subgraphs.
    pub classes: BTreeMap<u64, u64>,
    pub subgraphs: BTreeSet<Vec<u32>>,
}

impl BruteForce {
    pub fn cliques(&self, k: usize) -> u64 {
        let full = (1u64 << (k * (k - 1) / 2)) - 1;
        self.classes.get(&full).copied().unwrap_or(0)
    }
}

pub fn brute_force(g: &CsrGraph, k: usize) -> BruteForce {
    let mut out = BruteForce::default();
    let mut labels: BTreeMap<Vec<Vec<bool>>, u64> = BTreeMap::new();
    subsets(g.vertex_count(), k, 0, &mut Vec::new(), &mut |vs| {
        let adj: Vec<Vec<bool>> = vs.iter().map(|&a| vs.iter().map(|&b| a != b && adjacent(g, a, b)).collect()).collect();
        if !connected(&adj) {
            return;
        }
        let label = match labels.get(&adj) {
            Some(&l) => l,
            None => {
                let l = matrix_canon(&adj);
                labels.insert(adj, l);
                l
            }
        };
        *out.classes.entry(label).or_default() += 1;
        out.subgraphs.insert(vs.to_vec());
    });
    out
}

/// Isomorphism label of a traversal bitmap, decoded by hand.
pub fn label_of_bitmap(bits: u64, k: usize) -> u64 {
    let mut adj = vec![vec![false; k]; k];
    adj[0][1] = true;
    adj[1][0] = true;
    let mut pos = 0;
    for i in 2..k {
        for j in 0..i {
            if bits >> pos & 1 == 1 {
                adj[i][j] = true;
                adj[j][i] = true;
            }
            pos += 1;
        }
    }
    matrix_canon(&adj)
}

/// Engine pattern counts keyed by isomorphism label, zeros dropped.
pub fn labeled(dict: &warpmine::CanonicalDictionary, counts: &[u64]) -> BTreeMap<u64, u64> {
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(id, &c)| (label_of_bitmap(dict.canonical_bitmaps()[id], dict.k()), c))
        .collect()
}

pub fn bitmap(bits: u64, k: usize) -> EdgeBitmap {
    EdgeBitmap::new(bits, k).unwrap()
}
