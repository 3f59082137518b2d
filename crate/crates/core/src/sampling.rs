//! Seeded random graphs and data for property suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{EdgeSpec, FiniteGraph, GridFunction, NodeSpec, Window};

pub type SuiteRng = ChaCha8Rng;

/// Deterministic generator for one suite instance.
pub fn instance_rng(seed: u64, index: u64) -> SuiteRng {
    // splitmix64 of the pair, so neighbouring indices get unrelated streams
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

#[derive(Clone, Debug)]
pub struct GraphSampler {
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Probability of each non-tree edge.
    pub extra_edge_prob: f64,
    pub weight: (f64, f64),
    pub measure: (f64, f64),
    /// Probability that a node carries a killing term.
    pub killing_prob: f64,
    pub killing: (f64, f64),
}

impl GraphSampler {
    pub fn up_to(max_nodes: usize) -> Self {
        GraphSampler {
            min_nodes: 2.min(max_nodes),
            max_nodes,
            extra_edge_prob: 0.3,
            weight: (0.1, 2.0),
            measure: (0.5, 2.0),
            killing_prob: 0.3,
            killing: (0.0, 1.0),
        }
    }

    /// A connected random graph: a random spanning tree plus extra edges.
    pub fn sample(&self, rng: &mut SuiteRng) -> FiniteGraph {
        let n = rng.random_range(self.min_nodes.max(1)..=self.max_nodes.max(1));
        let nodes = (0..n as i64)
            .map(|i| NodeSpec {
                id: i.into(),
                mu: rng.random_range(self.measure.0..=self.measure.1),
                kappa: if rng.random_bool(self.killing_prob) { rng.random_range(self.killing.0..=self.killing.1) } else { 0.0 },
            })
            .collect();
        let mut edges = Vec::new();
        for j in 1..n {
            let i = rng.random_range(0..j);
            edges.push((i, j));
        }
        for j in 0..n {
            for i in 0..j {
                if !edges.contains(&(i, j)) && rng.random_bool(self.extra_edge_prob) {
                    edges.push((i, j));
                }
            }
        }
        let edges = edges
            .into_iter()
            .map(|(i, j)| EdgeSpec {
                u: (i as i64).into(),
                v: (j as i64).into(),
                w: rng.random_range(self.weight.0..=self.weight.1),
            })
            .collect();
        FiniteGraph::new(nodes, edges).expect("sampled graph is valid")
    }
}

/// Independent uniform values in `[lo, hi]` on a window.
pub fn uniform_function(rng: &mut SuiteRng, window: &Arc<Window>, lo: f64, hi: f64) -> GridFunction {
    let values = (0..window.len()).map(|_| rng.random_range(lo..=hi)).collect();
    GridFunction::new(window.clone(), values).expect("finite samples")
}

/// `u + δ` with `δ ≥ 0` uniform in `[0, spread]`, sparse with probability `density`.
pub fn raised(rng: &mut SuiteRng, u: &GridFunction, spread: f64, density: f64) -> GridFunction {
    let values = u
        .values()
        .iter()
        .map(|&v| if rng.random_bool(density) { v + rng.random_range(0.0..=spread) } else { v })
        .collect();
    GridFunction::new(u.window().clone(), values).expect("finite samples")
}
