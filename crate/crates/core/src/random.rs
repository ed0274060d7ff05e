//! Seeded random instances for tests and the `verify` command.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Query};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSpec {
    pub n: usize,
    pub k: usize,
    pub directed: bool,
    /// Probability of each (ordered, if directed) vertex pair getting an edge.
    pub edge_prob: f64,
    /// Weights are drawn from `weights.0..=weights.1`.
    pub weights: (u64, u64),
}

impl GraphSpec {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, k: k.min(n), directed: false, edge_prob: 0.3, weights: (1, 1) }
    }

    pub fn directed(mut self, directed: bool) -> Self {
        self.directed = directed;
        self
    }

    pub fn edge_prob(mut self, p: f64) -> Self {
        self.edge_prob = p;
        self
    }

    pub fn weights(mut self, lo: u64, hi: u64) -> Self {
        self.weights = (lo, hi);
        self
    }

    /// Terminals are a random ordered subset of the vertices.
    pub fn generate(&self, rng: &mut impl Rng) -> Graph {
        let mut g = Graph::new(self.n, self.directed);
        let terminals = sample(rng, self.n, self.k).into_vec();
        g.set_terminals(terminals).expect("distinct in-range terminals");
        for u in 0..self.n {
            let from = if self.directed { 0 } else { u + 1 };
            for v in from..self.n {
                if u != v && rng.gen_bool(self.edge_prob) {
                    let w = rng.gen_range(self.weights.0..=self.weights.1);
                    g.add_edge(u, v, w).expect("in range");
                }
            }
        }
        g
    }

    pub fn generate_seeded(&self, seed: u64) -> Graph {
        self.generate(&mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Unit-weight undirected graph with `k` random terminals.
pub fn random_undirected(n: usize, k: usize, edge_prob: f64, seed: u64) -> Graph {
    GraphSpec::new(n, k).edge_prob(edge_prob).generate_seeded(seed)
}

/// Every subset of unordered terminal pairs, in bitmask order.
pub fn all_undirected_queries(k: usize) -> Vec<Query> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    subsets(&pairs)
}

/// Every subset of ordered terminal pairs, in bitmask order.
pub fn all_directed_queries(k: usize) -> Vec<Query> {
    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    subsets(&pairs)
}

fn subsets(pairs: &[(usize, usize)]) -> Vec<Query> {
    assert!(pairs.len() < 24, "too many pairs to enumerate");
    (0u32..1 << pairs.len())
        .map(|mask| Query::from_pairs(pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p)))
        .collect()
}

/// A random set of `count` distinct terminal pairs with weights in `weights`.
pub fn random_query(k: usize, directed: bool, count: usize, weights: (u64, u64), rng: &mut impl Rng) -> Query {
    let mut pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .filter(|&(i, j)| if directed { i != j } else { i < j })
        .collect();
    let mut q = Query::empty();
    for _ in 0..count.min(pairs.len()) {
        let (a, b) = pairs.swap_remove(rng.gen_range(0..pairs.len()));
        q.push(a, b, rng.gen_range(weights.0..=weights.1));
    }
    q
}
