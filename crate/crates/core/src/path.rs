//! Shortest s-t distance sketch: the terminal distance table.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{Graph, Query};

/// Distance of an unreachable pair; sums saturate at it.
pub const INFINITY: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathSketch {
    /// Terminals accepted in queries.
    pub(crate) k: usize,
    pub(crate) directed: bool,
    /// Row-major table over the terminals plus `s`, `t` if they were not
    /// terminals already.
    pub(crate) size: usize,
    pub(crate) table: Vec<u64>,
    pub(crate) s: usize,
    pub(crate) t: usize,
}

fn dijkstra(adj: &[Vec<(usize, u64)>], from: usize) -> Vec<u64> {
    let mut dist = vec![INFINITY; adj.len()];
    dist[from] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, from))]);
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d.saturating_add(w);
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Builds the table for `s`, `t` (vertex ids); falls back to the graph's
/// designated pair when `None`.
pub fn compress_paths(g: &Graph, st: Option<(usize, usize)>) -> Result<PathSketch> {
    g.validate()?;
    let (s, t) = match st.or(g.source().zip(g.sink())) {
        Some(pair) => pair,
        None => return Err(Error::InvalidGraph("shortest-path sketch needs s and t".into())),
    };
    if s >= g.n() || t >= g.n() {
        return Err(Error::InvalidGraph(format!("s/t ({s}, {t}) out of range")));
    }
    let mut nodes = g.terminals().to_vec();
    for v in [s, t] {
        if !nodes.contains(&v) {
            nodes.push(v);
        }
    }
    let mut adj = vec![Vec::new(); g.n()];
    for e in g.edges() {
        adj[e.u].push((e.v, e.weight));
        if !g.is_directed() {
            adj[e.v].push((e.u, e.weight));
        }
    }
    let size = nodes.len();
    let mut table = Vec::with_capacity(size * size);
    for &from in &nodes {
        let dist = dijkstra(&adj, from);
        table.extend(nodes.iter().map(|&to| dist[to]));
    }
    let find = |v| nodes.iter().position(|&x| x == v).expect("added above");
    Ok(PathSketch { k: g.k(), directed: g.is_directed(), size, table, s: find(s), t: find(t) })
}

impl PathSketch {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Table distance between table indices `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> u64 {
        self.table[i * self.size + j]
    }

    pub fn table_size(&self) -> usize {
        self.size
    }

    /// Shortest s-t distance with `q` inserted; [`INFINITY`] if unreachable.
    pub fn extract(&self, q: &Query) -> Result<u64> {
        q.validate(self.k, self.directed)?;
        let n = self.size;
        let mut adj: Vec<Vec<(usize, u64)>> = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && self.distance(i, j) != INFINITY)
                    .map(|j| (j, self.distance(i, j)))
                    .collect()
            })
            .collect();
        for e in q.edges() {
            adj[e.a].push((e.b, e.weight));
            if !self.directed {
                adj[e.b].push((e.a, e.weight));
            }
        }
        Ok(dijkstra(&adj, self.s)[self.t])
    }
}
