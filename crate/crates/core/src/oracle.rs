//! Brute-force ground truth, computed on `G^Q` directly.
//!
//! These are deliberately the simplest correct algorithms: a subset DP for
//! matching, shortest augmenting paths for flow, Kruskal and Dijkstra.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest vertex count accepted by [`matching_size`].
pub const MATCHING_ORACLE_LIMIT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleResult {
    pub value: u64,
    pub method: &'static str,
}

/// Maximum matching size by dynamic programming over vertex subsets.
///
/// Direction and weights are ignored.
pub fn matching_size(g: &Graph) -> Result<usize> {
    let n = g.n();
    if n > MATCHING_ORACLE_LIMIT {
        return Err(Error::SizeLimit { what: "matching oracle vertex count", got: n, limit: MATCHING_ORACLE_LIMIT });
    }
    let mut adj = vec![0u32; n];
    for e in g.edges() {
        if e.u != e.v {
            adj[e.u] |= 1 << e.v;
            adj[e.v] |= 1 << e.u;
        }
    }
    let mut best = vec![0u8; 1 << n];
    for mask in 1usize..(1 << n) {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << v);
        let mut b = best[rest];
        let mut nb = adj[v] as usize & rest;
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            b = b.max(1 + best[rest & !(1 << u)]);
        }
        best[mask] = b;
    }
    Ok(best[(1 << n) - 1] as usize)
}

pub fn oracle_matching(g: &Graph) -> Result<OracleResult> {
    Ok(OracleResult { value: matching_size(g)? as u64, method: "subset-dp matching" })
}

struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        Self { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    fn arc(&mut self, u: usize, v: usize, c: u64) {
        self.head[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(c);
        self.head[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0);
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let n = self.head.len();
        let mut total = 0;
        loop {
            let mut via = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.head[u] {
                    let v = self.to[a];
                    if self.cap[a] > 0 && !seen[v] {
                        seen[v] = true;
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = u64::MAX;
            let mut v = t;
            while v != s {
                let a = via[v];
                push = push.min(self.cap[a]);
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = via[v];
                self.cap[a] -= push;
                self.cap[a ^ 1] += push;
                v = self.to[a ^ 1];
            }
            total += push;
        }
    }
}

/// Maximum flow from vertex set `sources` to vertex set `sinks`, using edge
/// weights as capacities. Undirected edges carry flow either way.
pub fn max_flow(g: &Graph, sources: &[usize], sinks: &[usize]) -> u64 {
    let n = g.n();
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    let unbounded: u64 = g.edges().iter().map(|e| e.weight).sum::<u64>() + 1;
    for e in g.edges() {
        if e.u == e.v || e.weight == 0 {
            continue;
        }
        net.arc(e.u, e.v, e.weight);
        if !g.is_directed() {
            net.arc(e.v, e.u, e.weight);
        }
    }
    for &a in sources {
        net.arc(s, a, unbounded);
    }
    for &b in sinks {
        net.arc(b, t, unbounded);
    }
    net.max_flow(s, t)
}

/// Max flow between terminal-index sets.
pub fn oracle_maxflow(g: &Graph, a: &[usize], b: &[usize]) -> OracleResult {
    let av: Vec<usize> = a.iter().map(|&i| g.terminals()[i]).collect();
    let bv: Vec<usize> = b.iter().map(|&i| g.terminals()[i]).collect();
    OracleResult { value: max_flow(g, &av, &bv), method: "edmonds-karp max-flow" }
}

/// Number of edge-disjoint `s`-`t` paths (every edge counts as capacity 1).
pub fn edge_connectivity(g: &Graph, s: usize, t: usize) -> u64 {
    let mut unit = g.without_edges();
    for e in g.edges() {
        unit.add_edge(e.u, e.v, 1).expect("in range");
    }
    max_flow(&unit, &[s], &[t])
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Minimum spanning forest weight and component count, ties broken by edge id.
pub fn mst(g: &Graph) -> (u64, usize) {
    let mut order: Vec<_> = g.edges().iter().collect();
    order.sort_by_key(|e| (e.weight, e.id));
    let mut dsu = Dsu::new(g.n());
    let mut weight = 0;
    let mut components = g.n();
    for e in order {
        if dsu.union(e.u, e.v) {
            weight += e.weight;
            components -= 1;
        }
    }
    (weight, components)
}

pub fn oracle_mst(g: &Graph) -> OracleResult {
    OracleResult { value: mst(g).0, method: "kruskal" }
}

/// Dijkstra distance from `s` to `t`; `None` when unreachable.
pub fn shortest_path(g: &Graph, s: usize, t: usize) -> Option<u64> {
    let mut adj = vec![Vec::new(); g.n()];
    for e in g.edges() {
        adj[e.u].push((e.v, e.weight));
        if !g.is_directed() {
            adj[e.v].push((e.u, e.weight));
        }
    }
    let mut dist = vec![u64::MAX; g.n()];
    dist[s] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == t {
            return Some(d);
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    None
}

pub fn oracle_shortest_path(g: &Graph, s: usize, t: usize) -> OracleResult {
    OracleResult { value: shortest_path(g, s, t).unwrap_or(u64::MAX), method: "dijkstra" }
}
