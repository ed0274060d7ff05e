//! Minimum spanning forest sketch.
//!
//! Compute the MSF `H` once, prune non-terminal leaves, and replace each
//! path whose interior is non-terminal degree-2 vertices by one edge keyed
//! with the path's maximum. A query edge can only ever displace that
//! maximum, so the contracted forest `H'` plus the dropped weight `w*`
//! answers every query.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Graph, Query};

/// Edge order: weight first, ties broken by the edge's ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightKey {
    pub weight: u64,
    pub ordinal: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeyedEdge {
    pub u: usize,
    pub v: usize,
    pub key: WeightKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MstSketch {
    pub(crate) k: usize,
    /// Vertices of `H'`; terminals are `0..k` in terminal order.
    pub(crate) n: usize,
    pub(crate) edges: Vec<KeyedEdge>,
    pub(crate) w_star: u64,
    /// Ordinal handed to the first query edge.
    pub(crate) next_ordinal: u64,
    /// Components of `G` without any terminal; they vanish from `H'`.
    pub(crate) hidden_components: usize,
}

/// What compression saw, for tests that follow `H` and `H'` side by side.
#[derive(Debug, Clone)]
pub struct MstTrace {
    /// The spanning forest `H`, in original vertex ids.
    pub forest: Vec<KeyedEdge>,
    /// Original vertex of each `H'` vertex.
    pub origin: Vec<usize>,
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

/// Kruskal over keyed edges; returns the forest edges and component count.
pub fn kruskal(n: usize, edges: &[KeyedEdge]) -> (Vec<KeyedEdge>, usize) {
    let mut order = edges.to_vec();
    order.sort_by_key(|e| e.key);
    let mut dsu = Dsu::new(n);
    let mut components = n;
    let mut forest = Vec::new();
    for e in order {
        if dsu.union(e.u, e.v) {
            components -= 1;
            forest.push(e);
        }
    }
    (forest, components)
}

fn keyed_edges(g: &Graph) -> Vec<KeyedEdge> {
    g.edges()
        .iter()
        .map(|e| KeyedEdge { u: e.u, v: e.v, key: WeightKey { weight: e.weight, ordinal: e.id as u64 } })
        .collect()
}

pub fn compress_mst(g: &Graph) -> Result<MstSketch> {
    compress_mst_traced(g).map(|(s, _)| s)
}

pub fn compress_mst_traced(g: &Graph) -> Result<(MstSketch, MstTrace)> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("the MST sketch needs an undirected graph".into()));
    }
    g.validate()?;
    if g.k() == 0 {
        return Err(Error::InvalidGraph("the MST sketch needs at least one terminal".into()));
    }
    let (forest, components) = kruskal(g.n(), &keyed_edges(g));
    let terminal = g.is_terminal_mask();

    // adjacency as edge slots; None marks a removed edge
    let mut slots: Vec<Option<KeyedEdge>> = forest.iter().copied().map(Some).collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (i, e) in forest.iter().enumerate() {
        incident[e.u].push(i);
        incident[e.v].push(i);
    }
    let mut alive = vec![true; g.n()];
    let live = |incident: &Vec<Vec<usize>>, slots: &Vec<Option<KeyedEdge>>, v: usize| -> Vec<usize> {
        incident[v].iter().copied().filter(|&i| slots[i].is_some()).collect()
    };

    // non-terminal leaves (and isolated non-terminals) go, repeatedly
    let mut queue: VecDeque<usize> = (0..g.n()).filter(|&v| !terminal[v]).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        let edges = live(&incident, &slots, v);
        if edges.len() > 1 {
            continue;
        }
        alive[v] = false;
        if let Some(&i) = edges.first() {
            let e = slots[i].take().expect("live");
            let other = if e.u == v { e.v } else { e.u };
            if !terminal[other] {
                queue.push_back(other);
            }
        }
    }

    // splice out non-terminal degree-2 vertices, keeping the heavier key
    for v in 0..g.n() {
        if terminal[v] || !alive[v] {
            continue;
        }
        let edges = live(&incident, &slots, v);
        if edges.len() != 2 {
            continue;
        }
        let a = slots[edges[0]].take().expect("live");
        let b = slots[edges[1]].take().expect("live");
        let x = if a.u == v { a.v } else { a.u };
        let y = if b.u == v { b.v } else { b.u };
        alive[v] = false;
        let merged = KeyedEdge { u: x, v: y, key: a.key.max(b.key) };
        let slot = slots.len();
        slots.push(Some(merged));
        incident.push(Vec::new());
        incident[x].push(slot);
        incident[y].push(slot);
    }

    // relabel: terminals first, then surviving branch vertices
    let mut origin: Vec<usize> = g.terminals().to_vec();
    origin.extend((0..g.n()).filter(|&v| alive[v] && !terminal[v]));
    let mut label = vec![usize::MAX; g.n()];
    for (i, &v) in origin.iter().enumerate() {
        label[v] = i;
    }
    let mut edges: Vec<KeyedEdge> = slots
        .into_iter()
        .flatten()
        .map(|e| {
            let (a, b) = (label[e.u], label[e.v]);
            KeyedEdge { u: a.min(b), v: a.max(b), key: e.key }
        })
        .collect();
    edges.sort_by_key(|e| e.key);

    let total: u64 = forest.iter().map(|e| e.key.weight).sum();
    let kept: u64 = edges.iter().map(|e| e.key.weight).sum();
    let terminal_components = {
        let (_, c) = kruskal(origin.len(), &edges);
        c
    };
    let sketch = MstSketch {
        k: g.k(),
        n: origin.len(),
        edges,
        w_star: total - kept,
        next_ordinal: g.m() as u64,
        hidden_components: components - terminal_components,
    };
    Ok((sketch, MstTrace { forest, origin }))
}

impl MstSketch {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Vertex count of the contracted forest.
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[KeyedEdge] {
        &self.edges
    }

    pub fn w_star(&self) -> u64 {
        self.w_star
    }

    pub fn next_ordinal(&self) -> u64 {
        self.next_ordinal
    }

    /// Query edges keyed with ordinals after every static edge.
    pub fn query_edges(&self, q: &Query) -> Result<Vec<KeyedEdge>> {
        q.validate(self.k, false)?;
        Ok(q.edges()
            .iter()
            .enumerate()
            .map(|(i, e)| KeyedEdge {
                u: e.a,
                v: e.b,
                key: WeightKey { weight: e.weight, ordinal: self.next_ordinal + i as u64 },
            })
            .collect())
    }

    /// Minimum spanning forest weight and component count with `q` inserted.
    pub fn extract_detailed(&self, q: &Query) -> Result<(u64, usize)> {
        let mut all = self.edges.clone();
        all.extend(self.query_edges(q)?);
        let (forest, components) = kruskal(self.n, &all);
        let weight: u64 = forest.iter().map(|e| e.key.weight).sum();
        Ok((weight + self.w_star, components + self.hidden_components))
    }

    pub fn extract(&self, q: &Query) -> Result<u64> {
        self.extract_detailed(q).map(|(w, _)| w)
    }

    /// `H'` as a plain graph with terminals `0..k`.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::undirected(self.n).with_terminals(0..self.k).expect("terminals in range");
        for e in &self.edges {
            g.add_edge(e.u, e.v, e.key.weight).expect("in range");
        }
        g
    }
}

/// Inserts `extra` one edge at a time into the forest `forest`; whenever an
/// insertion closes a cycle, the heaviest edge on that cycle goes.
pub fn mst_algorithm(n: usize, forest: &[KeyedEdge], extra: &[KeyedEdge]) -> Vec<KeyedEdge> {
    let mut edges: Vec<KeyedEdge> = forest.to_vec();
    for &e in extra {
        match forest_path(n, &edges, e.u, e.v) {
            None => edges.push(e),
            Some(path) => {
                let heaviest = path.iter().copied().max_by_key(|&i| edges[i].key).expect("nonempty path");
                if edges[heaviest].key > e.key {
                    edges[heaviest] = e;
                }
            }
        }
    }
    edges
}

/// Edge indices on the forest path from `a` to `b`, if connected. An empty
/// path means `a == b`.
pub fn forest_path(n: usize, edges: &[KeyedEdge], a: usize, b: usize) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for (i, e) in edges.iter().enumerate() {
        adj[e.u].push((e.v, i));
        adj[e.v].push((e.u, i));
    }
    let mut via = vec![None; n];
    let mut seen = vec![false; n];
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for &(y, i) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((x, i));
                queue.push_back(y);
            }
        }
    }
    if !seen[b] {
        return None;
    }
    let mut path = Vec::new();
    let mut x = b;
    while let Some((prev, i)) = via[x] {
        path.push(i);
        x = prev;
    }
    Some(path)
}
