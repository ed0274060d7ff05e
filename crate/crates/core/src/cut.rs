//! Terminal min-cut sketch through a bipartite matching instance.
//!
//! Every unit edge `e` of the (expanded, directed) graph becomes a matched
//! pair `e- -- e+`; consecutive edges `e1` into `x`, `e2` out of `x` give an
//! edge `e1+ -- e2-`. Each terminal-edge incidence adds a port vertex. A
//! terminal cut `(A, B)` plugs the ports of `A`'s outgoing and `B`'s incoming
//! edges, and augmenting paths of the perfect-ish matching `{e- e+}` are then
//! exactly edge-disjoint `A`-`B` paths.

use crate::error::{Error, Result};
use crate::graph::{expand_capacities, Graph, Query, TerminalCut, DEFAULT_EXPANSION_LIMIT};
use crate::matching::{self, MatchingSketch};
use crate::zp::FieldSpec;

/// Port of one terminal-edge incidence, as indices into the gadget's
/// terminal list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Port {
    /// Original terminal index.
    pub terminal: usize,
    /// The port vertex `q->e` or `q<-e`.
    pub port: usize,
    /// The edge vertex it plugs into: `e-` for outgoing, `e+` for incoming.
    pub edge_end: usize,
}

/// Where each terminal incidence sits in the gadget's terminal list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GadgetIndex {
    pub outgoing: Vec<Port>,
    pub incoming: Vec<Port>,
}

impl GadgetIndex {
    /// The gadget query for the cut `(A, B)`.
    pub fn query(&self, cut: &TerminalCut) -> Query {
        let mut q = Query::empty();
        for p in self.outgoing.iter().filter(|p| cut.a().contains(&p.terminal)) {
            q.push(p.port, p.edge_end, 1);
        }
        for p in self.incoming.iter().filter(|p| cut.b().contains(&p.terminal)) {
            q.push(p.port, p.edge_end, 1);
        }
        q
    }

    pub fn terminal_count(&self) -> usize {
        2 * (self.outgoing.len() + self.incoming.len())
    }
}

/// Directed unit-edge graph the gadget is built from: undirected edges turn
/// into antiparallel pairs, self-loops go, capacities become parallel edges.
pub fn prepare(g: &Graph, expansion_limit: u64) -> Result<Graph> {
    let directed = if g.is_directed() { g.clone() } else { g.to_directed() };
    expand_capacities(&directed.without_self_loops(), expansion_limit)
}

/// Builds the bipartite gadget of a directed unit-edge graph.
///
/// Edge `i` owns gadget vertices `2i` (`e-`) and `2i + 1` (`e+`); port
/// vertices follow. Terminals are listed per edge in order: `q->e, e-` when
/// the tail is a terminal, then `q<-e, e+` when the head is.
pub fn build_bipartite_gadget(g: &Graph) -> Result<(Graph, GadgetIndex)> {
    if !g.is_directed() {
        return Err(Error::InvalidGraph("the cut gadget needs a directed graph".into()));
    }
    let m = g.m();
    let mut gadget = Graph::undirected(2 * m);
    let mut terminals = Vec::new();
    let mut index = GadgetIndex::default();
    for (i, e) in g.edges().iter().enumerate() {
        if e.u == e.v || e.weight != 1 {
            return Err(Error::InvalidGraph("the cut gadget needs unit edges without self-loops".into()));
        }
        if let Some(q) = g.terminal_index(e.u) {
            let port = gadget.add_vertex();
            index.outgoing.push(Port { terminal: q, port: terminals.len(), edge_end: terminals.len() + 1 });
            terminals.extend([port, 2 * i]);
        }
        if let Some(q) = g.terminal_index(e.v) {
            let port = gadget.add_vertex();
            index.incoming.push(Port { terminal: q, port: terminals.len(), edge_end: terminals.len() + 1 });
            terminals.extend([port, 2 * i + 1]);
        }
    }
    if terminals.is_empty() {
        return Err(Error::EmptyTerminals);
    }
    for i in 0..m {
        gadget.add_edge(2 * i, 2 * i + 1, 1)?;
    }
    let mut into = vec![Vec::new(); g.n()];
    let mut out_of = vec![Vec::new(); g.n()];
    for (i, e) in g.edges().iter().enumerate() {
        into[e.v].push(i);
        out_of[e.u].push(i);
    }
    for x in 0..g.n() {
        for &e1 in &into[x] {
            for &e2 in &out_of[x] {
                gadget.add_edge(2 * e1 + 1, 2 * e2, 1)?;
            }
        }
    }
    gadget.set_terminals(terminals)?;
    Ok((gadget, index))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutOptions {
    pub delta: f64,
    pub seed: u64,
    /// Use `delta` per query instead of splitting it over all `3^k` cuts.
    pub per_query_delta: bool,
    pub expansion_limit: u64,
}

impl CutOptions {
    pub fn new(delta: f64, seed: u64) -> Self {
        Self { delta, seed, per_query_delta: false, expansion_limit: DEFAULT_EXPANSION_LIMIT }
    }

    /// Failure budget handed to the matching sketch.
    pub fn effective_delta(&self, k: usize) -> f64 {
        if self.per_query_delta {
            self.delta
        } else {
            self.delta / 3f64.powi(k as i32)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutSketch {
    pub(crate) k: usize,
    pub(crate) m: usize,
    pub(crate) inner: MatchingSketch,
    pub(crate) index: GadgetIndex,
}

pub fn compress_cut(g: &Graph, delta: f64, seed: u64) -> Result<CutSketch> {
    compress_cut_with(g, &CutOptions::new(delta, seed))
}

pub fn compress_cut_with(g: &Graph, opts: &CutOptions) -> Result<CutSketch> {
    g.validate()?;
    if g.k() < 2 {
        return Err(Error::InvalidGraph("a cut sketch needs at least two terminals".into()));
    }
    let unit = prepare(g, opts.expansion_limit)?;
    let (gadget, index) = build_bipartite_gadget(&unit)?;
    let field = FieldSpec::for_instance(gadget.n().max(1), opts.effective_delta(g.k()), opts.seed)?;
    let inner = matching::compress_with_field(&gadget, field)?;
    Ok(CutSketch { k: g.k(), m: unit.m(), inner, index })
}

impl CutSketch {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Unit edges in the expanded graph.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn inner(&self) -> &MatchingSketch {
        &self.inner
    }

    pub fn index(&self) -> &GadgetIndex {
        &self.index
    }

    /// Minimum `A`-`B` cut value.
    pub fn query_cut(&self, cut: &TerminalCut) -> Result<u64> {
        cut.validate(self.k)?;
        let nu = self.inner.extract(&self.index.query(cut))?;
        // a wrong (too small) rank can push the matching below m
        Ok(nu.saturating_sub(self.m) as u64)
    }

    /// Cut value of the bipartition `(A, T \ A)`.
    pub fn query_bipartition_min(&self, a: &[usize]) -> Result<u64> {
        let b: Vec<usize> = (0..self.k).filter(|x| !a.contains(x)).collect();
        self.query_cut(&TerminalCut::new(a.iter().copied(), b)?)
    }

    /// `(A, B)` answered as the cheapest bipartition that separates them.
    pub fn query_separating_min(&self, cut: &TerminalCut) -> Result<u64> {
        cut.validate(self.k)?;
        let free: Vec<usize> = (0..self.k).filter(|x| !cut.a().contains(x) && !cut.b().contains(x)).collect();
        let mut best = u64::MAX;
        for mask in 0u64..1 << free.len() {
            let mut side: Vec<usize> = cut.a().to_vec();
            side.extend(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v));
            best = best.min(self.query_bipartition_min(&side)?);
        }
        Ok(best)
    }

    pub fn size_words(&self) -> usize {
        crate::container::cut_size_words(self)
    }
}

/// Every disjoint pair of nonempty terminal sets over `k` terminals.
pub fn all_terminal_cuts(k: usize) -> Vec<TerminalCut> {
    let mut cuts = Vec::new();
    // each terminal is in A, B or neither
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut c = code;
        for q in 0..k {
            match c % 3 {
                1 => a.push(q),
                2 => b.push(q),
                _ => {}
            }
            c /= 3;
        }
        if let Ok(cut) = TerminalCut::new(a, b) {
            cuts.push(cut);
        }
    }
    cuts
}

/// A graph with a fresh source and sink whose terminal edges are chosen per
/// query: the source feeds `A` and `B` drains into the sink, each edge
/// carrying the terminal's full out- (resp. in-) capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StCounterpart {
    graph: Graph,
    out_capacity: Vec<u64>,
    in_capacity: Vec<u64>,
}

/// The directed graph `G` plus isolated terminals `s` (index `k`) and `t`
/// (index `k + 1`); source and sink edges are query edges.
pub fn st_counterpart(g: &Graph) -> Result<StCounterpart> {
    let directed = if g.is_directed() { g.clone() } else { g.to_directed() };
    let k = directed.k();
    let mut out_capacity = vec![0; k];
    let mut in_capacity = vec![0; k];
    for e in directed.edges() {
        if e.u == e.v {
            continue;
        }
        if let Some(q) = directed.terminal_index(e.u) {
            out_capacity[q] += e.weight;
        }
        if let Some(q) = directed.terminal_index(e.v) {
            in_capacity[q] += e.weight;
        }
    }
    let mut graph = directed;
    let s = graph.add_vertex();
    let t = graph.add_vertex();
    let mut terminals = graph.terminals().to_vec();
    terminals.extend([s, t]);
    graph.set_terminals(terminals)?;
    graph.set_source_sink(s, t)?;
    Ok(StCounterpart { graph, out_capacity, in_capacity })
}

impl StCounterpart {
    /// Counterpart without any source/sink edges.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Total capacity of the outgoing edges of terminal `q`.
    pub fn out_capacity(&self, q: usize) -> u64 {
        self.out_capacity[q]
    }

    pub fn in_capacity(&self, q: usize) -> u64 {
        self.in_capacity[q]
    }

    /// Weighted query linking the source to `A` and `B` to the sink.
    pub fn query(&self, cut: &TerminalCut) -> Result<Query> {
        let k = self.out_capacity.len();
        cut.validate(k)?;
        let (s, t) = (k, k + 1);
        let mut q = Query::empty();
        for &a in cut.a() {
            q.push(s, a, self.out_capacity[a]);
        }
        for &b in cut.b() {
            q.push(b, t, self.in_capacity[b]);
        }
        Ok(q)
    }

    /// Counterpart with every source and sink edge present.
    pub fn full(&self) -> Graph {
        let k = self.out_capacity.len();
        let mut g = self.graph.clone();
        let (s, t) = (g.terminals()[k], g.terminals()[k + 1]);
        for q in 0..k {
            let v = g.terminals()[q];
            g.add_edge(s, v, self.out_capacity[q]).expect("in range");
            g.add_edge(v, t, self.in_capacity[q]).expect("in range");
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{apply_query, terminal_capacity};
    use crate::oracle::{matching_size, max_flow, oracle_maxflow};
    use crate::random::GraphSpec;

    fn digraph(n: usize, terminals: &[usize], edges: &[(usize, usize, u64)]) -> Graph {
        let mut g = Graph::directed(n).with_terminals(terminals.iter().copied()).unwrap();
        for &(u, v, w) in edges {
            g.add_edge(u, v, w).unwrap();
        }
        g
    }

    #[test]
    fn single_terminal_edge_gadget() {
        let g = digraph(2, &[0, 1], &[(0, 1, 1)]);
        let (gp, index) = build_bipartite_gadget(&g).unwrap();
        assert_eq!(gp.n(), 4);
        assert_eq!(gp.m(), 1);
        assert_eq!(gp.k(), 4);
        assert_eq!(index.outgoing.len(), 1);
        assert_eq!(index.incoming.len(), 1);
    }

    #[test]
    fn relay_path_gadget() {
        let g = digraph(3, &[0, 2], &[(0, 1, 1), (1, 2, 1)]);
        let (gp, _) = build_bipartite_gadget(&g).unwrap();
        assert_eq!(gp.n(), 2 * 2 + 2);
        let mut edges: Vec<(usize, usize)> = gp.edges().iter().map(|e| (e.u, e.v)).collect();
        edges.sort();
        // e1 = (0, 1), e2 = (2, 3); e1+ meets e2-
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn no_terminal_edges_is_rejected() {
        let g = digraph(4, &[0, 1], &[(2, 3, 1)]);
        assert_eq!(build_bipartite_gadget(&g).unwrap_err(), Error::EmptyTerminals);
        assert_eq!(compress_cut(&g, 0.1, 0).unwrap_err(), Error::EmptyTerminals);
        assert_eq!(compress_cut(&digraph(3, &[0, 1], &[]), 0.1, 0).unwrap_err(), Error::EmptyTerminals);
    }

    #[test]
    fn single_capacitated_edge() {
        let g = digraph(2, &[0, 1], &[(0, 1, 3)]);
        let s = compress_cut(&g, 0.01, 1).unwrap();
        assert_eq!(s.query_cut(&TerminalCut::new([0], [1]).unwrap()).unwrap(), 3);
        assert_eq!(s.query_cut(&TerminalCut::new([1], [0]).unwrap()).unwrap(), 0);
    }

    #[test]
    fn overlapping_cut_is_rejected() {
        let g = digraph(2, &[0, 1], &[(0, 1, 1)]);
        let s = compress_cut(&g, 0.01, 1).unwrap();
        assert!(TerminalCut::new([0], [0]).is_err());
        assert!(s.query_cut(&TerminalCut::new([0], [5]).unwrap()).is_err());
    }

    /// Matching on the plugged gadget, minus `m`, is the edge connectivity.
    #[test]
    fn gadget_matching_equals_flow() {
        for seed in 0..60 {
            let g = GraphSpec::new(5, 3).directed(true).edge_prob(0.25).generate_seeded(seed);
            let Ok((gp, index)) = build_bipartite_gadget(&g) else { continue };
            if gp.n() > crate::oracle::MATCHING_ORACLE_LIMIT {
                continue;
            }
            for cut in all_terminal_cuts(3) {
                let plugged = apply_query(&gp, &index.query(&cut)).unwrap();
                let nu = matching_size(&plugged).unwrap();
                assert_eq!((nu - g.m()) as u64, oracle_maxflow(&g, cut.a(), cut.b()).value);
            }
        }
    }

    #[test]
    fn gadget_sizes() {
        for seed in 0..40 {
            let g = GraphSpec::new(7, 3).directed(true).edge_prob(0.3).generate_seeded(seed);
            let Ok((gp, index)) = build_bipartite_gadget(&g) else { continue };
            let incidences: usize = g
                .edges()
                .iter()
                .map(|e| g.terminal_index(e.u).is_some() as usize + g.terminal_index(e.v).is_some() as usize)
                .sum();
            assert_eq!(gp.k(), 2 * incidences);
            assert_eq!(index.terminal_count(), gp.k());
            assert_eq!(gp.n(), 2 * g.m() + incidences);
            // without terminal-terminal edges every incidence is a distinct edge
            if g.edges().iter().all(|e| g.terminal_index(e.u).is_none() || g.terminal_index(e.v).is_none()) {
                assert_eq!(gp.k() as u64, 2 * terminal_capacity(&g));
            }
        }
    }

    #[test]
    fn sketch_matches_flow_on_random_digraphs() {
        let mut wrong = 0;
        for seed in 0..25 {
            let g = GraphSpec::new(6, 3).directed(true).edge_prob(0.3).weights(1, 2).generate_seeded(seed);
            let Ok(s) = compress_cut(&g, 0.01, seed) else { continue };
            for cut in all_terminal_cuts(3) {
                if s.query_cut(&cut).unwrap() != oracle_maxflow(&g, cut.a(), cut.b()).value {
                    wrong += 1;
                }
            }
        }
        assert_eq!(wrong, 0);
    }

    #[test]
    fn undirected_input_uses_both_directions() {
        let mut g = Graph::undirected(3).with_terminals([0, 2]).unwrap();
        g.add_edge(0, 1, 2).unwrap();
        g.add_edge(1, 2, 1).unwrap();
        let s = compress_cut(&g, 0.01, 4).unwrap();
        assert_eq!(s.query_cut(&TerminalCut::new([0], [1]).unwrap()).unwrap(), 1);
        assert_eq!(s.query_cut(&TerminalCut::new([1], [0]).unwrap()).unwrap(), 1);
    }

    #[test]
    fn bipartition_and_separating_min() {
        let g = GraphSpec::new(6, 3).directed(true).edge_prob(0.35).generate_seeded(11);
        let s = compress_cut(&g, 0.01, 2).unwrap();
        assert_eq!(
            s.query_bipartition_min(&[0]).unwrap(),
            s.query_cut(&TerminalCut::new([0], [1, 2]).unwrap()).unwrap()
        );
        for cut in all_terminal_cuts(3) {
            assert_eq!(s.query_separating_min(&cut).unwrap(), s.query_cut(&cut).unwrap());
        }
        let two = digraph(4, &[0, 1], &[(0, 2, 1), (3, 1, 1)]);
        let s2 = compress_cut(&two, 0.01, 0).unwrap();
        assert_eq!(s2.query_bipartition_min(&[0]).unwrap(), 0);
    }

    #[test]
    fn terminal_cut_enumeration() {
        // pairs of disjoint nonempty subsets: 3^k - 2 * 2^k + 1
        assert_eq!(all_terminal_cuts(2).len(), 2);
        assert_eq!(all_terminal_cuts(3).len(), 12);
    }

    #[test]
    fn counterpart_capacities() {
        let g = digraph(3, &[0, 1, 2], &[(0, 2, 1)]);
        let h = st_counterpart(&g).unwrap();
        assert_eq!(h.out_capacity(0), 1);
        assert_eq!(h.in_capacity(0), 0);
        assert_eq!(h.out_capacity(1), 0);
        assert_eq!(h.in_capacity(1), 0);
        assert_eq!(h.graph().k(), 5);
        assert_eq!(h.full().m(), 1 + 6);
    }

    #[test]
    fn counterpart_flow_equals_terminal_cut() {
        for seed in 0..40 {
            let g = GraphSpec::new(7, 3).directed(true).edge_prob(0.3).weights(0, 3).generate_seeded(seed);
            let h = st_counterpart(&g).unwrap();
            let (s, t) = (h.graph().source().unwrap(), h.graph().sink().unwrap());
            for cut in all_terminal_cuts(3) {
                let hq = apply_query(h.graph(), &h.query(&cut).unwrap()).unwrap();
                assert_eq!(max_flow(&hq, &[s], &[t]), oracle_maxflow(&g, cut.a(), cut.b()).value);
            }
        }
    }
}
