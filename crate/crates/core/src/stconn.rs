//! s-t edge-connectivity sketch.
//!
//! The gadget is built over `G` with an edge between every ordered terminal
//! pair already inserted. Each such pair edge `e` gets two extra isolated
//! terminals `ê-`, `ê+`; a query either closes `e- -- e+` (edge present) or
//! parks both ends on the hats (edge absent), so absent edges can never
//! carry an augmenting path.

use crate::error::{Error, Result};
use crate::graph::{Graph, Query};
use crate::matching::{self, MatchingSketch};
use crate::zp::FieldSpec;

/// Result of [`normalize`]: a directed graph whose source has no incoming
/// and whose sink has no outgoing edges, neither of them a terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub graph: Graph,
    pub source: usize,
    pub sink: usize,
}

/// Drops edges into `s`, out of `t` and self-loops, and routes around a
/// terminal `s` (or `t`) through a fresh non-terminal `s'` (or `t'`).
///
/// `s'` reaches `s` over one two-hop path per unit of the out-degree `s`
/// can have once every query edge is present; symmetrically for `t'`.
pub fn normalize(g: &Graph) -> Result<Normalized> {
    let (Some(s), Some(t)) = (g.source(), g.sink()) else {
        return Err(Error::InvalidGraph("s-t connectivity needs designated s and t".into()));
    };
    let directed = if g.is_directed() { g.clone() } else { g.to_directed() };
    let mut out = directed.without_edges();
    for e in directed.edges() {
        if e.u != e.v && e.v != s && e.u != t {
            out.add_edge(e.u, e.v, 1)?;
        }
    }
    let k = out.k();
    let mut source = s;
    if out.is_terminal_mask()[s] {
        let degree = out.edges().iter().filter(|e| e.u == s).count() + k - 1;
        source = out.add_vertex();
        for _ in 0..degree {
            let mid = out.add_vertex();
            out.add_edge(source, mid, 1)?;
            out.add_edge(mid, s, 1)?;
        }
    }
    let mut sink = t;
    if out.is_terminal_mask()[t] {
        let degree = out.edges().iter().filter(|e| e.v == t).count() + k - 1;
        sink = out.add_vertex();
        for _ in 0..degree {
            let mid = out.add_vertex();
            out.add_edge(t, mid, 1)?;
            out.add_edge(mid, sink, 1)?;
        }
    }
    out.set_source_sink(source, sink)?;
    Ok(Normalized { graph: out, source, sink })
}

/// Position of the ordered pair `(i, j)`, `i != j`, in row-major order.
pub fn pair_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < k && j < k);
    i * (k - 1) + if j < i { j } else { j - 1 }
}

fn pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).flat_map(move |i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Plugs `e- -- e+` for pairs in `q` and `e- -- ê+`, `e+ -- ê-` for the rest.
pub fn gadget_query(k: usize, q: &Query) -> Result<Query> {
    q.validate(k, true)?;
    let mut present = vec![false; k * k.saturating_sub(1)];
    for e in q.edges() {
        present[pair_index(k, e.a, e.b)] = true;
    }
    let mut out = Query::empty();
    for (t, &on) in present.iter().enumerate() {
        if on {
            out.push(4 * t, 4 * t + 1, 1);
        } else {
            out.push(4 * t, 4 * t + 3, 1);
            out.push(4 * t + 1, 4 * t + 2, 1);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StconnSketch {
    pub(crate) k: usize,
    /// Static edges that are neither out of the source nor into the sink.
    pub(crate) m_base: usize,
    pub(crate) inner: MatchingSketch,
}

/// Gadget over the normalized graph. Terminal `4t..4t+4` holds
/// `e-, e+, ê-, ê+` of the `t`-th ordered pair.
pub fn build_gadget(n: &Normalized) -> Result<(Graph, usize)> {
    let g = &n.graph;
    let k = g.k();
    let terms = g.terminals();
    // (tail, head) of every edge of G with all pair edges inserted
    let mut all: Vec<(usize, usize)> = pairs(k).map(|(i, j)| (terms[i], terms[j])).collect();
    let pair_count = all.len();
    all.extend(g.edges().iter().map(|e| (e.u, e.v)));

    let mut gadget = Graph::undirected(4 * pair_count);
    let mut minus = vec![None; all.len()];
    let mut plus = vec![None; all.len()];
    for p in 0..pair_count {
        minus[p] = Some(4 * p);
        plus[p] = Some(4 * p + 1);
    }
    let mut m_base = 0;
    for (idx, &(u, v)) in all.iter().enumerate().skip(pair_count) {
        if v != n.sink || u == n.source {
            plus[idx] = Some(gadget.add_vertex());
        }
        if u != n.source || v == n.sink {
            minus[idx] = Some(gadget.add_vertex());
        }
        if let (Some(a), Some(b)) = (minus[idx], plus[idx]) {
            gadget.add_edge(a, b, 1)?;
            if !(u == n.source && v == n.sink) {
                m_base += 1;
            }
        }
    }
    let mut into = vec![Vec::new(); g.n()];
    let mut out_of = vec![Vec::new(); g.n()];
    for (idx, &(u, v)) in all.iter().enumerate() {
        into[v].push(idx);
        out_of[u].push(idx);
    }
    for x in 0..g.n() {
        for &e1 in &into[x] {
            for &e2 in &out_of[x] {
                if let (Some(a), Some(b)) = (plus[e1], minus[e2]) {
                    gadget.add_edge(a, b, 1)?;
                }
            }
        }
    }
    gadget.set_terminals((0..4 * pair_count).collect())?;
    Ok((gadget, m_base))
}

pub fn compress_stconn(g: &Graph, delta: f64, seed: u64) -> Result<StconnSketch> {
    g.validate()?;
    if g.k() == 0 {
        return Err(Error::InvalidGraph("s-t connectivity sketch needs at least one terminal".into()));
    }
    let normalized = normalize(g)?;
    let (gadget, m_base) = build_gadget(&normalized)?;
    let field = FieldSpec::for_instance(gadget.n().max(1), delta, seed)?;
    let inner = matching::compress_with_field(&gadget, field)?;
    Ok(StconnSketch { k: g.k(), m_base, inner })
}

impl StconnSketch {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m_base(&self) -> usize {
        self.m_base
    }

    pub fn inner(&self) -> &MatchingSketch {
        &self.inner
    }

    pub fn pair_count(&self) -> usize {
        self.k * (self.k - 1)
    }

    /// Gadget query for `q` (ordered terminal pairs).
    pub fn gadget_query(&self, q: &Query) -> Result<Query> {
        gadget_query(self.k, q)
    }

    /// Size of the matching every answer is measured against.
    pub fn baseline(&self, q: &Query) -> usize {
        self.m_base + 2 * self.pair_count() - q.len()
    }

    /// Number of edge-disjoint s-t paths once `q` is inserted.
    pub fn extract(&self, q: &Query) -> Result<u64> {
        let nu = self.inner.extract(&self.gadget_query(q)?)?;
        Ok(nu.saturating_sub(self.baseline(q)) as u64)
    }

    pub fn size_words(&self) -> usize {
        crate::container::stconn_size_words(self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::apply_query;
    use crate::oracle::{edge_connectivity, matching_size};
    use crate::random::{all_directed_queries, GraphSpec};

    fn with_st(mut g: Graph, s: usize, t: usize) -> Graph {
        g.set_source_sink(s, t).unwrap();
        g
    }

    fn digraph(n: usize, terminals: &[usize], edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::directed(n).with_terminals(terminals.iter().copied()).unwrap();
        for &(u, v) in edges {
            g.add_edge(u, v, 1).unwrap();
        }
        g
    }

    #[test]
    fn normalize_leaves_clean_graph_alone() {
        let g = with_st(digraph(4, &[2], &[(0, 2), (2, 1), (0, 1)]), 0, 1);
        let n = normalize(&g).unwrap();
        assert_eq!(n.graph.edges(), g.edges());
        assert_eq!((n.source, n.sink), (0, 1));
    }

    #[test]
    fn normalize_drops_edges_into_s() {
        let g = with_st(digraph(4, &[2], &[(2, 0), (0, 2), (2, 1)]), 0, 1);
        let n = normalize(&g).unwrap();
        assert_eq!(n.graph.m(), 2);
        assert_eq!(edge_connectivity(&n.graph, 0, 1), edge_connectivity(&g, 0, 1));
    }

    #[test]
    fn normalize_reroutes_terminal_source() {
        // s = 0 is a terminal with two outgoing edges; one other terminal
        let g = with_st(digraph(4, &[0, 3], &[(0, 1), (0, 2), (1, 2)]), 0, 2);
        let n = normalize(&g).unwrap();
        // d+(s) = 2 static + 1 pair edge to the other terminal
        assert_eq!(n.graph.n(), 4 + 1 + 3);
        assert_eq!(n.graph.m(), 3 + 6);
        assert!(!n.graph.is_terminal_mask()[n.source]);
        assert_eq!(edge_connectivity(&n.graph, n.source, n.sink), edge_connectivity(&g, 0, 2));
    }

    #[test]
    fn pair_index_is_dense() {
        let k = 4;
        let mut seen: Vec<usize> = pairs(k).map(|(i, j)| pair_index(k, i, j)).collect();
        assert_eq!(seen, (0..12).collect::<Vec<_>>());
        seen.dedup();
        assert_eq!(seen.len(), 12);
    }

    #[test]
    fn single_edge_one_terminal() {
        let g = with_st(digraph(3, &[2], &[(0, 1)]), 0, 1);
        let s = compress_stconn(&g, 0.01, 1).unwrap();
        assert_eq!(s.extract(&Query::empty()).unwrap(), 1);
    }

    #[test]
    fn rejects_missing_terminals_or_endpoints() {
        let g = with_st(digraph(3, &[], &[(0, 1)]), 0, 1);
        assert!(compress_stconn(&g, 0.01, 1).is_err());
        assert!(compress_stconn(&digraph(3, &[2], &[(0, 1)]), 0.01, 1).is_err());
    }

    #[test]
    fn path_through_a_terminal() {
        let g = with_st(digraph(4, &[1, 2], &[(0, 1), (1, 3), (1, 3), (0, 2)]), 0, 3);
        let s = compress_stconn(&g, 0.01, 5).unwrap();
        assert_eq!(s.extract(&Query::empty()).unwrap(), 1);
        assert_eq!(s.extract(&Query::from_pairs([(1, 0)])).unwrap(), 2);
        assert_eq!(s.extract(&Query::from_pairs([(0, 1)])).unwrap(), 1);
    }

    /// Zero-query gadget: the matching oracle confirms the baseline formula
    /// whenever t is unreachable.
    #[test]
    fn baseline_matches_oracle() {
        let g = with_st(digraph(5, &[2, 3], &[(0, 2), (3, 4), (2, 4), (1, 2)]), 0, 1);
        let n = normalize(&g).unwrap();
        let (gadget, m_base) = build_gadget(&n).unwrap();
        let s = compress_stconn(&g, 0.01, 0).unwrap();
        assert_eq!(m_base, s.m_base());
        for q in all_directed_queries(2) {
            let plugged = apply_query(&gadget, &s.gadget_query(&q).unwrap()).unwrap();
            assert_eq!(matching_size(&plugged).unwrap(), s.baseline(&q));
        }
    }

    #[test]
    fn gadget_matching_equals_connectivity() {
        for seed in 0..80 {
            let mut g = GraphSpec::new(5, 2).directed(true).edge_prob(0.3).generate_seeded(seed);
            g.set_source_sink((seed % 5) as usize, ((seed + 2) % 5) as usize).unwrap();
            let n = normalize(&g).unwrap();
            let (gadget, m_base) = build_gadget(&n).unwrap();
            if gadget.n() > crate::oracle::MATCHING_ORACLE_LIMIT {
                continue;
            }
            for q in all_directed_queries(2) {
                let plugged = apply_query(&gadget, &gadget_query(2, &q).unwrap()).unwrap();
                let want = edge_connectivity(&apply_query(&g, &q).unwrap(), g.source().unwrap(), g.sink().unwrap());
                let base = m_base + 2 * 2 - q.len();
                assert_eq!((matching_size(&plugged).unwrap() - base) as u64, want, "seed {seed}");
            }
        }
    }

    #[test]
    fn sketch_matches_oracle() {
        let mut wrong = 0;
        for seed in 0..40 {
            let mut g = GraphSpec::new(7, 2).directed(true).edge_prob(0.3).generate_seeded(seed);
            g.set_source_sink((seed % 7) as usize, ((seed + 3) % 7) as usize).unwrap();
            let s = compress_stconn(&g, 0.01, seed).unwrap();
            for q in all_directed_queries(2) {
                let want = edge_connectivity(&apply_query(&g, &q).unwrap(), g.source().unwrap(), g.sink().unwrap());
                if s.extract(&q).unwrap() != want {
                    wrong += 1;
                }
            }
        }
        assert!(wrong <= 2, "{wrong} wrong answers");
    }

    #[test]
    fn unreachable_sink_is_zero() {
        let g = with_st(digraph(5, &[2, 3], &[(0, 2), (3, 2)]), 0, 1);
        let s = compress_stconn(&g, 0.01, 3).unwrap();
        for q in all_directed_queries(2) {
            assert_eq!(s.extract(&q).unwrap(), 0);
        }
    }
}
