//! Static graphs with an ordered terminal list, queries over terminal pairs,
//! and the line-oriented text formats for both.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Default cap on the number of unit edges produced by [`expand_capacities`].
pub const DEFAULT_EXPANSION_LIMIT: u64 = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Weight or capacity, depending on the problem.
    pub weight: u64,
    pub id: usize,
}

/// A (multi)graph on vertices `0..n` with terminals indexed by list position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    terminals: Vec<usize>,
    source: Option<usize>,
    sink: Option<usize>,
}

impl Graph {
    pub fn new(n: usize, directed: bool) -> Self {
        Self { n, directed, edges: Vec::new(), terminals: Vec::new(), source: None, sink: None }
    }

    pub fn undirected(n: usize) -> Self {
        Self::new(n, false)
    }

    pub fn directed(n: usize) -> Self {
        Self::new(n, true)
    }

    pub fn with_terminals(mut self, terminals: impl IntoIterator<Item = usize>) -> Result<Self> {
        self.set_terminals(terminals.into_iter().collect())?;
        Ok(self)
    }

    pub fn set_terminals(&mut self, terminals: Vec<usize>) -> Result<()> {
        let mut seen = HashSet::new();
        for &t in &terminals {
            if t >= self.n {
                return Err(Error::InvalidGraph(format!("terminal {t} out of range (n = {})", self.n)));
            }
            if !seen.insert(t) {
                return Err(Error::InvalidGraph(format!("terminal {t} listed twice")));
            }
        }
        self.terminals = terminals;
        Ok(())
    }

    pub fn set_source_sink(&mut self, source: usize, sink: usize) -> Result<()> {
        if source >= self.n || sink >= self.n {
            return Err(Error::InvalidGraph(format!("designated s/t ({source}, {sink}) out of range")));
        }
        if source == sink {
            return Err(Error::InvalidGraph("s and t must be distinct".into()));
        }
        self.source = Some(source);
        self.sink = Some(sink);
        Ok(())
    }

    /// Appends an edge and returns its id.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: u64) -> Result<usize> {
        if u >= self.n || v >= self.n {
            return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range (n = {})", self.n)));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, weight, id });
        Ok(id)
    }

    /// Adds a fresh vertex and returns its id.
    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn source(&self) -> Option<usize> {
        self.source
    }

    pub fn sink(&self) -> Option<usize> {
        self.sink
    }

    /// Terminal index of `v`, if it is a terminal.
    pub fn terminal_index(&self, v: usize) -> Option<usize> {
        self.terminals.iter().position(|&t| t == v)
    }

    pub fn is_terminal_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &t in &self.terminals {
            mask[t] = true;
        }
        mask
    }

    /// Same vertices, terminals and designations, but no edges.
    pub fn without_edges(&self) -> Self {
        Self { edges: Vec::new(), ..self.clone() }
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for &t in &self.terminals {
            if t >= self.n || !seen.insert(t) {
                return Err(Error::InvalidGraph(format!("bad terminal {t}")));
            }
        }
        for e in &self.edges {
            if e.u >= self.n || e.v >= self.n {
                return Err(Error::InvalidGraph(format!("edge ({}, {}) out of range", e.u, e.v)));
            }
        }
        if let (Some(s), Some(t)) = (self.source, self.sink) {
            if s == t || s >= self.n || t >= self.n {
                return Err(Error::InvalidGraph("bad s/t designation".into()));
            }
        }
        Ok(())
    }

    /// Each undirected edge becomes two antiparallel directed edges of the
    /// same weight; directed graphs are returned unchanged.
    pub fn to_directed(&self) -> Self {
        if self.directed {
            return self.clone();
        }
        let mut out = Self { directed: true, edges: Vec::with_capacity(2 * self.m()), ..self.clone() };
        for e in &self.edges {
            out.add_edge(e.u, e.v, e.weight).expect("in range");
            out.add_edge(e.v, e.u, e.weight).expect("in range");
        }
        out
    }

    /// Drops self-loops, renumbering edge ids.
    pub fn without_self_loops(&self) -> Self {
        let mut out = self.without_edges();
        for e in self.edges.iter().filter(|e| e.u != e.v) {
            out.add_edge(e.u, e.v, e.weight).expect("in range");
        }
        out
    }
}

/// One inserted edge between terminal indices `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QueryEdge {
    pub a: usize,
    pub b: usize,
    pub weight: u64,
}

/// A set of terminal-pair insertions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Query {
    edges: Vec<QueryEdge>,
}

impl Query {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Unit-weight query from index pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self { edges: pairs.into_iter().map(|(a, b)| QueryEdge { a, b, weight: 1 }).collect() }
    }

    pub fn from_weighted(edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Self {
        Self { edges: edges.into_iter().map(|(a, b, weight)| QueryEdge { a, b, weight }).collect() }
    }

    pub fn push(&mut self, a: usize, b: usize, weight: u64) {
        self.edges.push(QueryEdge { a, b, weight });
    }

    pub fn edges(&self) -> &[QueryEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks indices against `k`, rejects self-loops and duplicate pairs.
    /// Pairs are ordered when `directed`, unordered otherwise.
    pub fn validate(&self, k: usize, directed: bool) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.edges {
            if e.a >= k || e.b >= k {
                return Err(Error::InvalidQuery(format!(
                    "terminal index out of range in ({}, {}) (k = {k})",
                    e.a, e.b
                )));
            }
            if e.a == e.b {
                return Err(Error::InvalidQuery(format!("self-loop on terminal {}", e.a)));
            }
            let key = if directed { (e.a, e.b) } else { (e.a.min(e.b), e.a.max(e.b)) };
            if !seen.insert(key) {
                return Err(Error::InvalidQuery(format!("pair ({}, {}) repeated", e.a, e.b)));
            }
        }
        Ok(())
    }
}

/// Disjoint nonempty terminal-index sets `(A, B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalCut {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl TerminalCut {
    pub fn new(a: impl IntoIterator<Item = usize>, b: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut a: Vec<usize> = a.into_iter().collect();
        let mut b: Vec<usize> = b.into_iter().collect();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidCut("both sides must be nonempty".into()));
        }
        if let Some(x) = a.iter().find(|x| b.binary_search(x).is_ok()) {
            return Err(Error::InvalidCut(format!("terminal {x} is on both sides")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        match self.a.iter().chain(&self.b).find(|&&x| x >= k) {
            Some(x) => Err(Error::InvalidCut(format!("terminal index {x} out of range (k = {k})"))),
            None => Ok(()),
        }
    }

    /// Parses `"A:0,2 B:1"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut a = None;
        let mut b = None;
        for part in text.split_whitespace() {
            let (side, list) =
                part.split_once(':').ok_or_else(|| Error::InvalidCut(format!("expected SIDE:LIST, got {part:?}")))?;
            let ids = list
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| Error::InvalidCut(format!("bad index {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            match side {
                "A" | "a" => a = Some(ids),
                "B" | "b" => b = Some(ids),
                _ => return Err(Error::InvalidCut(format!("unknown side {side:?}"))),
            }
        }
        match (a, b) {
            (Some(a), Some(b)) => Self::new(a, b),
            _ => Err(Error::InvalidCut("need both A: and B: lists".into())),
        }
    }
}

/// `G^Q`: `g` with one edge appended per query edge. New edges get ids
/// `m, m + 1, ..` in query order.
pub fn apply_query(g: &Graph, q: &Query) -> Result<Graph> {
    q.validate(g.k(), g.is_directed())?;
    let mut out = g.clone();
    for e in q.edges() {
        out.add_edge(g.terminals[e.a], g.terminals[e.b], e.weight)?;
    }
    Ok(out)
}

/// Replaces every capacity-`c` edge by `c` parallel unit edges.
pub fn expand_capacities(g: &Graph, limit: u64) -> Result<Graph> {
    let total: u64 = g.edges.iter().map(|e| e.weight).sum();
    if total > limit {
        return Err(Error::CapacityOverflow { requested: total, limit });
    }
    let mut out = g.without_edges();
    for e in &g.edges {
        for _ in 0..e.weight {
            out.add_edge(e.u, e.v, 1)?;
        }
    }
    Ok(out)
}

/// Total capacity of edges with at least one terminal endpoint.
pub fn terminal_capacity(g: &Graph) -> u64 {
    let mask = g.is_terminal_mask();
    g.edges.iter().filter(|e| mask[e.u] || mask[e.v]).map(|e| e.weight).sum()
}

// ---------------------------------------------------------------------------
// text formats

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

fn parse_weight(tok: Option<&str>, line: usize) -> Result<u64> {
    let w: i64 = parse_num(tok, line, "weight")?;
    if w < 0 {
        return Err(Error::NegativeWeight { line, weight: w });
    }
    Ok(w as u64)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses the graph format:
///
/// ```text
/// n k directed
/// t <vertex>        (k lines, in terminal order)
/// s <vertex>        (optional source)
/// d <vertex>        (optional sink)
/// e <u> <v> <w>     (one per edge)
/// ```
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let mut toks = header.split_whitespace();
    let n: usize = parse_num(toks.next(), hl, "vertex count")?;
    let k: usize = parse_num(toks.next(), hl, "terminal count")?;
    let directed = match toks.next() {
        Some("1" | "true" | "directed" | "d") => true,
        Some("0" | "false" | "undirected" | "u") => false,
        Some(other) => return Err(parse_err(hl, format!("bad directed flag {other:?}"))),
        None => return Err(parse_err(hl, "missing directed flag")),
    };
    if toks.next().is_some() {
        return Err(parse_err(hl, "trailing tokens in header"));
    }
    if k > n {
        return Err(parse_err(hl, format!("k = {k} exceeds n = {n}")));
    }
    let mut g = Graph::new(n, directed);
    let mut terminals = Vec::with_capacity(k);
    let (mut source, mut sink) = (None, None);
    for (ln, line) in lines {
        let mut toks = line.split_whitespace();
        let kind = toks.next().expect("nonempty line");
        match kind {
            "t" => terminals.push(parse_num(toks.next(), ln, "terminal")?),
            "s" => source = Some(parse_num(toks.next(), ln, "source")?),
            "d" => sink = Some(parse_num(toks.next(), ln, "sink")?),
            "e" => {
                let u: usize = parse_num(toks.next(), ln, "endpoint")?;
                let v: usize = parse_num(toks.next(), ln, "endpoint")?;
                let w = parse_weight(toks.next(), ln)?;
                g.add_edge(u, v, w).map_err(|e| parse_err(ln, e.to_string()))?;
            }
            other => return Err(parse_err(ln, format!("unknown record {other:?}"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
    }
    if terminals.len() != k {
        return Err(parse_err(hl, format!("header declares {k} terminals, found {}", terminals.len())));
    }
    g.set_terminals(terminals).map_err(|e| parse_err(hl, e.to_string()))?;
    match (source, sink) {
        (Some(s), Some(t)) => g.set_source_sink(s, t).map_err(|e| parse_err(hl, e.to_string()))?,
        (None, None) => {}
        _ => return Err(parse_err(hl, "s and d must be given together")),
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", g.n, g.k(), u8::from(g.directed)).unwrap();
    for t in &g.terminals {
        writeln!(out, "t {t}").unwrap();
    }
    if let (Some(s), Some(t)) = (g.source, g.sink) {
        writeln!(out, "s {s}").unwrap();
        writeln!(out, "d {t}").unwrap();
    }
    for e in &g.edges {
        writeln!(out, "e {} {} {}", e.u, e.v, e.weight).unwrap();
    }
    out
}

/// Parses `q <i> <j> [w]` lines; the weight defaults to 1.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut q = Query::empty();
    for (ln, line) in content_lines(text) {
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("q") => {}
            Some(other) => return Err(parse_err(ln, format!("unknown record {other:?}"))),
            None => unreachable!(),
        }
        let a = parse_num(toks.next(), ln, "terminal index")?;
        let b = parse_num(toks.next(), ln, "terminal index")?;
        let w = match toks.next() {
            Some(tok) => parse_weight(Some(tok), ln)?,
            None => 1,
        };
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        q.push(a, b, w);
    }
    Ok(q)
}

pub fn write_query(q: &Query) -> String {
    q.edges().iter().map(|e| format!("q {} {} {}\n", e.a, e.b, e.weight)).collect()
}
