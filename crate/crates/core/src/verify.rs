//! Randomized agreement runs between sketches and the brute-force oracles.
//!
//! Every run is driven by one seed: trial `i` draws from the ChaCha stream
//! `i` of that seed, so results do not depend on the thread count.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cut::{all_terminal_cuts, compress_cut};
use crate::error::{Error, Result};
use crate::fixtures::{check_output_profile, gen_cut_lb, gen_membership, planted_length};
use crate::graph::{apply_query, terminal_capacity, Graph, Query, TerminalCut};
use crate::matching::compress;
use crate::mst::compress_mst;
use crate::oracle::{
    edge_connectivity, matching_size, max_flow, mst, oracle_maxflow, shortest_path, MATCHING_ORACLE_LIMIT,
};
use crate::path::{compress_paths, INFINITY};
use crate::random::{all_directed_queries, all_undirected_queries, random_query, GraphSpec};
use crate::stconn::compress_stconn;

/// Confidence of the binomial failure gate.
pub const GATE_CONFIDENCE: f64 = 0.99;

/// Smallest `c` with `P[Binomial(trials, p) <= c] >= confidence`.
///
/// A run whose true per-trial failure probability is at most `p` exceeds
/// `c` failures with probability below `1 - confidence`.
pub fn binomial_gate(trials: usize, p: f64, confidence: f64) -> usize {
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    let n = trials as f64;
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_pmf = n * lq;
    let mut cdf = 0.0;
    for c in 0..trials {
        cdf += log_pmf.exp();
        if cdf >= confidence {
            return c;
        }
        let i = c as f64;
        log_pmf += (n - i).ln() - (i + 1.0).ln() + lp - lq;
    }
    trials
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Matching,
    Cut,
    /// Oracle-level identity: a terminal cut equals its cheapest separating
    /// bipartition.
    Separating,
    Stconn,
    Mst,
    Path,
    Membership,
    CutLb,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Matching => "matching",
            Target::Cut => "cut",
            Target::Separating => "separating",
            Target::Stconn => "stconn",
            Target::Mst => "mst",
            Target::Path => "path",
            Target::Membership => "membership",
            Target::CutLb => "cutlb",
        }
    }

    /// Exact problems tolerate no failures at all.
    pub fn is_deterministic(self) -> bool {
        matches!(self, Target::Separating | Target::Mst | Target::Path)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub trials: usize,
    pub delta: f64,
    /// Upper bound on terminals; for `cutlb` the (even) number `k'`.
    pub max_k: usize,
    /// Upper bound on vertices; for `membership` the element count `N`.
    pub max_n: usize,
    /// Sketches built per random graph, each with its own seed.
    pub seeds_per_graph: usize,
    pub seed: u64,
    pub threads: usize,
    /// Verify this graph instead of random ones; each trial reseeds the
    /// sketch.
    pub graph: Option<Graph>,
}

impl VerifyConfig {
    /// Desk-scale defaults for `target`.
    pub fn for_target(target: Target) -> Self {
        let (trials, max_k, max_n) = match target {
            Target::Matching => (100, 4, 12),
            Target::Cut | Target::Separating => (100, 3, 7),
            Target::Stconn => (100, 2, 10),
            Target::Mst => (50, 5, 30),
            Target::Path => (50, 4, 12),
            Target::Membership => (50, 0, 9),
            Target::CutLb => (20, 4, 0),
        };
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self { trials, delta: 0.01, max_k, max_n, seeds_per_graph: 1, seed: 0, threads, graph: None }
    }

    fn rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub target: Target,
    pub instances: usize,
    pub queries: usize,
    pub query_failures: usize,
    /// What the failure gate counts: queries or whole instances.
    pub unit: &'static str,
    pub gated: usize,
    pub failures: usize,
    pub allowed: usize,
    pub delta: Option<f64>,
    /// Failures of exact checks (oracle identities, size formulas, exact
    /// problems); any one fails the run.
    pub hard_failures: usize,
    pub examples: Vec<String>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.hard_failures == 0 && self.failures <= self.allowed
    }

    pub fn failure_rate(&self) -> f64 {
        if self.gated == 0 {
            0.0
        } else {
            self.failures as f64 / self.gated as f64
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} instances, {} queries, {} query mismatches; {}/{} {} failed (rate {:.4}, allowed {})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.target.name(),
            self.instances,
            self.queries,
            self.query_failures,
            self.failures,
            self.gated,
            self.unit,
            self.failure_rate(),
            self.allowed,
        )?;
        if let Some(d) = self.delta {
            write!(f, ", delta {d}")?;
        }
        write!(f, ", hard failures {}, {:.2?}", self.hard_failures, self.elapsed)
    }
}

#[derive(Debug, Default)]
struct Tally {
    instances: usize,
    queries: usize,
    query_failures: usize,
    /// Instances with at least one wrong sketch answer.
    bad_instances: usize,
    hard: usize,
    examples: Vec<String>,
}

const MAX_EXAMPLES: usize = 5;

impl Tally {
    fn hard(&mut self, msg: String) {
        self.hard += 1;
        self.note(msg);
    }

    fn note(&mut self, msg: String) {
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(msg);
        }
    }

    /// Records one sketch answer against the oracle; returns whether it
    /// matched.
    fn check<T: PartialEq + fmt::Debug>(&mut self, got: T, want: T, what: impl FnOnce() -> String) -> bool {
        self.queries += 1;
        if got == want {
            return true;
        }
        self.query_failures += 1;
        let what = what();
        self.note(format!("{what}: sketch {got:?}, oracle {want:?}"));
        false
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.queries += other.queries;
        self.query_failures += other.query_failures;
        self.bad_instances += other.bad_instances;
        self.hard += other.hard;
        for e in other.examples {
            self.note(e);
        }
        self
    }
}

fn run_trials<F>(cfg: &VerifyConfig, f: F) -> Result<Tally>
where
    F: Fn(usize, &mut ChaCha8Rng, &mut Tally) -> Result<()> + Sync,
{
    let threads = cfg.threads.clamp(1, cfg.trials.max(1));
    let results: Vec<Result<Tally>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|tid| {
                let f = &f;
                scope.spawn(move || {
                    let mut tally = Tally::default();
                    for trial in (tid..cfg.trials).step_by(threads) {
                        tally.instances += 1;
                        let before = tally.query_failures;
                        f(trial, &mut cfg.rng(trial), &mut tally)?;
                        if tally.query_failures > before {
                            tally.bad_instances += 1;
                        }
                    }
                    Ok(tally)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verify worker panicked")).collect()
    });
    results.into_iter().try_fold(Tally::default(), |acc, t| Ok(acc.merge(t?)))
}

fn report(target: Target, cfg: &VerifyConfig, tally: Tally, per_instance: bool, started: Instant) -> VerifyReport {
    let (unit, gated, failures) = if per_instance {
        ("instances", tally.instances, tally.bad_instances)
    } else {
        ("queries", tally.queries, tally.query_failures)
    };
    let (delta, allowed) = if target.is_deterministic() {
        (None, 0)
    } else {
        (Some(cfg.delta), binomial_gate(gated, cfg.delta, GATE_CONFIDENCE))
    };
    VerifyReport {
        target,
        instances: tally.instances,
        queries: tally.queries,
        query_failures: tally.query_failures,
        unit,
        gated,
        failures,
        allowed,
        delta,
        hard_failures: tally.hard,
        examples: tally.examples,
        elapsed: started.elapsed(),
    }
}

pub fn verify(target: Target, cfg: &VerifyConfig) -> Result<VerifyReport> {
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::InvalidField(format!("delta must lie in (0, 1), got {}", cfg.delta)));
    }
    let started = Instant::now();
    let (tally, per_instance) = match target {
        Target::Matching => (run_matching(cfg)?, false),
        Target::Cut => (run_cut(cfg)?, true),
        Target::Separating => (run_separating(cfg)?, false),
        Target::Stconn => (run_stconn(cfg)?, false),
        Target::Mst => (run_mst(cfg)?, false),
        Target::Path => (run_path(cfg)?, false),
        Target::Membership => (run_membership(cfg)?, false),
        Target::CutLb => (run_cutlb(cfg)?, true),
    };
    Ok(report(target, cfg, tally, per_instance, started))
}

fn trial_graph(cfg: &VerifyConfig, rng: &mut ChaCha8Rng, random: impl FnOnce(&mut ChaCha8Rng) -> Graph) -> Graph {
    match &cfg.graph {
        Some(g) => g.clone(),
        None => random(rng),
    }
}

/// Random undirected graph with `n <= max_n` and `k <= max_k`, as used by
/// the matching runs.
pub fn matching_instance(max_n: usize, max_k: usize, rng: &mut impl Rng) -> Graph {
    let n = rng.gen_range(1..=max_n.max(1));
    let k = rng.gen_range(1..=max_k.clamp(1, n));
    GraphSpec::new(n, k).edge_prob(rng.gen_range(0.15..0.6)).generate(rng)
}

fn run_matching(cfg: &VerifyConfig) -> Result<Tally> {
    run_trials(cfg, |_, rng, tally| {
        let g = trial_graph(cfg, rng, |rng| matching_instance(cfg.max_n, cfg.max_k, rng));
        if g.n() > MATCHING_ORACLE_LIMIT {
            return Err(Error::SizeLimit {
                what: "matching verify vertex count",
                got: g.n(),
                limit: MATCHING_ORACLE_LIMIT,
            });
        }
        let queries = all_undirected_queries(g.k());
        let want = queries.iter().map(|q| matching_size(&apply_query(&g, q)?)).collect::<Result<Vec<_>>>()?;
        for _ in 0..cfg.seeds_per_graph.max(1) {
            let sketch = compress(&g, cfg.delta, rng.gen())?;
            for (q, &w) in queries.iter().zip(&want) {
                tally.check(sketch.extract(q)?, w, || format!("matching {q:?}"));
            }
        }
        Ok(())
    })
}

/// Random digraph for the cut runs: at least two terminals, weights `1..=3`,
/// total capacity at most 30 so the expanded unit graph stays small. Draws
/// with no terminal edge (which the cut sketch rejects) are skipped.
pub fn cut_instance(max_n: usize, max_k: usize, rng: &mut impl Rng) -> Graph {
    loop {
        let n = rng.gen_range(2..=max_n.max(2));
        let k = rng.gen_range(2..=max_k.clamp(2, n));
        let g = GraphSpec::new(n, k).directed(true).edge_prob(rng.gen_range(0.1..0.5)).weights(1, 3).generate(rng);
        if g.edges().iter().map(|e| e.weight).sum::<u64>() <= 30 && terminal_capacity(&g) > 0 {
            return g;
        }
    }
}

fn run_cut(cfg: &VerifyConfig) -> Result<Tally> {
    run_trials(cfg, |_, rng, tally| {
        let g = trial_graph(cfg, rng, |rng| cut_instance(cfg.max_n, cfg.max_k, rng));
        let sketch = compress_cut(&g, cfg.delta, rng.gen())?;
        if sketch.size_words() != crate::container::Sketch::Cut(sketch.clone()).size_words() {
            tally.hard("cut size does not match its container".into());
        }
        for cut in all_terminal_cuts(g.k()) {
            let want = oracle_maxflow(&g, cut.a(), cut.b()).value;
            tally.check(sketch.query_cut(&cut)?, want, || format!("cut {cut:?}"));
        }
        Ok(())
    })
}

/// Cheapest bipartition `(X, T \ X)` with `A ⊆ X` and `B ∩ X = ∅`, by the
/// flow oracle.
pub fn separating_min(g: &Graph, cut: &TerminalCut) -> u64 {
    let k = g.k();
    let free: Vec<usize> = (0..k).filter(|x| !cut.a().contains(x) && !cut.b().contains(x)).collect();
    (0u64..1 << free.len())
        .map(|mask| {
            let mut side = cut.a().to_vec();
            side.extend(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v));
            let rest: Vec<usize> = (0..k).filter(|x| !side.contains(x)).collect();
            let (a, b): (Vec<usize>, Vec<usize>) =
                (side.iter().map(|&i| g.terminals()[i]).collect(), rest.iter().map(|&i| g.terminals()[i]).collect());
            max_flow(g, &a, &b)
        })
        .min()
        .unwrap_or(u64::MAX)
}

fn run_separating(cfg: &VerifyConfig) -> Result<Tally> {
    run_trials(cfg, |_, rng, tally| {
        let g = trial_graph(cfg, rng, |rng| cut_instance(cfg.max_n, cfg.max_k, rng));
        for cut in all_terminal_cuts(g.k()) {
            let direct = oracle_maxflow(&g, cut.a(), cut.b()).value;
            if !tally.check(separating_min(&g, &cut), direct, || format!("separating {cut:?}")) {
                tally.hard += 1;
            }
        }
        Ok(())
    })
}

/// Random digraph with distinct random `s`, `t` for the connectivity runs.
pub fn stconn_instance(max_n: usize, max_k: usize, rng: &mut impl Rng) -> Graph {
    let n = rng.gen_range(2..=max_n.max(2));
    let k = rng.gen_range(1..=max_k.clamp(1, n));
    let mut g = GraphSpec::new(n, k).directed(true).edge_prob(rng.gen_range(0.1..0.5)).generate(rng);
    let st = sample(rng, n, 2);
    g.set_source_sink(st.index(0), st.index(1)).expect("distinct in range");
    g
}

fn run_stconn(cfg: &VerifyConfig) -> Result<Tally> {
    run_trials(cfg, |_, rng, tally| {
        let g = trial_graph(cfg, rng, |rng| stconn_instance(cfg.max_n, cfg.max_k, rng));
        let (s, t) = (g.source().expect("set"), g.sink().expect("set"));
        let sketch = compress_stconn(&g, cfg.delta, rng.gen())?;
        let words = crate::container::Sketch::Stconn(sketch.clone()).size_words();
        if words != crate::container::stconn_size_words(g.k()) {
            tally.hard(format!("stconn container has {words} words"));
        }
        for q in all_directed_queries(g.k()) {
            let want = edge_connectivity(&apply_query(&g, &q)?, s, t);
            tally.check(sketch.extract(&q)?, want, || format!("stconn {q:?}"));
        }
        Ok(())
    })
}

/// Random weighted graph for the MST runs; sparse draws are usually
/// disconnected.
pub fn mst_instance(max_n: usize, max_k: usize, rng: &mut impl Rng) -> Graph {
    let n = rng.gen_range(1..=max_n.max(1));
    let k = rng.gen_range(1..=max_k.clamp(1, n));
    let p = if rng.gen_bool(0.5) { rng.gen_range(0.02..0.1) } else { rng.gen_range(0.1..0.5) };
    GraphSpec::new(n, k).edge_prob(p).weights(1, 10).generate(rng)
}

/// Weight range of MST query edges: one below and one above the static
/// range so both extremes are exercised.
pub const MST_QUERY_WEIGHTS: (u64, u64) = (0, 11);

/// Every single-edge query: each terminal pair with each weight of
/// [`MST_QUERY_WEIGHTS`].
pub fn single_edge_queries(k: usize) -> Vec<Query> {
    let (lo, hi) = MST_QUERY_WEIGHTS;
    (0..k)
        .flat_map(|i| (i + 1..k).flat_map(move |j| (lo..=hi).map(move |w| Query::from_weighted([(i, j, w)]))))
        .collect()
}

fn run_mst(cfg: &VerifyConfig) -> Result<Tally> {
    run_trials(cfg, |_, rng, tally| {
        let g = trial_graph(cfg, rng, |rng| mst_instance(cfg.max_n, cfg.max_k, rng));
        let sketch = compress_mst(&g)?;
        if sketch.vertex_count() > 4 * g.k() {
            tally.hard(format!("contracted forest has {} vertices for k = {}", sketch.vertex_count(), g.k()));
        }
        let mut queries = single_edge_queries(g.k());
        let pairs = g.k() * g.k().saturating_sub(1) / 2;
        for _ in 0..100 {
            let count = rng.gen_range(0..=pairs);
            queries.push(random_query(g.k(), false, count, MST_QUERY_WEIGHTS, rng));
        }
        for q in &queries {
            let want = mst(&apply_query(&g, q)?);
            if !tally.check(sketch.extract_detailed(q)?, want, || format!("mst {q:?}")) {
                tally.hard += 1;
            }
        }
        Ok(())
    })
}

pub fn path_instance(max_n: usize, max_k: usize, rng: &mut impl Rng) -> (Graph, usize, usize) {
    let n = rng.gen_range(1..=max_n.max(1));
    let k = rng.gen_range(1..=max_k.clamp(1, n));
    let g = GraphSpec::new(n, k).directed(true).edge_prob(rng.gen_range(0.05..0.4)).weights(0, 20).generate(rng);
    let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
    (g, s, t)
}

/// Every set of at most `max_edges` ordered terminal pairs, weights drawn
/// from `rng`.
pub fn small_directed_queries(k: usize, max_edges: usize, rng: &mut impl Rng) -> Vec<Query> {
    let pairs: Vec<(usize, usize)> =
        (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = vec![Query::empty()];
    let mut frontier: Vec<(usize, Vec<usize>)> = vec![(0, Vec::new())];
    for _ in 0..max_edges {
        let mut next = Vec::new();
        for (start, picked) in frontier {
            for p in start..pairs.len() {
                let mut more = picked.clone();
                more.push(p);
                out.push(Query::from_weighted(more.iter().map(|&i| (pairs[i].0, pairs[i].1, rng.gen_range(0..=20)))));
                next.push((p + 1, more));
            }
        }
        frontier = next;
    }
    out
}

fn run_path(cfg: &VerifyConfig) -> Result<Tally> {
    run_trials(cfg, |_, rng, tally| {
        let (g, s, t) = match &cfg.graph {
            Some(g) => match (g.source(), g.sink()) {
                (Some(s), Some(t)) => (g.clone(), s, t),
                _ => return Err(Error::InvalidGraph("path verify needs s and t in the graph".into())),
            },
            None => path_instance(cfg.max_n, cfg.max_k, rng),
        };
        let sketch = compress_paths(&g, Some((s, t)))?;
        for q in small_directed_queries(g.k(), 3, rng) {
            let q = if g.is_directed() { q } else { undirected_part(&q) };
            let want = shortest_path(&apply_query(&g, &q)?, s, t).unwrap_or(INFINITY);
            if !tally.check(sketch.extract(&q)?, want, || format!("path {q:?}")) {
                tally.hard += 1;
            }
        }
        Ok(())
    })
}

fn undirected_part(q: &Query) -> Query {
    Query::from_weighted(q.edges().iter().filter(|e| e.a < e.b).map(|e| (e.a, e.b, e.weight)))
}

fn run_membership(cfg: &VerifyConfig) -> Result<Tally> {
    let n = cfg.max_n;
    run_trials(cfg, |_, rng, tally| {
        let set: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.5)).collect();
        let gadget = gen_membership(n, &set)?;
        let sketch = compress(&gadget.graph, cfg.delta, rng.gen())?;
        for e in 1..=n {
            let q = gadget.query(e)?;
            let want = gadget.expected(e);
            let oracle = matching_size(&apply_query(&gadget.graph, &q)?)?;
            if oracle != want {
                tally.hard(format!("membership e* = {e}, S = {set:?}: oracle {oracle}, expected {want}"));
            }
            tally.check(sketch.extract(&q)?, want, || format!("membership e* = {e}, S = {set:?}"));
        }
        Ok(())
    })
}

fn run_cutlb(cfg: &VerifyConfig) -> Result<Tally> {
    let k_prime = cfg.max_k;
    if k_prime < 2 || !k_prime.is_multiple_of(2) {
        return Err(Error::InvalidGraph(format!("cut fixture needs an even k' >= 2, got {k_prime}")));
    }
    let len = planted_length(k_prime);
    run_trials(cfg, |_, rng, tally| {
        let v: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
        let gadget = gen_cut_lb(k_prime, &v)?;
        let recovered = check_output_profile(&gadget.profile_oracle(), gadget.offset());
        if recovered.as_ref() != Some(&v) {
            tally.hard(format!("oracle profile does not recover v = {v:?}"));
        }
        let sketch = compress_cut(&gadget.graph, cfg.delta, rng.gen())?;
        let got = check_output_profile(&gadget.profile_sketch(&sketch)?, gadget.offset());
        tally.check(got, Some(v.clone()), || format!("cut fixture v = {v:?}"));
        Ok(())
    })
}
