//! Adversarial instances with known answers: the membership graph for
//! matching and the planted-bit-vector graph for terminal cuts.

use crate::cut::CutSketch;
use crate::error::{Error, Result};
use crate::graph::{Graph, Query, TerminalCut};
use crate::oracle::oracle_maxflow;

/// Two perfect matchings `V1-V2`, `V3-V4` joined by `v2_i -- v3_j` for every
/// `e` in `S` with `e ↦ (i, j)`. Terminals: `u, w, V1, V4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipGadget {
    pub n_elements: usize,
    pub side: usize,
    pub set: Vec<usize>,
    pub graph: Graph,
}

/// Row-major bijection from `1..=N` to `(row, col)`, both 1-based.
pub fn sigma(e: usize, side: usize) -> (usize, usize) {
    ((e - 1) / side + 1, (e - 1) % side + 1)
}

pub fn gen_membership(n_elements: usize, set: &[usize]) -> Result<MembershipGadget> {
    let side = (n_elements as f64).sqrt().round() as usize;
    if n_elements == 0 || side * side != n_elements {
        return Err(Error::InvalidGraph(format!("N = {n_elements} is not a positive perfect square")));
    }
    if let Some(&bad) = set.iter().find(|&&e| e == 0 || e > n_elements) {
        return Err(Error::InvalidGraph(format!("element {bad} is outside 1..={n_elements}")));
    }
    // u = 0, w = 1, then V1..V4 in blocks of `side`
    let layer = |l: usize, i: usize| 2 + (l - 1) * side + (i - 1);
    let mut terminals = vec![0, 1];
    terminals.extend((1..=side).map(|i| layer(1, i)));
    terminals.extend((1..=side).map(|i| layer(4, i)));
    let mut g = Graph::undirected(4 * side + 2).with_terminals(terminals)?;
    for i in 1..=side {
        g.add_edge(layer(1, i), layer(2, i), 1)?;
        g.add_edge(layer(3, i), layer(4, i), 1)?;
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &e in &sorted {
        let (i, j) = sigma(e, side);
        g.add_edge(layer(2, i), layer(3, j), 1)?;
    }
    Ok(MembershipGadget { n_elements, side, set: sorted, graph: g })
}

impl MembershipGadget {
    /// Connects `u` to `v1_i` and `v4_j` to `w` for `e* ↦ (i, j)`.
    pub fn query(&self, e_star: usize) -> Result<Query> {
        if e_star == 0 || e_star > self.n_elements {
            return Err(Error::InvalidQuery(format!("element {e_star} is outside 1..={}", self.n_elements)));
        }
        let (i, j) = sigma(e_star, self.side);
        // terminal indices: u = 0, w = 1, V1 = 2.., V4 = 2 + side..
        Ok(Query::from_pairs([(0, 1 + i), (1 + self.side + j, 1)]))
    }

    /// Matching size the construction guarantees for `e*`.
    pub fn expected(&self, e_star: usize) -> usize {
        2 * self.side + self.set.contains(&e_star) as usize
    }
}

/// Bit vector planted in terminal-cut values.
///
/// Terminals are `s, q_1..q_k', t`; `S_i` runs over the `k'/2`-subsets of
/// the `q`s in colex order. Cut `TC(S_i) = ({s} ∪ S_i, {t})` has value
/// `c + v_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutLbGadget {
    pub k_half_set: usize,
    pub v: Vec<bool>,
    /// Bitmask over `q_1..q_k'` of each `S_i`.
    pub subsets: Vec<u64>,
    pub graph: Graph,
    pub source_hub_edges: bool,
}

/// Bitmasks of all `size`-subsets of `0..n` in colex order.
pub fn colex_subsets(n: usize, size: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|m| m.count_ones() as usize == size).collect()
}

/// `C(k', k'/2)`.
pub fn planted_length(k_prime: usize) -> usize {
    colex_subsets(k_prime, k_prime / 2).len()
}

/// The planted-vector graph without the `(s, u_i)` edges: with them, `s`
/// alone saturates every edge at `t` and all cut values collapse to
/// `(k + 1) N`.
pub fn gen_cut_lb(k_prime: usize, v: &[bool]) -> Result<CutLbGadget> {
    gen_cut_lb_with(k_prime, v, false)
}

/// Undirected capacitated construction; `source_hub_edges` adds a
/// capacity-`N` edge `(s, u_i)` for every `i`.
pub fn gen_cut_lb_with(k_prime: usize, v: &[bool], source_hub_edges: bool) -> Result<CutLbGadget> {
    if k_prime == 0 || k_prime % 2 == 1 || k_prime > 16 {
        return Err(Error::InvalidGraph(format!("k' = {k_prime} must be even and in 2..=16")));
    }
    let subsets = colex_subsets(k_prime, k_prime / 2);
    let big_n = subsets.len();
    if v.len() != big_n {
        return Err(Error::InvalidGraph(format!(
            "planted vector has length {} but C({k_prime}, {}) = {big_n}",
            v.len(),
            k_prime / 2
        )));
    }
    let k = k_prime + 2;
    // s = 0, q_j = j, t = k' + 1, u_j = k' + 1 + j, v_i = 2k' + 1 + i (1-based j, i)
    let (s, t) = (0, k_prime + 1);
    let u = |j: usize| k_prime + 1 + j;
    let vv = |i: usize| 2 * k_prime + 1 + i;
    let mut g = Graph::undirected(2 * k_prime + 2 + big_n).with_terminals(0..=k_prime + 1)?;
    let cap = big_n as u64;
    for j in 1..=k_prime {
        g.add_edge(j, u(j), cap)?;
    }
    if source_hub_edges {
        for j in 1..=k_prime {
            g.add_edge(s, u(j), cap)?;
        }
    }
    for i in 1..=big_n {
        g.add_edge(vv(i), t, 1)?;
    }
    let mut m = 0u64;
    for (idx, &mask) in subsets.iter().enumerate() {
        let i = idx + 1;
        for j in 1..=k_prime {
            let in_subset = mask >> (j - 1) & 1 == 1;
            if v[idx] || !in_subset {
                g.add_edge(u(j), vv(i), 1)?;
                g.add_edge(s, vv(i), 1)?;
                g.add_edge(u(j), t, 1)?;
                m += 1;
            }
        }
    }
    g.add_edge(s, t, k as u64 * cap - m)?;
    Ok(CutLbGadget { k_half_set: k_prime / 2, v: v.to_vec(), subsets, graph: g, source_hub_edges })
}

impl CutLbGadget {
    pub fn k_prime(&self) -> usize {
        self.graph.k() - 2
    }

    /// Number of planted bits, `N`.
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Profile offset `c = (k + 1) N - 1`, with `k = k' + 2` terminals.
    pub fn offset(&self) -> u64 {
        ((self.graph.k() + 1) * self.len() - 1) as u64
    }

    /// `TC(S_i)` for every `i`, in colex order.
    pub fn cuts(&self) -> Vec<TerminalCut> {
        let t = self.k_prime() + 1;
        self.subsets
            .iter()
            .map(|&mask| {
                let mut a = vec![0];
                a.extend((1..=self.k_prime()).filter(|j| mask >> (j - 1) & 1 == 1));
                TerminalCut::new(a, [t]).expect("disjoint")
            })
            .collect()
    }

    /// Cut values from the flow oracle.
    pub fn profile_oracle(&self) -> Vec<u64> {
        self.cuts().iter().map(|c| oracle_maxflow(&self.graph, c.a(), c.b()).value).collect()
    }

    pub fn profile_sketch(&self, sketch: &CutSketch) -> Result<Vec<u64>> {
        self.cuts().iter().map(|c| sketch.query_cut(c)).collect()
    }
}

/// Subtracts the offset from a profile; `None` if some entry is not `c` or
/// `c + 1`.
pub fn check_output_profile(profile: &[u64], offset: u64) -> Option<Vec<bool>> {
    profile
        .iter()
        .map(|&x| match x.checked_sub(offset) {
            Some(0) => Some(false),
            Some(1) => Some(true),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{apply_query, terminal_capacity};
    use crate::matching::compress;
    use crate::oracle::matching_size;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigma_is_row_major() {
        assert_eq!(sigma(1, 3), (1, 1));
        assert_eq!(sigma(3, 3), (1, 3));
        assert_eq!(sigma(4, 3), (2, 1));
        assert_eq!(sigma(9, 3), (3, 3));
    }

    #[test]
    fn membership_shape() {
        let gadget = gen_membership(9, &[2, 5]).unwrap();
        assert_eq!(gadget.graph.n(), 14);
        assert_eq!(gadget.graph.k(), 8);
        assert_eq!(gadget.graph.m(), 8);
        let mask = gadget.graph.is_terminal_mask();
        assert!(gadget.graph.edges().iter().all(|e| !(mask[e.u] && mask[e.v])));
        assert!(gen_membership(8, &[]).is_err());
        assert!(gen_membership(9, &[10]).is_err());
    }

    #[test]
    fn membership_single_element() {
        let gadget = gen_membership(1, &[1]).unwrap();
        let q = gadget.query(1).unwrap();
        assert_eq!(matching_size(&apply_query(&gadget.graph, &q).unwrap()).unwrap(), 3);
    }

    #[test]
    fn membership_empty_set() {
        let gadget = gen_membership(9, &[]).unwrap();
        for e in 1..=9 {
            let q = gadget.query(e).unwrap();
            assert_eq!(matching_size(&apply_query(&gadget.graph, &q).unwrap()).unwrap(), 6);
        }
    }

    #[test]
    fn membership_oracle_and_sketch() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for round in 0..10 {
            let set: Vec<usize> = (1..=9).filter(|_| rng.gen_bool(0.5)).collect();
            let gadget = gen_membership(9, &set).unwrap();
            let sketch = compress(&gadget.graph, 0.01, round).unwrap();
            for e in 1..=9 {
                let q = gadget.query(e).unwrap();
                assert_eq!(matching_size(&apply_query(&gadget.graph, &q).unwrap()).unwrap(), gadget.expected(e));
                assert_eq!(sketch.extract(&q).unwrap(), gadget.expected(e));
            }
        }
    }

    #[test]
    fn colex_order() {
        assert_eq!(colex_subsets(4, 2), vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(planted_length(2), 2);
        assert_eq!(planted_length(4), 6);
    }

    #[test]
    fn small_gadget_profiles() {
        let zero = gen_cut_lb(2, &[false, false]).unwrap();
        assert_eq!(zero.offset(), 9);
        assert_eq!(zero.profile_oracle(), vec![9, 9]);
        let one = gen_cut_lb(2, &[true, false]).unwrap();
        assert_eq!(one.profile_oracle(), vec![10, 9]);
    }

    #[test]
    fn source_hub_edges_flatten_the_profile() {
        for v in [[false, false], [true, false], [true, true]] {
            let g = gen_cut_lb_with(2, &v, true).unwrap();
            // every edge at t is saturated from s alone: (k + 1) N = 10
            assert_eq!(g.profile_oracle(), vec![10, 10]);
        }
    }

    #[test]
    fn planted_vectors_are_recovered_by_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k_prime in [2, 4, 6] {
            let n = planted_length(k_prime);
            for _ in 0..8 {
                let v: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
                let gadget = gen_cut_lb(k_prime, &v).unwrap();
                assert_eq!(check_output_profile(&gadget.profile_oracle(), gadget.offset()), Some(v));
            }
            for bit in [false, true] {
                let v = vec![bit; n];
                let gadget = gen_cut_lb(k_prime, &v).unwrap();
                assert_eq!(check_output_profile(&gadget.profile_oracle(), gadget.offset()), Some(v));
            }
        }
    }

    #[test]
    fn capacity_at_t_and_terminal_capacity() {
        let v = vec![true, false, false, true, true, false];
        let gadget = gen_cut_lb(4, &v).unwrap();
        let g = &gadget.graph;
        let t = 5;
        let at_t: u64 = g.edges().iter().filter(|e| e.u == t || e.v == t).map(|e| e.weight).sum();
        assert_eq!(at_t, 7 * 6);
        // hand count: (q_j, u_j) 4 * 6; (v_i, t) 6; m edges each of f1, f2; (s, t) 6N - m
        let m = 3 * 4 + 3 * 2;
        assert_eq!(terminal_capacity(g), 24 + 6 + 2 * m + (36 - m));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(gen_cut_lb(3, &[false; 3]).is_err());
        assert!(gen_cut_lb(4, &[false; 5]).is_err());
        assert_eq!(check_output_profile(&[9, 11], 9), None);
    }
}
