use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dynsketch::container::Sketch;
use dynsketch::cut::{all_terminal_cuts, compress_cut};
use dynsketch::graph::{
    apply_query, parse_graph, parse_query, terminal_capacity, write_graph, write_query, Graph, Query,
};
use dynsketch::matching::compress;
use dynsketch::mst::compress_mst;
use dynsketch::oracle::{matching_size, max_flow, mst, shortest_path};
use dynsketch::path::{compress_paths, INFINITY};
use dynsketch::random::{random_query, GraphSpec};
use dynsketch::zp::Zp;

/// Failure budget small enough that a wrong randomized answer would point
/// at a bug rather than bad luck.
const TINY_DELTA: f64 = 1e-9;

fn graph(directed: bool, max_n: usize, max_k: usize, weights: (u64, u64)) -> impl Strategy<Value = Graph> {
    (1..=max_n, 1..=max_k, 0.05f64..0.6, any::<u64>()).prop_map(move |(n, k, p, seed)| {
        GraphSpec::new(n, k).directed(directed).edge_prob(p).weights(weights.0, weights.1).generate_seeded(seed)
    })
}

fn query_for(g: &Graph, count: usize, weights: (u64, u64), seed: u64) -> Query {
    random_query(g.k(), g.is_directed(), count, weights, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_ops_agree_with_wide_integers(p in prop::sample::select(vec![2u64, 3, 65_521, 4_294_967_291, 2_305_843_009_213_693_951]), a: u64, b: u64) {
        let zp = Zp::new(p);
        let (a, b) = (a % p, b % p);
        prop_assert_eq!(zp.mul(a, b) as u128, a as u128 * b as u128 % p as u128);
        prop_assert_eq!(zp.add(a, b) as u128, (a as u128 + b as u128) % p as u128);
        prop_assert_eq!(zp.add(zp.sub(a, b), b), a);
        if a != 0 {
            prop_assert_eq!(zp.mul(a, zp.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn text_formats_round_trip(g in graph(true, 10, 4, (0, 50)), seed: u64, count in 0usize..6) {
        prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g.clone());
        let q = query_for(&g, count, (0, 9), seed);
        prop_assert_eq!(parse_query(&write_query(&q)).unwrap(), q);
    }

    #[test]
    fn matching_sketch_matches_oracle(g in graph(false, 12, 5, (1, 1)), seed: u64, count in 0usize..6) {
        let sketch = compress(&g, TINY_DELTA, seed).unwrap();
        let q = query_for(&g, count, (1, 1), seed);
        prop_assert_eq!(sketch.extract(&q).unwrap(), matching_size(&apply_query(&g, &q).unwrap()).unwrap());
    }

    #[test]
    fn containers_round_trip(g in graph(false, 12, 4, (1, 9)), seed: u64) {
        let sketches = [
            Sketch::Matching(compress(&g, 0.01, seed).unwrap()),
            Sketch::Mst(compress_mst(&g).unwrap()),
            Sketch::Path(compress_paths(&g, Some((0, g.n() - 1))).unwrap()),
        ];
        for s in sketches {
            let bytes = s.to_bytes();
            prop_assert_eq!(bytes.len(), 8 * s.size_words());
            prop_assert_eq!(Sketch::from_bytes(&bytes).unwrap(), s);
        }
    }

    #[test]
    fn truncated_containers_are_rejected(g in graph(false, 8, 3, (1, 1)), seed: u64, cut in 1usize..64) {
        let bytes = Sketch::Matching(compress(&g, 0.01, seed).unwrap()).to_bytes();
        let keep = bytes.len().saturating_sub(cut);
        prop_assert!(Sketch::from_bytes(&bytes[..keep]).is_err());
    }

    #[test]
    fn cut_sketch_matches_max_flow(g in graph(true, 6, 3, (1, 3)), seed: u64) {
        prop_assume!(g.k() >= 2 && terminal_capacity(&g) > 0);
        let sketch = compress_cut(&g, TINY_DELTA, seed).unwrap();
        for cut in all_terminal_cuts(g.k()) {
            let side = |ids: &[usize]| ids.iter().map(|&i| g.terminals()[i]).collect::<Vec<_>>();
            prop_assert_eq!(sketch.query_cut(&cut).unwrap(), max_flow(&g, &side(cut.a()), &side(cut.b())));
        }
    }

    #[test]
    fn mst_sketch_is_exact_and_small(g in graph(false, 25, 5, (1, 10)), seed: u64, count in 0usize..8) {
        let sketch = compress_mst(&g).unwrap();
        prop_assert!(sketch.vertex_count() <= 4 * g.k());
        let q = query_for(&g, count, (0, 11), seed);
        let (weight, components) = mst(&apply_query(&g, &q).unwrap());
        prop_assert_eq!(sketch.extract_detailed(&q).unwrap(), (weight, components));
    }

    #[test]
    fn path_sketch_is_exact(g in graph(true, 12, 4, (0, 20)), seed: u64, count in 0usize..5, s: prop::sample::Index, t: prop::sample::Index) {
        let (s, t) = (s.index(g.n()), t.index(g.n()));
        let sketch = compress_paths(&g, Some((s, t))).unwrap();
        let q = query_for(&g, count, (0, 20), seed);
        let want = shortest_path(&apply_query(&g, &q).unwrap(), s, t).unwrap_or(INFINITY);
        prop_assert_eq!(sketch.extract(&q).unwrap(), want);
    }

    #[test]
    fn inserting_edges_never_hurts(g in graph(false, 12, 4, (1, 1)), seed: u64) {
        // matching size and MST weight are monotone in opposite directions
        let q = query_for(&g, 3, (1, 1), seed);
        let more = matching_size(&apply_query(&g, &q).unwrap()).unwrap();
        prop_assert!(more >= matching_size(&g).unwrap());
        let sketch = compress_mst(&g).unwrap();
        let (w0, c0) = sketch.extract_detailed(&Query::empty()).unwrap();
        let (w1, c1) = sketch.extract_detailed(&q).unwrap();
        prop_assert!(c1 <= c0);
        if c1 == c0 {
            prop_assert!(w1 <= w0);
        }
    }
}
