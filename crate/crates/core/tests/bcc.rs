use std::collections::BTreeSet;

use concur_graph::bcc::{classify_edge, compute_low_high, run_bcc, spanning_forest, EdgeKind};
use concur_graph::cc::CcParams;
use concur_graph::euler::{euler_tour, validate_tour};
use concur_graph::gen::{gen_random_connected, gen_random_undirected, rng};
use concur_graph::oracles::{hopcroft_tarjan_bcc, BccSummary};
use concur_graph::reach::ReachParams;
use concur_graph::Graph;
use proptest::prelude::*;
use rand::Rng;

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap()
}

fn connected_within(g: &Graph, set: u32, removed: Option<u32>) -> bool {
    let members: Vec<u32> = (0..g.num_vertices() as u32)
        .filter(|&v| set >> v & 1 == 1 && Some(v) != removed)
        .collect();
    let Some(&start) = members.first() else { return true };
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &u in g.out_neighbors(v) {
            if set >> u & 1 == 1 && Some(u) != removed && seen >> u & 1 == 0 {
                seen |= 1 << u;
                stack.push(u);
            }
        }
    }
    members.iter().all(|&v| seen >> v & 1 == 1)
}

/// Biconnected components straight from the definition: maximal vertex sets
/// of size >= 2 that induce a connected subgraph with no cut vertex.
fn brute_force_bcc(g: &Graph) -> BccSummary {
    let n = g.num_vertices();
    assert!(n <= 16);
    let good = |s: u32| -> bool {
        let k = s.count_ones();
        k >= 2 && connected_within(g, s, None) && (k == 2 || (0..n as u32).filter(|&v| s >> v & 1 == 1).all(|v| connected_within(g, s, Some(v))))
    };
    let cands: Vec<u32> = (1u32..1 << n).filter(|&s| good(s)).collect();
    let maximal: Vec<u32> = cands
        .iter()
        .copied()
        .filter(|&s| !cands.iter().any(|&t| t != s && t & s == s))
        .collect();
    let components: Vec<Vec<u32>> = maximal
        .iter()
        .map(|&s| (0..n as u32).filter(|&v| s >> v & 1 == 1).collect())
        .collect();
    let mut count = vec![0; n];
    for c in &components {
        for &v in c {
            count[v as usize] += 1;
        }
    }
    let mut s = BccSummary {
        articulation_points: (0..n as u32).filter(|&v| count[v as usize] >= 2).collect(),
        bridges: components.iter().filter(|c| c.len() == 2).map(|c| (c[0], c[1])).collect(),
        components,
    };
    s.normalize();
    s
}

fn small_random(n: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let p: f64 = r.gen_range(0.1..0.6);
    let mut e = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if r.gen_bool(p) {
                e.push((u, v));
            }
        }
    }
    Graph::undirected_from_edges(n, &e).unwrap()
}

#[test]
fn oracle_matches_definition_on_tiny_graphs() {
    for seed in 0..500u64 {
        let n = 1 + (seed % 9) as usize;
        let g = small_random(n, seed);
        assert_eq!(hopcroft_tarjan_bcc(&g), brute_force_bcc(&g), "seed {seed}");
    }
}

#[test]
fn parallel_matches_oracle_on_tiny_graphs() {
    for seed in 0..300u64 {
        let g = small_random(1 + (seed % 12) as usize, seed);
        let p = CcParams { seed, ..CcParams::default() };
        assert_eq!(run_bcc(&g, &p).unwrap().labeling.summary(), hopcroft_tarjan_bcc(&g), "seed {seed}");
    }
}

#[test]
fn nine_vertex_example() {
    // The spanning tree 1-2, 2-5, 2-3, 2-4, 1-6, 6-7, 6-8, 8-9 plus non-tree
    // edges closing cycles under 2 and 6; vertex k is stored as k-1.
    let e: Vec<_> = [(1, 2), (2, 5), (2, 3), (2, 4), (1, 6), (6, 7), (6, 8), (8, 9), (3, 4), (4, 5), (7, 8), (9, 6)]
        .iter()
        .map(|&(u, v)| (u - 1, v - 1))
        .collect();
    let g = Graph::undirected_from_edges(9, &e).unwrap();
    let r = run_bcc(&g, &CcParams::default()).unwrap();
    let s = r.labeling.summary();
    assert_eq!(s, hopcroft_tarjan_bcc(&g));
    assert_eq!(s.components, vec![vec![0, 1], vec![0, 5], vec![1, 2, 3, 4], vec![5, 6, 7, 8]]);
    assert_eq!(s.articulation_points, vec![0, 1, 5]);
    assert!(r.labeling.num_labels() + r.labeling.label.len() <= 2 * 9);
}

#[test]
fn random_graphs_match_oracle_across_threads() {
    for seed in 0..40u64 {
        let n = 20 + (seed as usize * 61) % 900;
        let g = if seed % 2 == 0 {
            gen_random_undirected(n, n + (seed as usize % 3) * n / 2, seed).unwrap()
        } else {
            gen_random_connected(n, n / 3, seed).unwrap()
        };
        let expect = hopcroft_tarjan_bcc(&g);
        for (threads, tau) in [(1, 512), (4, 1), (3, 16)] {
            let p = CcParams {
                reach: ReachParams::with_tau(tau),
                seed,
                ..CcParams::default()
            };
            let got = pool(threads).install(|| run_bcc(&g, &p).unwrap());
            assert_eq!(got.labeling.summary(), expect, "seed {seed} threads {threads}");
            let labels = got.labeling.num_labels();
            assert!(labels <= 2 * n);
        }
    }
}

#[test]
fn tours_and_low_high_match_brute_force() {
    for seed in 0..15u64 {
        let n = 300;
        let g = gen_random_undirected(n, 450, seed).unwrap();
        let (forest, tour) = spanning_forest(&g, &CcParams { seed, ..CcParams::default() }).unwrap();
        let tree: Vec<_> = forest.edges.clone();
        validate_tour(n, &tree, &tour).unwrap();
        let lh = compute_low_high(&g, &tour);
        let tree_set: BTreeSet<(u32, u32)> = tree.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        for v in 0..n as u32 {
            let sub: Vec<u32> = (0..n as u32).filter(|&u| tour.is_ancestor(v, u)).collect();
            let mut lo = usize::MAX;
            let mut hi = 0;
            for &u in &sub {
                lo = lo.min(tour.first[u as usize]);
                hi = hi.max(tour.first[u as usize]);
                for &w in g.out_neighbors(u) {
                    if !tree_set.contains(&(u, w)) {
                        lo = lo.min(tour.first[w as usize]);
                        hi = hi.max(tour.first[w as usize]);
                    }
                }
            }
            assert_eq!((lh.low[v as usize], lh.high[v as usize]), (lo, hi), "seed {seed} v {v}");
            assert!(lh.low[v as usize] <= tour.first[v as usize] && tour.first[v as usize] <= lh.high[v as usize]);
        }
        // Classification is exhaustive and exclusive; tree edges are exactly the forest.
        for (u, v) in g.undirected_edges() {
            let k = classify_edge(&tour, &lh, u, v);
            assert_eq!(matches!(k, EdgeKind::Tree { .. }), tree_set.contains(&(u, v)));
        }
    }
}

#[test]
fn random_tree_tours_are_valid() {
    for seed in 0..10u64 {
        let mut r = rng(seed);
        let e: Vec<(u32, u32)> = (1..200u32).map(|v| (r.gen_range(0..v), v)).collect();
        let t = euler_tour(200, &e);
        validate_tour(200, &e, &t).unwrap();
        assert_eq!(t.order.len(), 2 * 199 + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bcc_matches_oracle(n in 1usize..80, factor in 0usize..3, seed in any::<u64>(), tau in 1usize..8) {
        let g = gen_random_undirected(n, (n * factor).min(n * (n - 1)), seed).unwrap();
        let p = CcParams { reach: ReachParams::with_tau(tau), seed, ..CcParams::default() };
        prop_assert_eq!(run_bcc(&g, &p).unwrap().labeling.summary(), hopcroft_tarjan_bcc(&g));
    }
}
