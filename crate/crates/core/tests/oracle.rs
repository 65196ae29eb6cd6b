mod common;

use common::*;
use sitnet_core::graph::{make_binary_tree, make_diamond_graph};
use sitnet_core::intersection::expected_intersection_exact;
use sitnet_core::measure::{build_kernel, visit_probability, visit_probability_series};
use sitnet_core::solver::unit_current_flow;
use sitnet_core::DEFAULT_TOL;

#[test]
fn rational_oracle_matches_diamond_closed_forms() {
    for n in 1..=3u32 {
        let net = make_diamond_graph(n as usize).unwrap();
        let paths = rational_paths(&net);
        assert_eq!(paths.len(), 1usize << (n * (n + 1) / 2));
        let (edge, vertex) = rational_pairs(&paths);
        assert_eq!(edge, diamond_edge_closed(n), "N={n}");
        assert_eq!(vertex, diamond_vertex_closed(n), "N={n}");
    }
}

#[test]
fn rational_oracle_tree_values() {
    // every level carries total traversal mass one, and the merged last level
    // has 2^{D-1} edges
    for d in 1..=4u32 {
        let net = make_binary_tree(d as usize).unwrap();
        let (edge, vertex) = rational_pairs(&rational_paths(&net));
        assert_eq!(edge, Q::from_integer(1));
        let mut expected = Q::from_integer(1) + Q::from_integer(1);
        for k in 1..d {
            expected += Q::new(1, 1i128 << k);
        }
        assert_eq!(vertex, expected, "D={d}");
    }
}

#[test]
fn brute_force_agrees_with_dynamic_programming() {
    let nets: Vec<_> = (1..=3)
        .map(|n| make_diamond_graph(n).unwrap())
        .chain((1..=4).map(|d| make_binary_tree(d).unwrap()))
        .collect();
    for net in &nets {
        let flow = unit_current_flow(net, DEFAULT_TOL).unwrap();
        let kernel = build_kernel(&flow).unwrap();
        let paths = enumerate_paths(&kernel);
        let (edge, vertex) = brute_force_pairs(&paths);
        let exact = expected_intersection_exact(&visit_probability(&kernel));
        assert!((edge - exact.edge).abs() <= 1e-12, "{edge} vs {}", exact.edge);
        assert!((vertex - exact.vertex).abs() <= 1e-12, "{vertex} vs {}", exact.vertex);

        let (r_edge, r_vertex) = rational_pairs(&rational_paths(net));
        assert!((exact.edge - to_f64(r_edge)).abs() <= 1e-12);
        assert!((exact.vertex - to_f64(r_vertex)).abs() <= 1e-12);
    }
}

#[test]
fn series_cross_check() {
    for net in [make_diamond_graph(4).unwrap(), make_binary_tree(5).unwrap()] {
        let kernel = build_kernel(&unit_current_flow(&net, DEFAULT_TOL).unwrap()).unwrap();
        let dp = visit_probability(&kernel);
        let series = visit_probability_series(&kernel, net.vertex_count() + 1);
        for (a, b) in dp.visits.iter().zip(&series) {
            assert!((a - b).abs() < 1e-12);
        }
        // truncated too early, mass is missing at the sink
        let short = visit_probability_series(&kernel, 2);
        assert!(short[net.sink().unwrap()] < 0.5);
    }
}

#[test]
fn visit_probabilities_of_enumerated_paths() {
    let net = make_diamond_graph(3).unwrap();
    let kernel = build_kernel(&unit_current_flow(&net, DEFAULT_TOL).unwrap()).unwrap();
    let paths = enumerate_paths(&kernel);
    let total: f64 = paths.iter().map(|(_, p)| p).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let profile = visit_probability(&kernel);
    for v in 0..net.vertex_count() {
        let g: f64 = paths.iter().filter(|(p, _)| p.contains(&v)).map(|(_, p)| p).sum();
        assert!((g - profile.visit(v)).abs() < 1e-12, "vertex {v}");
    }
}
