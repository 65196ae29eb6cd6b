//! Statistical checks use 4 standard errors: a two-sided false failure rate
//! of about 6e-5 per comparison, with fixed seeds so reruns are stable.

use sitnet_core::graph::{diamond_middle_id, make_binary_tree, make_diamond_graph};
use sitnet_core::intersection::{
    edge_intersection, expected_intersection_exact, expected_intersection_mc, flow_from_samples, vertex_intersection,
};
use sitnet_core::measure::{build_kernel, empirical_visit_frequency, sample_path, visit_probability};
use sitnet_core::solver::unit_current_flow;
use sitnet_core::DEFAULT_TOL;

#[test]
fn pair_estimates_within_four_standard_errors() {
    for (net, seed) in [(make_diamond_graph(3).unwrap(), 11), (make_binary_tree(6).unwrap(), 12)] {
        let kernel = build_kernel(&unit_current_flow(&net, DEFAULT_TOL).unwrap()).unwrap();
        let exact = expected_intersection_exact(&visit_probability(&kernel));
        let mc = expected_intersection_mc(&kernel, 100_000, seed).unwrap();
        assert!(mc.edge.z_score(exact.edge) < 4.0, "{:?} vs {}", mc.edge, exact.edge);
        assert!(
            mc.vertex.z_score(exact.vertex) < 4.0,
            "{:?} vs {}",
            mc.vertex,
            exact.vertex
        );
    }
}

#[test]
fn middle_vertex_visit_frequency() {
    let net = make_diamond_graph(2).unwrap();
    let kernel = build_kernel(&unit_current_flow(&net, DEFAULT_TOL).unwrap()).unwrap();
    let v = diamond_middle_id(2, 1);
    let est = empirical_visit_frequency(&kernel, v, 100_000, 3).unwrap();
    assert!(est.z_score(0.25) < 4.0, "{est:?}");
    assert!(empirical_visit_frequency(&kernel, v, 0, 3).is_err());
}

#[test]
fn sampled_flow_within_four_standard_errors() {
    let net = make_diamond_graph(2).unwrap();
    let flow = unit_current_flow(&net, DEFAULT_TOL).unwrap();
    let kernel = build_kernel(&flow).unwrap();
    let samples = 100_000;
    let sampled = flow_from_samples(&kernel, samples, 21).unwrap();
    for (&est, &exact) in sampled.values().iter().zip(flow.values()) {
        // each edge is crossed in one direction only, so the count is binomial
        let p = exact.abs();
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        if se == 0.0 {
            assert_eq!(est, exact);
        } else {
            assert!((est - exact).abs() < 4.0 * se, "{est} vs {exact}");
        }
    }
}

#[test]
fn pathwise_vertex_count_dominates_edge_count() {
    let net = make_diamond_graph(4).unwrap();
    let kernel = build_kernel(&unit_current_flow(&net, DEFAULT_TOL).unwrap()).unwrap();
    for seed in 0..200u64 {
        let a = sample_path(&kernel, 2 * seed);
        let b = sample_path(&kernel, 2 * seed + 1);
        assert!(a.is_simple() && b.is_simple());
        assert!(vertex_intersection(&a, &b).unwrap() >= edge_intersection(&a, &b).unwrap());
    }
}

#[test]
fn reruns_are_identical() {
    let net = make_binary_tree(6).unwrap();
    let kernel = build_kernel(&unit_current_flow(&net, DEFAULT_TOL).unwrap()).unwrap();
    let a = expected_intersection_mc(&kernel, 50_000, 99).unwrap();
    let b = expected_intersection_mc(&kernel, 50_000, 99).unwrap();
    assert_eq!(a, b);
    let c = expected_intersection_mc(&kernel, 50_000, 100).unwrap();
    assert_ne!(a, c);

    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let single = pool.install(|| expected_intersection_mc(&kernel, 50_000, 99).unwrap());
    assert_eq!(a, single);
}
