use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use sitnet_core::intersection::{expected_intersection_exact, expected_intersection_mc};
use sitnet_core::measure::{build_kernel, visit_probability};
use sitnet_core::solver::unit_current_flow;
use sitnet_core::{exhaustion, GraphFamily, DEFAULT_TOL};

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("unit_current_flow");
    for (label, family, r) in [
        ("diamond", GraphFamily::Diamond, 10),
        ("lattice2", GraphFamily::Lattice { dim: 2 }, 40),
        ("lattice3", GraphFamily::Lattice { dim: 3 }, 14),
    ] {
        let net = exhaustion(family, r).unwrap();
        group.bench_with_input(BenchmarkId::new(label, r), &net, |b, net| {
            b.iter(|| unit_current_flow(black_box(net), DEFAULT_TOL).unwrap().energy())
        });
    }
    group.finish();
}

fn exact_profile(c: &mut Criterion) {
    let net = exhaustion(GraphFamily::Lattice { dim: 3 }, 14).unwrap();
    let flow = unit_current_flow(&net, DEFAULT_TOL).unwrap();
    c.bench_function("kernel_and_profile/lattice3/14", |b| {
        b.iter(|| {
            let kernel = build_kernel(black_box(&flow)).unwrap();
            expected_intersection_exact(&visit_probability(&kernel))
        })
    });
}

fn sampled_pairs(c: &mut Criterion) {
    let net = exhaustion(GraphFamily::BinaryTree, 10).unwrap();
    let flow = unit_current_flow(&net, DEFAULT_TOL).unwrap();
    let kernel = build_kernel(&flow).unwrap();
    c.bench_function("mc_pairs/tree10/20000", |b| {
        b.iter(|| expected_intersection_mc(black_box(&kernel), 20_000, 1).unwrap())
    });
}

criterion_group!(benches, solve, exact_profile, sampled_pairs);
criterion_main!(benches);
