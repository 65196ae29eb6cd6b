//! Intersections of independent path pairs and the flows a path measure
//! induces.
//!
//! For two paths `α`, `β` from the root, `|α ∩ β|_E` counts the oriented
//! edges traversed by both and `|α ∩ β|_V` the shared vertices. Under a
//! kernel's walk their expectations over independent pairs are
//! `Σ_e p(e)²` and `Σ_v g(v)²`.

mod checks;
mod report;
mod scan;

pub use checks::{
    flow_checks, lemma_checks, perturbation_checks, sit_energy_bound_check, vertex_bound_check, CheckRecord, BOUND_TOL,
    DIVERGENCE_TOL, VISIT_TOL,
};
pub use report::{analyze, verify_flow, AnalysisOptions, GraphMeta, IntersectionReport, McConfig, McReport};
pub use scan::{classify_trend, format_sig12, sit_scan, ScanMode, ScanRow, ScanTable, Trend, SCAN_CSV_HEADER};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::measure::{Estimate, PathKernel, SimplePath, VisitProfile};
use crate::rng;
use crate::solver::Flow;

fn same_network(a: &SimplePath<'_>, b: &SimplePath<'_>) -> Result<()> {
    if std::ptr::eq(a.network(), b.network()) || a.network() == b.network() {
        Ok(())
    } else {
        Err(Error::NetworkMismatch)
    }
}

/// Number of oriented edges traversed by both paths.
pub fn edge_intersection(a: &SimplePath<'_>, b: &SimplePath<'_>) -> Result<usize> {
    same_network(a, b)?;
    let edges: HashSet<(usize, usize)> = a.edges().collect();
    Ok(b.edges().filter(|e| edges.contains(e)).count())
}

/// Number of undirected edges traversed by both paths, in either direction.
pub fn undirected_edge_intersection(a: &SimplePath<'_>, b: &SimplePath<'_>) -> Result<usize> {
    same_network(a, b)?;
    let key = |(x, y): (usize, usize)| (x.min(y), x.max(y));
    let edges: HashSet<(usize, usize)> = a.edges().map(key).collect();
    Ok(b.edges().filter(|&e| edges.contains(&key(e))).count())
}

/// Number of vertices visited by both paths.
pub fn vertex_intersection(a: &SimplePath<'_>, b: &SimplePath<'_>) -> Result<usize> {
    same_network(a, b)?;
    let vertices: HashSet<usize> = a.vertices().iter().copied().collect();
    Ok(b.vertices().iter().filter(|v| vertices.contains(v)).count())
}

/// Reusable scratch for counting intersections of many path pairs on one
/// network without allocating per pair.
struct PairCounter {
    stamp: Vec<u32>,
    next: Vec<usize>,
    round: u32,
}

impl PairCounter {
    fn new(n: usize) -> Self {
        PairCounter {
            stamp: vec![0; n],
            next: vec![usize::MAX; n],
            round: 0,
        }
    }

    /// `(edge, vertex)` intersection counts.
    fn count(&mut self, a: &[usize], b: &[usize]) -> (u64, u64) {
        self.round += 1;
        for (k, &v) in a.iter().enumerate() {
            self.stamp[v] = self.round;
            self.next[v] = a.get(k + 1).copied().unwrap_or(usize::MAX);
        }
        let mut edges = 0;
        let mut vertices = 0;
        for (k, &v) in b.iter().enumerate() {
            if self.stamp[v] == self.round {
                vertices += 1;
                if let Some(&w) = b.get(k + 1) {
                    if self.next[v] == w {
                        edges += 1;
                    }
                }
            }
        }
        (edges, vertices)
    }
}

/// Exact `E|α ∩ β|_E = Σ_e p(e)²` and `E|α ∩ β|_V = Σ_v g(v)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactIntersection {
    pub edge: f64,
    pub vertex: f64,
}

pub fn expected_intersection_exact(profile: &VisitProfile) -> ExactIntersection {
    ExactIntersection {
        edge: profile.traversals.iter().map(|t| t.prob * t.prob).sum(),
        vertex: profile.visits.iter().map(|g| g * g).sum(),
    }
}

/// Monte Carlo estimates over independent pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McIntersection {
    pub edge: Estimate,
    pub vertex: Estimate,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: u128,
    sum_sq: u128,
}

impl Moments {
    fn add(&mut self, x: u64) {
        self.sum += x as u128;
        self.sum_sq += (x as u128) * (x as u128);
    }

    fn merge(self, other: Moments) -> Moments {
        Moments {
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }

    fn estimate(self, n: usize) -> Estimate {
        let nf = n as f64;
        let mean = self.sum as f64 / nf;
        // integer moments keep the centred sum exact enough for zero-variance cases
        let centred = self.sum_sq as f64 - (self.sum as f64) * mean;
        let variance = (centred / (nf - 1.0)).max(0.0);
        Estimate {
            mean,
            std_err: (variance / nf).sqrt(),
            samples: n,
        }
    }
}

/// Sample means and standard errors of both intersection counts over
/// `pairs` independent pairs of walks.
pub fn expected_intersection_mc(kernel: &PathKernel<'_>, pairs: usize, seed: u64) -> Result<McIntersection> {
    if pairs < 2 {
        return Err(Error::param("n_pairs", "at least two pairs are required"));
    }
    let n = kernel.network().vertex_count();
    let (edge, vertex) = rng::chunked(pairs, seed, |rng, count| {
        let mut counter = PairCounter::new(n);
        let mut edge = Moments::default();
        let mut vertex = Moments::default();
        for _ in 0..count {
            let a = kernel.sample_with(rng);
            let b = kernel.sample_with(rng);
            let (e, v) = counter.count(a.vertices(), b.vertices());
            edge.add(e);
            vertex.add(v);
        }
        (edge, vertex)
    })
    .into_iter()
    .fold((Moments::default(), Moments::default()), |(e, v), (ce, cv)| {
        (e.merge(ce), v.merge(cv))
    });
    Ok(McIntersection {
        edge: edge.estimate(pairs),
        vertex: vertex.estimate(pairs),
    })
}

/// `F(u, v) = P[(u,v) ∈ γ] - P[(v,u) ∈ γ]` from exact traversal
/// probabilities; its strength is the root divergence.
pub fn flow_from_measure<'n>(net: &'n Network, profile: &VisitProfile) -> Result<Flow<'n>> {
    let mut values = vec![0.0; net.edge_count()];
    for t in &profile.traversals {
        if net.edge(t.edge).u == t.from {
            values[t.edge] += t.prob;
        } else {
            values[t.edge] -= t.prob;
        }
    }
    Flow::with_root_strength(net, values)
}

/// The same antisymmetrized traversal frequencies from a sample of paths.
pub fn flow_from_paths<'n>(paths: &[SimplePath<'n>]) -> Result<Flow<'n>> {
    let first = paths
        .first()
        .ok_or_else(|| Error::param("paths", "at least one path is required"))?;
    let net = first.network();
    let mut counts = vec![0i64; net.edge_count()];
    for path in paths {
        same_network(first, path)?;
        for (x, y) in path.edges() {
            let e = net.edge_between(x, y).ok_or(Error::NetworkMismatch)?;
            counts[e] += if net.edge(e).u == x { 1 } else { -1 };
        }
    }
    let n = paths.len() as f64;
    Flow::with_root_strength(net, counts.into_iter().map(|c| c as f64 / n).collect())
}

/// Samples `samples` walks (seeded streams) and returns their empirical flow.
pub fn flow_from_samples<'n>(kernel: &PathKernel<'n>, samples: usize, seed: u64) -> Result<Flow<'n>> {
    if samples == 0 {
        return Err(Error::param("n_samples", "at least one sample is required"));
    }
    let net = kernel.network();
    let counts = rng::chunked(samples, seed, |rng, count| {
        let mut counts = vec![0i64; net.edge_count()];
        for _ in 0..count {
            let path = kernel.sample_with(rng);
            for w in path.vertices().windows(2) {
                let e = net.edge_between(w[0], w[1]).expect("kernel steps follow edges");
                counts[e] += if net.edge(e).u == w[0] { 1 } else { -1 };
            }
        }
        counts
    })
    .into_iter()
    .reduce(|mut acc, c| {
        acc.iter_mut().zip(c).for_each(|(a, b)| *a += b);
        acc
    })
    .unwrap_or_default();
    let n = samples as f64;
    Flow::with_root_strength(net, counts.into_iter().map(|c| c as f64 / n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{diamond_middle_id as mid, diamond_skeleton_id as skel, make_diamond_graph, make_path_graph};
    use crate::measure::{build_kernel, visit_probability};
    use crate::solver::{unit_current_flow, DEFAULT_TOL};

    #[test]
    fn counts_on_small_paths() {
        let net = make_path_graph(2).unwrap();
        let a = SimplePath::new(&net, vec![0, 1, 2]).unwrap();
        assert_eq!(edge_intersection(&a, &a).unwrap(), 2);
        assert_eq!(vertex_intersection(&a, &a).unwrap(), 3);

        let d1 = make_diamond_graph(1).unwrap();
        let a = SimplePath::new(&d1, vec![0, mid(1, 0), 3]).unwrap();
        let b = SimplePath::new(&d1, vec![0, mid(1, 1), 3]).unwrap();
        assert_eq!(edge_intersection(&a, &b).unwrap(), 0);
        assert_eq!(vertex_intersection(&a, &b).unwrap(), 2);

        let d2 = make_diamond_graph(2).unwrap();
        let a = SimplePath::new(&d2, vec![0, mid(1, 1), skel(1), mid(2, 0), skel(2)]).unwrap();
        let b = SimplePath::new(&d2, vec![0, mid(1, 1), skel(1), mid(2, 3), skel(2)]).unwrap();
        assert_eq!(edge_intersection(&a, &b).unwrap(), 2);
        assert_eq!(vertex_intersection(&a, &b).unwrap(), 4);
        let mut counter = PairCounter::new(d2.vertex_count());
        assert_eq!(counter.count(a.vertices(), b.vertices()), (2, 4));
        assert_eq!(counter.count(a.vertices(), a.vertices()), (4, 5));
    }

    #[test]
    fn orientation_matters() {
        // square 0-1-3, 0-2-3 plus chord 1-2
        let net = crate::Network::new(
            4,
            [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
            0,
            Some(3),
        )
        .unwrap();
        let a = SimplePath::new(&net, vec![0, 1, 2, 3]).unwrap();
        let b = SimplePath::new(&net, vec![0, 2, 1, 3]).unwrap();
        assert_eq!(edge_intersection(&a, &b).unwrap(), 0);
        assert_eq!(undirected_edge_intersection(&a, &b).unwrap(), 1);
    }

    #[test]
    fn mismatched_networks() {
        let n1 = make_path_graph(2).unwrap();
        let n2 = make_path_graph(3).unwrap();
        let a = SimplePath::new(&n1, vec![0, 1]).unwrap();
        let b = SimplePath::new(&n2, vec![0, 1]).unwrap();
        assert!(matches!(edge_intersection(&a, &b), Err(Error::NetworkMismatch)));
        assert!(matches!(vertex_intersection(&a, &b), Err(Error::NetworkMismatch)));
    }

    #[test]
    fn path_graph_is_deterministic() {
        let net = make_path_graph(6).unwrap();
        let k = build_kernel(&unit_current_flow(&net, DEFAULT_TOL).unwrap()).unwrap();
        let exact = expected_intersection_exact(&visit_probability(&k));
        assert!((exact.edge - 6.0).abs() < 1e-12);
        assert!((exact.vertex - 7.0).abs() < 1e-12);
        let mc = expected_intersection_mc(&k, 50, 3).unwrap();
        assert_eq!((mc.edge.mean, mc.edge.std_err), (6.0, 0.0));
        assert_eq!((mc.vertex.mean, mc.vertex.std_err), (7.0, 0.0));
        assert!(expected_intersection_mc(&k, 1, 3).is_err());
    }

    #[test]
    fn reconstruction_recovers_flow() {
        let net = make_diamond_graph(3).unwrap();
        let flow = unit_current_flow(&net, DEFAULT_TOL).unwrap();
        let k = build_kernel(&flow).unwrap();
        let rec = flow_from_measure(&net, &visit_probability(&k)).unwrap();
        for (a, b) in flow.values().iter().zip(rec.values()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((rec.strength() - 1.0).abs() < 1e-9);

        let paths: Vec<_> = (0..200).map(|s| crate::measure::sample_path(&k, s)).collect();
        let empirical = flow_from_paths(&paths).unwrap();
        assert_eq!(empirical.strength(), 1.0);
        assert!(empirical.max_interior_divergence() < 1e-12);
        assert!(flow_from_paths(&[]).is_err());
        assert!(flow_from_samples(&k, 0, 1).is_err());
    }
}
