//! Independent oracles shared by the integration tests. Nothing here calls
//! the visit-probability or intersection code under test.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use num_rational::Ratio;
use sitnet_core::{GraphFamily, Network, PathKernel};

pub type Q = Ratio<i128>;

/// Root-to-absorption paths of a kernel with their probabilities, by depth
/// first search over the rows.
pub fn enumerate_paths(kernel: &PathKernel<'_>) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(vec![kernel.root()], 1.0)];
    while let Some((path, prob)) = stack.pop() {
        let last = *path.last().unwrap();
        let row = kernel.row(last);
        if row.is_empty() {
            out.push((path, prob));
            continue;
        }
        for step in row.iter().rev() {
            let mut next = path.clone();
            next.push(step.to);
            stack.push((next, prob * step.prob));
        }
    }
    out
}

fn directed_edges(path: &[usize]) -> HashSet<(usize, usize)> {
    path.windows(2).map(|w| (w[0], w[1])).collect()
}

fn counts(a: &[usize], b: &[usize]) -> (usize, usize) {
    let ea = directed_edges(a);
    let edge = b.windows(2).filter(|w| ea.contains(&(w[0], w[1]))).count();
    let va: HashSet<usize> = a.iter().copied().collect();
    let vertex = b.iter().filter(|v| va.contains(v)).count();
    (edge, vertex)
}

/// `(E|α ∩ β|_E, E|α ∩ β|_V)` summed over every ordered pair of paths.
pub fn brute_force_pairs(paths: &[(Vec<usize>, f64)]) -> (f64, f64) {
    let mut edge = 0.0;
    let mut vertex = 0.0;
    for (a, pa) in paths {
        for (b, pb) in paths {
            let (e, v) = counts(a, b);
            edge += pa * pb * e as f64;
            vertex += pa * pb * v as f64;
        }
    }
    (edge, vertex)
}

fn bfs_distance(net: &Network) -> Vec<usize> {
    let mut dist = vec![usize::MAX; net.vertex_count()];
    dist[net.root()] = 0;
    let mut queue = VecDeque::from([net.root()]);
    while let Some(u) = queue.pop_front() {
        for inc in net.incident(u) {
            if dist[inc.neighbor] == usize::MAX {
                dist[inc.neighbor] = dist[u] + 1;
                queue.push_back(inc.neighbor);
            }
        }
    }
    dist
}

/// Paths of the walk that steps only to neighbors farther from the root,
/// choosing among them in proportion to (integral) conductance. On diamonds
/// and trees this is exactly the unit current flow's walk.
pub fn rational_paths(net: &Network) -> Vec<(Vec<usize>, Q)> {
    let dist = bfs_distance(net);
    let mut out = Vec::new();
    let mut stack = vec![(vec![net.root()], Q::from_integer(1))];
    while let Some((path, prob)) = stack.pop() {
        let u = *path.last().unwrap();
        let forward: Vec<(usize, i128)> = net
            .incident(u)
            .iter()
            .filter(|inc| dist[inc.neighbor] == dist[u] + 1)
            .map(|inc| {
                let c = net.edge(inc.edge).conductance;
                assert_eq!(c.fract(), 0.0, "rational oracle needs integral conductances");
                (inc.neighbor, c as i128)
            })
            .collect();
        if forward.is_empty() || Some(u) == net.sink() {
            out.push((path, prob));
            continue;
        }
        let total: i128 = forward.iter().map(|&(_, c)| c).sum();
        for (v, c) in forward {
            let mut next = path.clone();
            next.push(v);
            stack.push((next, prob * Q::new(c, total)));
        }
    }
    out
}

pub fn rational_pairs(paths: &[(Vec<usize>, Q)]) -> (Q, Q) {
    let mut edge = Q::from_integer(0);
    let mut vertex = Q::from_integer(0);
    for (a, pa) in paths {
        for (b, pb) in paths {
            let (e, v) = counts(a, b);
            edge += pa * pb * Q::from_integer(e as i128);
            vertex += pa * pb * Q::from_integer(v as i128);
        }
    }
    (edge, vertex)
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn pow2(k: u32) -> Q {
    Q::from_integer(1i128 << k)
}

/// `2 - 2^{1-N}`.
pub fn diamond_edge_closed(n: u32) -> Q {
    Q::from_integer(2) - Q::new(2, 1i128 << n)
}

/// `N + 2 - 2^{-N}`.
pub fn diamond_vertex_closed(n: u32) -> Q {
    Q::from_integer(n as i128 + 2) - Q::new(1, 1i128 << n)
}

/// Small networks used wherever a property is checked "on every net".
pub fn corpus() -> Vec<(String, Network)> {
    let mut nets = Vec::new();
    let mut add = |family: GraphFamily, r: usize| {
        let net = sitnet_core::exhaustion(family, r).unwrap();
        nets.push((format!("{family} r={r}"), net));
    };
    for l in [1, 2, 7] {
        add(GraphFamily::Path, l);
    }
    for n in 1..=6 {
        add(GraphFamily::Diamond, n);
    }
    for d in [1, 3, 6] {
        add(GraphFamily::BinaryTree, d);
    }
    for (dim, r) in [(1, 5), (2, 3), (2, 6), (3, 3), (3, 5), (4, 2)] {
        add(GraphFamily::Lattice { dim }, r);
    }
    nets
}
