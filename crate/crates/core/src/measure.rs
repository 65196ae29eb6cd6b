//! The path measure induced by a flow.
//!
//! From a flow `F` with no positive loops, every vertex `u` with positive
//! outflow `f(u) = Σ_{F(u,w) > 0} F(u,w)` gets the transition row
//! `Q(u, w) = F(u, w) / f(u)` over its positive out-edges. Walks of `Q` from
//! the root never revisit a vertex and stop at the sink or at any vertex
//! without positive outflow (absorption stands in for escaping to infinity).
//!
//! The visit probability `g(v)` of such a walk is computed exactly by one pass
//! over the support DAG in topological order.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Network;
use crate::rng;
use crate::solver::{positive_flow_order, Flow, EPS_FLOW};

/// Tolerance on `Σ_w Q(u, w) = 1`.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub to: usize,
    pub edge: usize,
    pub prob: f64,
}

/// Sub-stochastic transition kernel on a network whose support is acyclic
/// and never enters the root.
#[derive(Debug, Clone)]
pub struct PathKernel<'n> {
    net: &'n Network,
    rows: Vec<Vec<Step>>,
    outflow: Option<Vec<f64>>,
    order: Vec<usize>,
}

/// Sum of `F(v, w)` over neighbors with `F(v, w) > EPS_FLOW`.
pub fn positive_outflow(flow: &Flow<'_>, v: usize) -> Result<f64> {
    let net = flow.network();
    if !net.contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    Ok(net
        .incident(v)
        .iter()
        .map(|inc| flow.along(inc.edge, v))
        .filter(|&f| f > EPS_FLOW)
        .sum())
}

/// Sum of `F(w, v)` over neighbors with `F(w, v) > EPS_FLOW`.
pub fn positive_inflow(flow: &Flow<'_>, v: usize) -> Result<f64> {
    let net = flow.network();
    if !net.contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    Ok(net
        .incident(v)
        .iter()
        .map(|inc| -flow.along(inc.edge, v))
        .filter(|&f| f > EPS_FLOW)
        .sum())
}

/// Builds the kernel `Q(u, w) = F(u, w) / f(u)`. Fails on a positive flow
/// loop (reported with its vertices) or on positive flow into the root.
pub fn build_kernel<'n>(flow: &Flow<'n>) -> Result<PathKernel<'n>> {
    let net = flow.network();
    let order = positive_flow_order(flow).map_err(Error::PositiveLoop)?;
    let root = net.root();
    if let Some(inc) = net
        .incident(root)
        .iter()
        .find(|inc| flow.along(inc.edge, inc.neighbor) > EPS_FLOW)
    {
        return Err(Error::RootInflow(inc.neighbor));
    }

    let n = net.vertex_count();
    let mut rows = vec![Vec::new(); n];
    let mut outflow = vec![0.0; n];
    for (u, row) in rows.iter_mut().enumerate() {
        let out: Vec<(usize, usize, f64)> = net
            .incident(u)
            .iter()
            .map(|inc| (inc.neighbor, inc.edge, flow.along(inc.edge, u)))
            .filter(|&(_, _, f)| f > EPS_FLOW)
            .collect();
        let total: f64 = out.iter().map(|&(_, _, f)| f).sum();
        outflow[u] = total;
        *row = out
            .into_iter()
            .map(|(to, edge, f)| Step {
                to,
                edge,
                prob: f / total,
            })
            .collect();
    }
    Ok(PathKernel {
        net,
        rows,
        outflow: Some(outflow),
        order,
    })
}

/// Topological order of the digraph given by the rows' supports.
fn support_order(n: usize, rows: &[Vec<Step>]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; n];
    for step in rows.iter().flatten() {
        indegree[step.to] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for step in &rows[v] {
            indegree[step.to] -= 1;
            if indegree[step.to] == 0 {
                queue.push_back(step.to);
            }
        }
    }
    (order.len() == n).then_some(order)
}

impl<'n> PathKernel<'n> {
    /// Kernel from explicit rows of `(to, probability)`; rows may be empty
    /// (absorbing) and otherwise must sum to one.
    pub fn from_rows(net: &'n Network, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if rows.len() != net.vertex_count() {
            return Err(Error::InvalidKernel(format!(
                "{} rows for {} vertices",
                rows.len(),
                net.vertex_count()
            )));
        }
        let mut checked = Vec::with_capacity(rows.len());
        for (u, row) in rows.into_iter().enumerate() {
            let mut steps = Vec::with_capacity(row.len());
            for (to, prob) in row {
                let edge = net
                    .edge_between(u, to)
                    .ok_or_else(|| Error::InvalidKernel(format!("transition {u} -> {to} is not an edge")))?;
                if to == net.root() {
                    return Err(Error::RootInflow(u));
                }
                if !(prob > 0.0 && prob.is_finite()) {
                    return Err(Error::InvalidKernel(format!(
                        "transition {u} -> {to} has probability {prob}"
                    )));
                }
                steps.push(Step { to, edge, prob });
            }
            let total: f64 = steps.iter().map(|s| s.prob).sum();
            if !steps.is_empty() && (total - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidKernel(format!("row {u} sums to {total}")));
            }
            checked.push(steps);
        }
        let order = support_order(net.vertex_count(), &checked)
            .ok_or_else(|| Error::InvalidKernel("support has a directed cycle".into()))?;
        Ok(PathKernel {
            net,
            rows: checked,
            outflow: None,
            order,
        })
    }

    pub fn network(&self) -> &'n Network {
        self.net
    }

    pub fn root(&self) -> usize {
        self.net.root()
    }

    pub fn row(&self, u: usize) -> &[Step] {
        &self.rows[u]
    }

    /// `Q(u, v)`, zero off the support.
    pub fn prob(&self, u: usize, v: usize) -> f64 {
        self.rows[u].iter().find(|s| s.to == v).map_or(0.0, |s| s.prob)
    }

    /// `f(v)` of the flow the kernel was built from; `None` for kernels given
    /// by explicit rows.
    pub fn outflow(&self, v: usize) -> Option<f64> {
        self.outflow.as_ref().map(|f| f[v])
    }

    /// Topological order of the support digraph.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_absorbing(&self, v: usize) -> bool {
        self.rows[v].is_empty()
    }

    /// Absorbing vertices other than the sink that a walk can reach; walks
    /// stopping there end inside the truncation.
    pub fn interior_dead_ends(&self) -> Vec<usize> {
        let mut reached = vec![false; self.net.vertex_count()];
        reached[self.root()] = true;
        for &u in &self.order {
            if reached[u] {
                for s in &self.rows[u] {
                    reached[s.to] = true;
                }
            }
        }
        (0..self.net.vertex_count())
            .filter(|&v| reached[v] && self.is_absorbing(v) && Some(v) != self.net.sink())
            .collect()
    }

    /// Same support with each row reweighted by independent `Exp(1)` factors
    /// and renormalized (Dirichlet noise multiplied into `Q`).
    pub fn perturbed(&self, rng: &mut impl Rng) -> PathKernel<'n> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let weights: Vec<f64> = row
                    .iter()
                    .map(|s| {
                        let noise: f64 = Exp1.sample(rng);
                        s.prob * noise + f64::MIN_POSITIVE
                    })
                    .collect();
                let total: f64 = weights.iter().sum();
                row.iter()
                    .zip(weights)
                    .map(|(s, w)| Step { prob: w / total, ..*s })
                    .collect()
            })
            .collect();
        PathKernel {
            net: self.net,
            rows,
            outflow: None,
            order: self.order.clone(),
        }
    }

    /// Draws one walk from the root until absorption.
    pub fn sample_with(&self, rng: &mut impl Rng) -> SimplePath<'n> {
        let mut vertices = vec![self.root()];
        let mut u = self.root();
        loop {
            let row = &self.rows[u];
            let Some(last) = row.last() else { break };
            let x: f64 = rng.random();
            let mut acc = 0.0;
            let mut next = last.to;
            for s in row {
                acc += s.prob;
                if x < acc {
                    next = s.to;
                    break;
                }
            }
            vertices.push(next);
            u = next;
        }
        SimplePath {
            net: self.net,
            vertices,
        }
    }
}

/// One walk drawn with a fresh generator seeded by `seed`.
pub fn sample_path<'n>(kernel: &PathKernel<'n>, seed: u64) -> SimplePath<'n> {
    kernel.sample_with(&mut rng::stream(seed, 0))
}

/// A simple path starting at the root.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePath<'n> {
    net: &'n Network,
    vertices: Vec<usize>,
}

impl<'n> SimplePath<'n> {
    pub fn new(net: &'n Network, vertices: Vec<usize>) -> Result<Self> {
        match vertices.first() {
            Some(&first) if first == net.root() => {}
            _ => return Err(Error::param("path", "a path must start at the root")),
        }
        let mut seen = vec![false; net.vertex_count()];
        for &v in &vertices {
            if !net.contains(v) {
                return Err(Error::UnknownVertex(v));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::param("path", format!("vertex {v} is repeated")));
            }
        }
        if let Some(w) = vertices.windows(2).find(|w| net.edge_between(w[0], w[1]).is_none()) {
            return Err(Error::param("path", format!("{} and {} are not adjacent", w[0], w[1])));
        }
        Ok(SimplePath { net, vertices })
    }

    pub fn network(&self) -> &'n Network {
        self.net
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Oriented edges `(γ_k, γ_{k+1})` in path order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    pub fn is_simple(&self) -> bool {
        let mut sorted = self.vertices.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Space-separated vertex ids.
    pub fn to_line(&self) -> String {
        let ids: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        ids.join(" ")
    }
}

/// Probability that a directed edge is traversed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Traversal {
    pub from: usize,
    pub to: usize,
    pub edge: usize,
    pub prob: f64,
}

/// Exact visit probabilities `g(v)` and edge traversal probabilities
/// `p(u, v) = g(u) Q(u, v)` of a kernel's walk.
#[derive(Debug, Clone, PartialEq)]
pub struct VisitProfile {
    pub visits: Vec<f64>,
    /// One entry per support edge, sorted by edge id.
    pub traversals: Vec<Traversal>,
}

impl VisitProfile {
    pub fn visit(&self, v: usize) -> f64 {
        self.visits[v]
    }

    /// `p(from, to)`, zero if the edge is not traversed in that direction.
    pub fn traversal(&self, from: usize, to: usize) -> f64 {
        self.traversals
            .iter()
            .find(|t| t.from == from && t.to == to)
            .map_or(0.0, |t| t.prob)
    }
}

pub fn visit_probability(kernel: &PathKernel<'_>) -> VisitProfile {
    let n = kernel.net.vertex_count();
    let mut visits = vec![0.0; n];
    visits[kernel.root()] = 1.0;
    let mut traversals = Vec::new();
    for &u in &kernel.order {
        let gu = visits[u];
        for s in &kernel.rows[u] {
            let p = gu * s.prob;
            visits[s.to] += p;
            traversals.push(Traversal {
                from: u,
                to: s.to,
                edge: s.edge,
                prob: p,
            });
        }
    }
    traversals.sort_by_key(|t| t.edge);
    VisitProfile { visits, traversals }
}

/// `Σ_{k < max_steps} Q^k(root, ·)` by repeated propagation of the walk's
/// position distribution; agrees with [`visit_probability`] once `max_steps`
/// exceeds the longest support path.
pub fn visit_probability_series(kernel: &PathKernel<'_>, max_steps: usize) -> Vec<f64> {
    let n = kernel.net.vertex_count();
    let mut position = vec![0.0; n];
    position[kernel.root()] = 1.0;
    let mut total = position.clone();
    for _ in 1..max_steps {
        let mut next = vec![0.0; n];
        for (u, &mass) in position.iter().enumerate() {
            if mass != 0.0 {
                for s in &kernel.rows[u] {
                    next[s.to] += mass * s.prob;
                }
            }
        }
        if next.iter().all(|&m| m == 0.0) {
            break;
        }
        for (t, m) in total.iter_mut().zip(&next) {
            *t += m;
        }
        position = next;
    }
    total
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

impl Estimate {
    /// Number of standard errors separating the estimate from `exact`; zero
    /// when both agree exactly.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = (self.mean - exact).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_err
        }
    }
}

/// Fraction of sampled walks that visit `v`, with its binomial standard error.
pub fn empirical_visit_frequency(kernel: &PathKernel<'_>, v: usize, samples: usize, seed: u64) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::param("n_samples", "at least one sample is required"));
    }
    if !kernel.net.contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    let hits: usize = rng::chunked(samples, seed, |rng, count| {
        (0..count).filter(|_| kernel.sample_with(rng).contains(v)).count()
    })
    .into_iter()
    .sum();
    let mean = hits as f64 / samples as f64;
    Ok(Estimate {
        mean,
        std_err: (mean * (1.0 - mean) / samples as f64).sqrt(),
        samples,
    })
}
