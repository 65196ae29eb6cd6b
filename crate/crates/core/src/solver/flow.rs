use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::EPS_FLOW;
use crate::error::{Error, Result};
use crate::graph::Network;

pub const FLOW_FORMAT: &str = "sitnet-flow-v1";

/// Antisymmetric edge function on a network. One value is stored per
/// undirected edge, oriented from the smaller to the larger endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Flow<'n> {
    net: &'n Network,
    values: Vec<f64>,
    strength: f64,
    normalization: f64,
}

impl<'n> Flow<'n> {
    /// Wraps per-edge values with a declared strength.
    pub fn from_values(net: &'n Network, values: Vec<f64>, strength: f64) -> Result<Self> {
        if values.len() != net.edge_count() {
            return Err(Error::param(
                "values",
                format!("{} values for {} edges", values.len(), net.edge_count()),
            ));
        }
        Ok(Flow {
            net,
            values,
            strength,
            normalization: 1.0,
        })
    }

    /// Wraps per-edge values, declaring the root divergence as strength.
    pub fn with_root_strength(net: &'n Network, values: Vec<f64>) -> Result<Self> {
        let mut flow = Self::from_values(net, values, 0.0)?;
        flow.strength = flow.divergence_unchecked(net.root());
        Ok(flow)
    }

    /// Rescales `raw` so the root divergence becomes 1.
    pub(crate) fn normalized(net: &'n Network, mut raw: Vec<f64>) -> Result<Self> {
        let escape = Self::from_values(net, raw.clone(), 0.0)?.divergence_unchecked(net.root());
        if !(escape.is_finite() && escape > 0.0) {
            return Err(Error::ZeroEscapeCurrent);
        }
        for x in &mut raw {
            *x /= escape;
        }
        Ok(Flow {
            net,
            values: raw,
            strength: 1.0,
            normalization: escape,
        })
    }

    pub fn network(&self) -> &'n Network {
        self.net
    }

    /// Per-edge values in edge id order, oriented `u -> v` with `u < v`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Root divergence before rescaling to unit strength (the escape current
    /// at unit voltage for current flows); 1 for flows given explicitly.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// `F(from, to)` for edge id `edge`, where `from` is one of its endpoints.
    pub fn along(&self, edge: usize, from: usize) -> f64 {
        if self.net.edge(edge).u == from {
            self.values[edge]
        } else {
            -self.values[edge]
        }
    }

    /// `F(from, to)`, or `None` when the vertices are not adjacent.
    pub fn value(&self, from: usize, to: usize) -> Option<f64> {
        self.net.edge_between(from, to).map(|e| self.along(e, from))
    }

    fn divergence_unchecked(&self, v: usize) -> f64 {
        self.net.incident(v).iter().map(|inc| self.along(inc.edge, v)).sum()
    }

    /// `Σ_{u ~ v} F(v, u)`, summed in neighbor id order.
    pub fn divergence(&self, v: usize) -> Result<f64> {
        if !self.net.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(self.divergence_unchecked(v))
    }

    /// Largest `|div F(v)|` over vertices other than root and sink.
    pub fn max_interior_divergence(&self) -> f64 {
        let (root, sink) = (self.net.root(), self.net.sink());
        (0..self.net.vertex_count())
            .filter(|&v| v != root && Some(v) != sink)
            .map(|v| self.divergence_unchecked(v).abs())
            .fold(0.0, f64::max)
    }

    /// Dirichlet energy `Σ_e F(e)² / c(e)`, one term per undirected edge.
    pub fn energy(&self) -> f64 {
        self.net
            .edges()
            .iter()
            .zip(&self.values)
            .map(|(e, f)| f * f / e.conductance)
            .sum()
    }

    /// `Σ F(u,v)²` over ordered adjacent pairs, conductances ignored.
    pub fn directed_energy(&self) -> f64 {
        self.values.iter().map(|f| 2.0 * f * f).sum()
    }

    /// Directed edges `(from, to, F)` with `F > EPS_FLOW`, in edge id order.
    pub fn positive_edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.net.edges().iter().zip(&self.values).filter_map(|(e, &f)| {
            if f > EPS_FLOW {
                Some((e.u, e.v, f))
            } else if f < -EPS_FLOW {
                Some((e.v, e.u, -f))
            } else {
                None
            }
        })
    }

    pub fn to_json(&self) -> String {
        let file = FlowFile {
            format: FLOW_FORMAT.to_string(),
            graph_hash: self.net.content_hash(),
            strength: self.strength,
            edges: self
                .net
                .edges()
                .iter()
                .zip(&self.values)
                .map(|(e, &f)| (e.u, e.v, f))
                .collect(),
        };
        let mut text = serde_json::to_string(&file).expect("flow serialization cannot fail");
        text.push('\n');
        text
    }

    /// Parses a flow file written for `net`; the graph hash and edge list
    /// must match the network.
    pub fn from_json(net: &'n Network, text: &str) -> Result<Self> {
        let file: FlowFile = serde_json::from_str(text)?;
        if file.format != FLOW_FORMAT {
            return Err(Error::format(
                "flow file",
                format!("expected format {FLOW_FORMAT:?}, found {:?}", file.format),
            ));
        }
        if file.graph_hash != net.content_hash() {
            return Err(Error::NetworkMismatch);
        }
        if file.edges.len() != net.edge_count() {
            return Err(Error::format(
                "flow file",
                format!("{} edges for a network of {}", file.edges.len(), net.edge_count()),
            ));
        }
        let mut values = Vec::with_capacity(file.edges.len());
        for (e, &(u, v, f)) in net.edges().iter().zip(&file.edges) {
            if (e.u, e.v) != (u, v) {
                return Err(Error::format(
                    "flow file",
                    format!("edge ({u}, {v}) where ({}, {}) was expected", e.u, e.v),
                ));
            }
            if !f.is_finite() {
                return Err(Error::format("flow file", format!("non-finite value on ({u}, {v})")));
            }
            values.push(f);
        }
        Self::from_values(net, values, file.strength)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlowFile {
    format: String,
    graph_hash: String,
    strength: f64,
    edges: Vec<(usize, usize, f64)>,
}

/// Outcome of searching the positive-flow digraph for a directed cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopCheck {
    pub acyclic: bool,
    /// A directed cycle `v0 -> v1 -> ... -> v0` (first vertex not repeated)
    /// along which the flow is positive.
    pub witness: Option<Vec<usize>>,
}

/// Topological order of the digraph of edges with `F > EPS_FLOW`, or the
/// vertices of a positive cycle.
pub fn positive_flow_order(flow: &Flow<'_>) -> Result<Vec<usize>, Vec<usize>> {
    let net = flow.network();
    let n = net.vertex_count();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indegree = vec![0usize; n];
    for (from, to, _) in flow.positive_edges() {
        out[from].push(to);
        indegree[to] += 1;
    }
    for list in &mut out {
        list.sort_unstable();
    }

    let mut remaining = indegree.clone();
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &out[v] {
            remaining[w] -= 1;
            if remaining[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }

    // every vertex left over has a positive in-edge from another leftover vertex
    let mut pred = vec![usize::MAX; n];
    for v in 0..n {
        if remaining[v] > 0 {
            for &w in &out[v] {
                if remaining[w] > 0 && pred[w] == usize::MAX {
                    pred[w] = v;
                }
            }
        }
    }
    let start = (0..n).find(|&v| remaining[v] > 0).expect("leftover vertex");
    let mut seen = vec![false; n];
    let mut v = start;
    while !seen[v] {
        seen[v] = true;
        v = pred[v];
    }
    let mut cycle = vec![v];
    let mut w = pred[v];
    while w != v {
        cycle.push(w);
        w = pred[w];
    }
    cycle.reverse();
    Err(cycle)
}

/// Whether the flow has no directed cycle of strictly positive edges.
pub fn check_no_positive_loops(flow: &Flow<'_>) -> LoopCheck {
    match positive_flow_order(flow) {
        Ok(_) => LoopCheck {
            acyclic: true,
            witness: None,
        },
        Err(cycle) => LoopCheck {
            acyclic: false,
            witness: Some(cycle),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::make_path_graph;

    fn triangle() -> Network {
        Network::new(4, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0)], 0, Some(3)).unwrap()
    }

    #[test]
    fn circulating_triangle_is_caught() {
        let net = triangle();
        // edges sorted: (0,1), (0,2), (1,2), (2,3); circulation 0->1->2->0
        let flow = Flow::from_values(&net, vec![0.5, -0.5, 0.5, 0.0], 0.0).unwrap();
        let check = check_no_positive_loops(&flow);
        assert!(!check.acyclic);
        let cycle = check.witness.unwrap();
        assert_eq!(cycle.len(), 3);
        for i in 0..3 {
            let (a, b) = (cycle[i], cycle[(i + 1) % 3]);
            assert!(flow.value(a, b).unwrap() > 0.0, "{cycle:?}");
        }
    }

    #[test]
    fn negligible_values_form_an_empty_digraph() {
        let net = triangle();
        let flow = Flow::from_values(&net, vec![1e-13, -1e-13, 5e-13, 0.0], 0.0).unwrap();
        assert_eq!(flow.positive_edges().count(), 0);
        assert!(check_no_positive_loops(&flow).acyclic);
    }

    #[test]
    fn divergence_and_energies() {
        let net = make_path_graph(2).unwrap();
        let flow = Flow::with_root_strength(&net, vec![1.0, 1.0]).unwrap();
        assert_eq!(flow.strength(), 1.0);
        assert_eq!(flow.divergence(0).unwrap(), 1.0);
        assert_eq!(flow.divergence(1).unwrap(), 0.0);
        assert_eq!(flow.divergence(2).unwrap(), -1.0);
        assert!(matches!(flow.divergence(3), Err(Error::UnknownVertex(3))));
        assert_eq!(flow.energy(), 2.0);
        assert_eq!(flow.directed_energy(), 4.0);
        assert_eq!(flow.value(1, 0), Some(-1.0));
        assert_eq!(flow.value(0, 2), None);
    }

    #[test]
    fn zero_flow_cannot_be_normalized() {
        let net = make_path_graph(2).unwrap();
        assert!(matches!(
            Flow::normalized(&net, vec![0.0, 0.0]),
            Err(Error::ZeroEscapeCurrent)
        ));
    }

    #[test]
    fn json_round_trip_and_mismatch() {
        let net = make_path_graph(3).unwrap();
        let flow = Flow::with_root_strength(&net, vec![1.0, 1.0, 1.0]).unwrap();
        let text = flow.to_json();
        assert!(text.starts_with("{\"format\":\"sitnet-flow-v1\",\"graph_hash\":\""));
        assert!(text.ends_with("\"strength\":1.0,\"edges\":[[0,1,1.0],[1,2,1.0],[2,3,1.0]]}\n"));
        assert_eq!(Flow::from_json(&net, &text).unwrap(), flow);
        let other = make_path_graph(4).unwrap();
        assert!(matches!(Flow::from_json(&other, &text), Err(Error::NetworkMismatch)));
    }
}
