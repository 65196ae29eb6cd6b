//! Finite rooted networks: the weighted graphs every other module works on.
//!
//! A [`Network`] is an undirected simple graph with dense `0..n` vertex ids,
//! strictly positive conductances, a root and (usually) a sink. Parallel edges
//! are merged on construction by summing their conductances, so there is at
//! most one edge per unordered pair and edges are stored sorted by
//! `(min id, max id)`.

mod families;
mod io;

use std::collections::VecDeque;

pub use families::{
    diamond_middle_id, diamond_skeleton_id, exhaustion, make_binary_tree, make_diamond_graph, make_lattice_ball,
    make_path_graph, GraphFamily, LatticeLabels, MAX_DIAMOND_LEVELS, MAX_TREE_DEPTH, VERTEX_BUDGET,
};
pub use io::{read_network, write_network, GRAPH_FORMAT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub conductance: f64,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// One entry of a vertex's adjacency list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub neighbor: usize,
    pub edge: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    vertices: usize,
    edges: Vec<Edge>,
    root: usize,
    sink: Option<usize>,
    adjacency: Vec<Vec<Incidence>>,
}

impl Network {
    /// Builds and validates a network, merging parallel edges.
    pub fn new(
        vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        root: usize,
        sink: Option<usize>,
    ) -> Result<Self> {
        Self::build(vertices, edges, root, sink).map(|(net, _)| net)
    }

    /// Like [`Network::new`], also returning how many input edges were merged
    /// into an already present pair.
    pub fn build(
        vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
        root: usize,
        sink: Option<usize>,
    ) -> Result<(Self, usize)> {
        let in_range = |vertex: usize| {
            if vertex < vertices {
                Ok(())
            } else {
                Err(Error::VertexOutOfRange { vertex, vertices })
            }
        };
        in_range(root)?;
        if let Some(s) = sink {
            in_range(s)?;
            if s == root {
                return Err(Error::SinkIsRoot(root));
            }
        }

        let mut raw = Vec::new();
        for (a, b, c) in edges {
            in_range(a)?;
            in_range(b)?;
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (u, v) = (a.min(b), a.max(b));
            if !c.is_finite() {
                return Err(Error::NonFiniteConductance { u, v, conductance: c });
            }
            if c <= 0.0 {
                return Err(Error::NonPositiveConductance { u, v, conductance: c });
            }
            raw.push(Edge { u, v, conductance: c });
        }
        // stable sort keeps the input order of parallel copies, so merged sums are reproducible
        raw.sort_by_key(|e| (e.u, e.v));

        let mut merged_count = 0;
        let mut merged: Vec<Edge> = Vec::with_capacity(raw.len());
        for e in raw {
            match merged.last_mut() {
                Some(last) if last.u == e.u && last.v == e.v => {
                    last.conductance += e.conductance;
                    merged_count += 1;
                }
                _ => merged.push(e),
            }
        }

        let mut adjacency = vec![Vec::new(); vertices];
        for (id, e) in merged.iter().enumerate() {
            adjacency[e.u].push(Incidence {
                neighbor: e.v,
                edge: id,
            });
            adjacency[e.v].push(Incidence {
                neighbor: e.u,
                edge: id,
            });
        }
        for list in &mut adjacency {
            list.sort_by_key(|inc| inc.neighbor);
        }

        let net = Network {
            vertices,
            edges: merged,
            root,
            sink,
            adjacency,
        };
        net.check_connected()?;
        Ok((net, merged_count))
    }

    fn check_connected(&self) -> Result<()> {
        let mut seen = vec![false; self.vertices];
        let mut queue = VecDeque::from([self.root]);
        seen[self.root] = true;
        while let Some(x) = queue.pop_front() {
            for inc in &self.adjacency[x] {
                if !seen[inc.neighbor] {
                    seen[inc.neighbor] = true;
                    queue.push_back(inc.neighbor);
                }
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(v) => Err(Error::Disconnected(v)),
            None => Ok(()),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn sink(&self) -> Option<usize> {
        self.sink
    }

    pub fn require_sink(&self) -> Result<usize> {
        self.sink.ok_or(Error::MissingSink)
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.vertices
    }

    /// Adjacency list of `v`, sorted by neighbor id.
    pub fn incident(&self, v: usize) -> &[Incidence] {
        &self.adjacency[v]
    }

    /// Number of distinct neighbors.
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Sum of incident conductances. On merged unit-conductance graphs this
    /// counts the original multi-edges.
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.adjacency[v]
            .iter()
            .map(|inc| self.edges[inc.edge].conductance)
            .sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertices).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edge id joining `a` and `b`, if any.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let list = self.adjacency.get(a)?;
        list.binary_search_by_key(&b, |inc| inc.neighbor)
            .ok()
            .map(|i| list[i].edge)
    }

    pub fn is_unit_conductance(&self) -> bool {
        self.edges.iter().all(|e| e.conductance == 1.0)
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(io::to_canonical_json(self).as_bytes()))
    }
}
