//! Generators for the graph families and their labeling schemes.
//!
//! Every generator numbers vertices so that the non-sink vertices of the
//! truncation at parameter `r` are a prefix of those at `r + 1`, and the sink
//! is always the last id:
//!
//! * path: vertex `i` is the integer `i`, sink is `L`.
//! * lattice ball: interior points `‖x‖₁ < r` ordered by shell `‖x‖₁`, then
//!   lexicographically by coordinates; the whole shell `‖x‖₁ = r` is one sink.
//! * binary tree: heap order (children of `i` are `2i + 1`, `2i + 2`) for
//!   depths `0..D`; the `2^D` depth-`D` leaves are wired into one sink.
//! * diamond: skeleton vertex 0 first, then for each level `n = 1..=N` the
//!   `2^n` middle vertices of diamond `n` followed by skeleton vertex `n`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Network;
use crate::error::{Error, Result};

pub const MAX_DIAMOND_LEVELS: usize = 24;
pub const MAX_TREE_DEPTH: usize = 24;
/// Largest vertex count a lattice ball may have.
pub const VERTEX_BUDGET: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphFamily {
    Path,
    Lattice { dim: usize },
    BinaryTree,
    Diamond,
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Path => f.write_str("path"),
            GraphFamily::Lattice { dim } => write!(f, "lattice({dim})"),
            GraphFamily::BinaryTree => f.write_str("binary-tree"),
            GraphFamily::Diamond => f.write_str("diamond"),
        }
    }
}

impl GraphFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GraphFamily::Lattice { dim } if !(1..=4).contains(&dim) => {
                Err(Error::param("dim", format!("lattice dimension {dim} not in 1..=4")))
            }
            _ => Ok(()),
        }
    }
}

/// Finite truncation of `family` at parameter `r` (length, radius, depth or
/// number of diamond levels).
pub fn exhaustion(family: GraphFamily, r: usize) -> Result<Network> {
    family.validate()?;
    match family {
        GraphFamily::Path => make_path_graph(r),
        GraphFamily::Lattice { dim } => make_lattice_ball(dim, r),
        GraphFamily::BinaryTree => make_binary_tree(r),
        GraphFamily::Diamond => make_diamond_graph(r),
    }
}

pub fn make_path_graph(len: usize) -> Result<Network> {
    if len == 0 {
        return Err(Error::param("L", "path length must be positive"));
    }
    Network::new(len + 1, (0..len).map(|i| (i, i + 1, 1.0)), 0, Some(len))
}

/// Id of skeleton vertex `n` in the diamond graph.
pub fn diamond_skeleton_id(n: usize) -> usize {
    n + (1usize << (n + 1)) - 2
}

/// Id of the `j`-th middle vertex (`j < 2^n`) of diamond level `n >= 1`.
pub fn diamond_middle_id(n: usize, j: usize) -> usize {
    debug_assert!(n >= 1 && j < 1 << n);
    diamond_skeleton_id(n - 1) + 1 + j
}

/// Skeleton `0..=levels` where the edge `(n-1, n)` is replaced by `2^n`
/// parallel two-edge branches.
pub fn make_diamond_graph(levels: usize) -> Result<Network> {
    if !(1..=MAX_DIAMOND_LEVELS).contains(&levels) {
        return Err(Error::param(
            "N",
            format!("diamond levels {levels} not in 1..={MAX_DIAMOND_LEVELS}"),
        ));
    }
    let vertices = diamond_skeleton_id(levels) + 1;
    let mut edges = Vec::with_capacity((1 << (levels + 2)) - 4);
    for n in 1..=levels {
        let (left, right) = (diamond_skeleton_id(n - 1), diamond_skeleton_id(n));
        for j in 0..1usize << n {
            let mid = diamond_middle_id(n, j);
            edges.push((left, mid, 1.0));
            edges.push((mid, right, 1.0));
        }
    }
    Network::new(vertices, edges, 0, Some(vertices - 1))
}

/// Complete binary tree of depth `depth` whose leaves are wired into one sink.
pub fn make_binary_tree(depth: usize) -> Result<Network> {
    if !(1..=MAX_TREE_DEPTH).contains(&depth) {
        return Err(Error::param(
            "D",
            format!("tree depth {depth} not in 1..={MAX_TREE_DEPTH}"),
        ));
    }
    let internal = (1usize << depth) - 1;
    let sink = internal;
    let edges = (0..internal).flat_map(|i| [2 * i + 1, 2 * i + 2].map(move |child| (i, child.min(sink), 1.0)));
    Network::new(internal + 1, edges, 0, Some(sink))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of lattice points with `‖x‖₁ <= r` in `Z^dim`.
fn ball_size(dim: usize, r: usize) -> u128 {
    (0..=dim as u128)
        .map(|k| (1u128 << k) * binomial(dim as u128, k) * binomial(r as u128, k))
        .sum()
}

/// All points of `Z^dim` with `‖x‖₁ = s`, sorted lexicographically.
fn shell(dim: usize, s: usize) -> Vec<Vec<i64>> {
    fn fill(prefix: &mut Vec<i64>, dim: usize, left: i64, out: &mut Vec<Vec<i64>>) {
        if prefix.len() + 1 == dim {
            for x in if left == 0 { vec![0] } else { vec![-left, left] } {
                prefix.push(x);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for x in -left..=left {
            prefix.push(x);
            fill(prefix, dim, left - x.abs(), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(dim), dim, s as i64, &mut out);
    out
}

/// Coordinates of the interior vertices of the radius-`r` ball, indexed by id.
pub struct LatticeLabels {
    pub points: Vec<Vec<i64>>,
}

impl LatticeLabels {
    pub fn new(dim: usize, r: usize) -> Self {
        let points = (0..r).flat_map(|s| shell(dim, s)).collect();
        LatticeLabels { points }
    }
}

/// `ℓ¹` ball of radius `r` in `Z^dim` around the origin with the boundary
/// shell wired into a single sink.
pub fn make_lattice_ball(dim: usize, r: usize) -> Result<Network> {
    if !(1..=4).contains(&dim) {
        return Err(Error::param("d", format!("lattice dimension {dim} not in 1..=4")));
    }
    if r == 0 {
        return Err(Error::param("r", "radius must be positive"));
    }
    let size = ball_size(dim, r);
    // the boundary shell collapses to one vertex
    let interior = ball_size(dim, r - 1);
    if size > VERTEX_BUDGET as u128 {
        return Err(Error::SizeOverflow {
            vertices: interior + 1,
            budget: VERTEX_BUDGET,
        });
    }

    let labels = LatticeLabels::new(dim, r);
    let sink = labels.points.len();
    let index: HashMap<&[i64], usize> = labels
        .points
        .iter()
        .enumerate()
        .map(|(id, p)| (p.as_slice(), id))
        .collect();

    let mut edges = Vec::new();
    let mut step = vec![0i64; dim];
    for (id, p) in labels.points.iter().enumerate() {
        for axis in 0..dim {
            for delta in [-1i64, 1] {
                step.copy_from_slice(p);
                step[axis] += delta;
                let norm: i64 = step.iter().map(|x| x.abs()).sum();
                if norm as usize >= r {
                    edges.push((id, sink, 1.0));
                } else {
                    let other = index[step.as_slice()];
                    if id < other {
                        edges.push((id, other, 1.0));
                    }
                }
            }
        }
    }
    Network::new(sink + 1, edges, 0, Some(sink))
}
