//! Harmonic potentials, unit current flows and their energies.
//!
//! The potential `h` is the probability that the network random walk started
//! at `x` hits the root before the sink: harmonic off `{root, sink}` with
//! `h(root) = 1`, `h(sink) = 0`. It is found by conjugate gradient on the
//! Laplacian with the root and sink rows eliminated.
//!
//! Two energies are reported for a flow. [`Flow::energy`] is the Dirichlet
//! energy `Σ_e F(e)²/c(e)` with each undirected edge counted once.
//! [`Flow::directed_energy`] is `Σ F(u,v)²` over ordered adjacent pairs, which
//! ignores conductances and counts each edge twice; on unit-conductance
//! networks it is exactly twice the Dirichlet energy.

mod cg;
mod flow;

pub use flow::{check_no_positive_loops, positive_flow_order, Flow, LoopCheck, FLOW_FORMAT};

use crate::error::{Error, Result};
use crate::graph::Network;

/// Values `|F| <= EPS_FLOW` are treated as zero flow.
pub const EPS_FLOW: f64 = 1e-12;

/// Default relative residual for the linear solves.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub values: Vec<f64>,
    /// Relative residual `‖b - Ax‖/‖b‖` of the reduced system.
    pub residual: f64,
    pub iterations: usize,
}

impl Potential {
    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }
}

/// Solves for the potential with `h(root) = 1` and `h(sink) = 0`.
pub fn harmonic_solve(net: &Network, tol: f64) -> Result<Potential> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::param("tol", format!("tolerance {tol} must be positive")));
    }
    let root = net.root();
    let sink = net.require_sink()?;
    let n = net.vertex_count();

    const FIXED: usize = usize::MAX;
    let mut slot = vec![FIXED; n];
    let mut unknowns = Vec::with_capacity(n.saturating_sub(2));
    for v in (0..n).filter(|&v| v != root && v != sink) {
        slot[v] = unknowns.len();
        unknowns.push(v);
    }

    let mut rows = Vec::with_capacity(unknowns.len());
    let mut rhs = vec![0.0; unknowns.len()];
    for (i, &v) in unknowns.iter().enumerate() {
        let mut row = Vec::with_capacity(net.degree(v) + 1);
        let mut diag = 0.0;
        for inc in net.incident(v) {
            let c = net.edge(inc.edge).conductance;
            diag += c;
            if inc.neighbor == root {
                rhs[i] += c;
            } else if inc.neighbor != sink {
                row.push((slot[inc.neighbor], -c));
            }
        }
        row.push((i, diag));
        row.sort_by_key(|&(col, _)| col);
        rows.push(row);
    }

    let matrix = cg::CsrMatrix::from_rows(rows);
    let max_iter = (20 * n).max(100);
    let out = cg::pcg(&matrix, &rhs, tol, max_iter)?;

    let mut values = vec![0.0; n];
    values[root] = 1.0;
    for (&v, x) in unknowns.iter().zip(out.x) {
        values[v] = x;
    }
    Ok(Potential {
        values,
        residual: out.residual,
        iterations: out.iterations,
    })
}

/// Current flow of the potential `h`, rescaled to unit strength.
pub fn current_flow_from_potential<'n>(net: &'n Network, potential: &Potential) -> Result<Flow<'n>> {
    let currents: Vec<f64> = net
        .edges()
        .iter()
        .map(|e| e.conductance * (potential.get(e.u) - potential.get(e.v)))
        .collect();
    Flow::normalized(net, currents)
}

/// Unit current flow from root to sink: `F(u,v) = c(u,v)(h(u) - h(v)) / I`
/// where `I` is the current escaping the root at unit voltage.
pub fn unit_current_flow(net: &Network, tol: f64) -> Result<Flow<'_>> {
    let potential = harmonic_solve(net, tol)?;
    current_flow_from_potential(net, &potential)
}

/// Flow built from differences of the root hitting probability,
/// `F(x,y) ∝ h(x) - h(y)`, normalized by the root divergence. Differences are
/// weighted by conductance, which is the identity on unit-conductance
/// networks; elsewhere the weighting keeps the result divergence free.
pub fn hitting_flow(net: &Network, tol: f64) -> Result<Flow<'_>> {
    let potential = harmonic_solve(net, tol)?;
    let raw: Vec<f64> = net
        .edges()
        .iter()
        .map(|e| e.conductance * (potential.get(e.u) - potential.get(e.v)))
        .collect();
    Flow::normalized(net, raw)
}

/// Effective resistance between root and sink, computed as the Dirichlet
/// energy of the unit current flow.
pub fn effective_resistance(net: &Network, tol: f64) -> Result<f64> {
    Ok(unit_current_flow(net, tol)?.energy())
}
