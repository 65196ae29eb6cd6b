use serde::{Deserialize, Serialize};

use super::checks::{flow_checks, lemma_checks, perturbation_checks, sit_energy_bound_check, vertex_bound_check};
use super::{expected_intersection_exact, expected_intersection_mc, flow_from_measure, CheckRecord};
use crate::error::Result;
use crate::graph::Network;
use crate::measure::{build_kernel, visit_probability};
use crate::solver::Flow;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub hash: String,
    pub vertices: usize,
    pub edges: usize,
    pub root: usize,
    pub sink: Option<usize>,
    pub max_degree: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub radius: Option<usize>,
}

impl GraphMeta {
    pub fn of(net: &Network) -> Self {
        GraphMeta {
            hash: net.content_hash(),
            vertices: net.vertex_count(),
            edges: net.edge_count(),
            root: net.root(),
            sink: net.sink(),
            max_degree: net.max_degree(),
            family: None,
            radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub pairs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub pairs: usize,
    pub seed: u64,
    pub e_edge: f64,
    pub e_edge_se: f64,
    pub e_vertex: f64,
    pub e_vertex_se: f64,
}

/// Exact and sampled intersection statistics of a flow's path measure,
/// with the outcome of every inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub graph: GraphMeta,
    pub strength: f64,
    pub e_edge: f64,
    pub e_vertex: f64,
    pub mc: Option<McReport>,
    /// Dirichlet energy `Σ F²/c` of the analyzed flow.
    pub energy_forward: f64,
    pub directed_energy_forward: f64,
    pub directed_energy_reconstructed: f64,
    /// Root divergence before normalization (escape current for solver flows).
    pub normalization: f64,
    /// Reachable vertices other than the sink where walks are absorbed.
    pub dead_ends: Vec<usize>,
    pub checks: Vec<CheckRecord>,
    pub checks_passed: usize,
    pub checks_total: usize,
}

impl IntersectionReport {
    pub fn all_passed(&self) -> bool {
        self.checks_passed == self.checks_total
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalysisOptions {
    pub mc: Option<McConfig>,
    /// Number of perturbed kernels and their seed.
    pub perturbations: Option<(usize, u64)>,
}

/// Builds the path measure of `flow` and measures it. Fails only when the
/// kernel cannot be built (positive loop or root inflow).
pub fn analyze(flow: &Flow<'_>, options: AnalysisOptions) -> Result<IntersectionReport> {
    let net = flow.network();
    let kernel = build_kernel(flow)?;
    let profile = visit_probability(&kernel);
    let exact = expected_intersection_exact(&profile);
    let reconstructed = flow_from_measure(net, &profile)?;

    let mc = match options.mc {
        Some(cfg) => {
            let est = expected_intersection_mc(&kernel, cfg.pairs, cfg.seed)?;
            Some(McReport {
                pairs: cfg.pairs,
                seed: cfg.seed,
                e_edge: est.edge.mean,
                e_edge_se: est.edge.std_err,
                e_vertex: est.vertex.mean,
                e_vertex_se: est.vertex.std_err,
            })
        }
        None => None,
    };

    let mut checks = flow_checks(flow);
    checks.extend(lemma_checks(flow, &kernel, &profile));
    checks.extend(sit_energy_bound_check(&profile, flow));
    checks.extend(vertex_bound_check(&profile, flow, net.max_degree()));
    if let Some((count, seed)) = options.perturbations {
        checks.extend(perturbation_checks(&kernel, count, seed));
    }
    let checks_passed = checks.iter().filter(|c| c.passed).count();

    Ok(IntersectionReport {
        graph: GraphMeta::of(net),
        strength: flow.strength(),
        e_edge: exact.edge,
        e_vertex: exact.vertex,
        mc,
        energy_forward: flow.energy(),
        directed_energy_forward: flow.directed_energy(),
        directed_energy_reconstructed: reconstructed.directed_energy(),
        normalization: flow.normalization(),
        dead_ends: kernel.interior_dead_ends(),
        checks_total: checks.len(),
        checks_passed,
        checks,
    })
}

/// Every check that can be evaluated for `flow`. When the kernel cannot be
/// built the flow-level checks are still returned, followed by a failed
/// `path-kernel` record carrying the reason.
pub fn verify_flow(flow: &Flow<'_>, perturbations: Option<(usize, u64)>) -> Vec<CheckRecord> {
    match analyze(
        flow,
        AnalysisOptions {
            mc: None,
            perturbations,
        },
    ) {
        Ok(report) => report.checks,
        Err(err) => {
            let mut checks = flow_checks(flow);
            checks.push(CheckRecord {
                name: "path-kernel".into(),
                passed: false,
                value: f64::NAN,
                bound: f64::NAN,
                slack: f64::NAN,
                detail: Some(err.to_string()),
            });
            checks
        }
    }
}
