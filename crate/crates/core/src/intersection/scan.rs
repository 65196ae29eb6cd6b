//! Radius sweeps over a graph family.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{analyze, AnalysisOptions, McConfig};
use crate::error::{Error, Result};
use crate::graph::{exhaustion, GraphFamily};
use crate::solver::unit_current_flow;

pub const SCAN_CSV_HEADER: &str = "r,R_eff,E_edge,E_vertex,E_edge_mc,E_edge_mc_se,checks_passed,checks_total";

/// Relative change of `E_edge` between consecutive radii below which the
/// sequence counts as stabilizing.
pub const TREND_DELTA: f64 = 1e-2;
/// Growth of `E_edge` per unit of `ln r` above which the sequence counts as
/// diverging.
pub const TREND_LOG_SLOPE: f64 = 0.05;
/// Number of trailing rows the classifier looks at.
pub const TREND_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Exact,
    Pairs(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: usize,
    pub r_eff: f64,
    pub e_edge: f64,
    pub e_vertex: f64,
    pub e_edge_mc: Option<f64>,
    pub e_edge_mc_se: Option<f64>,
    pub checks_passed: usize,
    pub checks_total: usize,
}

/// Heuristic reading of how `E_edge(r)` behaves at the top of a scan. It
/// summarizes finite truncations and proves nothing about the limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Trend {
    EdgeSit,
    Diverging,
    Inconclusive,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::EdgeSit => "edge-SIT trend",
            Trend::Diverging => "diverging",
            Trend::Inconclusive => "inconclusive",
        })
    }
}

/// Classifies the trailing window of `(r, E_edge)` points.
///
/// `Diverging` when the values increase monotonically and every step grows
/// faster than `TREND_LOG_SLOPE` per unit of `ln r`; `EdgeSit` when every
/// successive relative difference is below `TREND_DELTA` and the log-slope
/// stays under the threshold; `Inconclusive` otherwise or when there are
/// fewer than `TREND_WINDOW` points.
pub fn classify_trend(points: &[(usize, f64)]) -> Trend {
    if points.len() < TREND_WINDOW {
        return Trend::Inconclusive;
    }
    let tail = &points[points.len() - TREND_WINDOW..];
    let steps: Vec<(f64, f64)> = tail
        .windows(2)
        .map(|w| {
            let (r0, e0) = w[0];
            let (r1, e1) = w[1];
            let rel = (e1 - e0).abs() / e1.abs().max(f64::MIN_POSITIVE);
            let slope = (e1 - e0) / ((r1 as f64).ln() - (r0 as f64).ln());
            (rel, slope)
        })
        .collect();
    if steps.iter().all(|&(_, slope)| slope > TREND_LOG_SLOPE) {
        Trend::Diverging
    } else if steps
        .iter()
        .all(|&(rel, slope)| rel < TREND_DELTA && slope.abs() <= TREND_LOG_SLOPE)
    {
        Trend::EdgeSit
    } else {
        Trend::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub family: GraphFamily,
    pub rows: Vec<ScanRow>,
    /// Radii whose row could not be computed, with the reason.
    pub failures: Vec<(usize, String)>,
    pub trend: Trend,
}

fn row_seed(seed: u64, r: usize) -> u64 {
    seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn scan_row(family: GraphFamily, r: usize, mode: ScanMode, seed: u64, tol: f64) -> Result<ScanRow> {
    let net = exhaustion(family, r)?;
    let flow = unit_current_flow(&net, tol)?;
    let mc = match mode {
        ScanMode::Exact => None,
        ScanMode::Pairs(pairs) => Some(McConfig {
            pairs,
            seed: row_seed(seed, r),
        }),
    };
    let report = analyze(
        &flow,
        AnalysisOptions {
            mc,
            perturbations: None,
        },
    )?;
    Ok(ScanRow {
        r,
        r_eff: report.energy_forward,
        e_edge: report.e_edge,
        e_vertex: report.e_vertex,
        e_edge_mc: report.mc.map(|m| m.e_edge),
        e_edge_mc_se: report.mc.map(|m| m.e_edge_se),
        checks_passed: report.checks_passed,
        checks_total: report.checks_total,
    })
}

/// One row per radius: effective resistance, exact intersection
/// expectations, optional Monte Carlo estimate and check tally. Rows are
/// computed concurrently; a failing row is recorded and the scan continues.
pub fn sit_scan(family: GraphFamily, radii: &[usize], mode: ScanMode, seed: u64, tol: f64) -> Result<ScanTable> {
    family.validate()?;
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("radii", "radii must be nonempty and strictly increasing"));
    }
    if let ScanMode::Pairs(p) = mode {
        if p < 2 {
            return Err(Error::param("pairs", "at least two pairs are required"));
        }
    }
    let results: Vec<(usize, Result<ScanRow>)> = radii
        .par_iter()
        .map(|&r| (r, scan_row(family, r, mode, seed, tol)))
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in results {
        match res {
            Ok(row) => rows.push(row),
            Err(err) => {
                log::warn!("scan row r={r} failed: {err}");
                failures.push((r, err.to_string()));
            }
        }
    }
    let points: Vec<(usize, f64)> = rows.iter().map(|row| (row.r, row.e_edge)).collect();
    Ok(ScanTable {
        family,
        trend: classify_trend(&points),
        rows,
        failures,
    })
}

/// `x` with 12 significant digits, without exponent for moderate magnitudes.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

impl ScanTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(SCAN_CSV_HEADER.split(','))?;
        let opt = |x: Option<f64>| x.map(format_sig12).unwrap_or_default();
        for row in &self.rows {
            writer.write_record([
                row.r.to_string(),
                format_sig12(row.r_eff),
                format_sig12(row.e_edge),
                format_sig12(row.e_vertex),
                opt(row.e_edge_mc),
                opt(row.e_edge_mc_se),
                row.checks_passed.to_string(),
                row.checks_total.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }
}
