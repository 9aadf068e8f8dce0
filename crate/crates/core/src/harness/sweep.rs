//! Parameter sweeps across the detection threshold.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Rate;

use super::{run_cube_cell, run_thm2_detectable, ExperimentSpec, ExperimentSummary, Regime};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "parameter", content = "values")]
pub enum SweepGrid {
    /// Sparsity thresholds in the fixed-`a` regime.
    T(Vec<f64>),
    /// Scaling constants in the hypercube regime.
    C(Vec<f64>),
}

impl SweepGrid {
    /// `G(a) - 0.15 ..= G(a) + 0.15` in steps of 0.025, clipped to `[0, 1]`.
    pub fn around_threshold(g_a: f64) -> Self {
        SweepGrid::T(
            (-6..=6)
                .map(|i| g_a + 0.025 * i as f64)
                .filter(|t| (0.0..=1.0).contains(t))
                .collect(),
        )
    }

    /// `c` over `[1, 4]`, including both critical constants.
    pub fn cube_constants() -> Self {
        SweepGrid::C(vec![1.0, 1.5, 2.0, PI / SQRT_2, 2.5, 3.0, PI, 3.5, 4.0])
    }

    fn values(&self) -> &[f64] {
        match self {
            SweepGrid::T(v) | SweepGrid::C(v) => v,
        }
    }

    fn parameter(&self) -> &'static str {
        match self {
            SweepGrid::T(_) => "t",
            SweepGrid::C(_) => "c",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub a: f64,
    pub g_a: f64,
    pub n: usize,
    pub trials: usize,
    pub attacker_success: Rate,
    pub detector_win: f64,
    pub null_acceptance: Rate,
    pub overlap_events: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<ExperimentSummary>,
}

impl SweepTable {
    /// Attacker success is non-decreasing along the grid (as ordered).
    pub fn attacker_success_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[0].attacker_success.successes <= w[1].attacker_success.successes
        })
    }

    /// Plot-ready CSV; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "parameter,value,a,g_a,n,trials,attacker_success,attacker_ci_low,attacker_ci_high,\
             detector_win,null_acceptance,null_ci_low,null_ci_high,overlap_events\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.parameter,
                r.value,
                r.a,
                r.g_a,
                r.n,
                r.trials,
                r.attacker_success.estimate,
                r.attacker_success.ci_low,
                r.attacker_success.ci_high,
                r.detector_win,
                r.null_acceptance.estimate,
                r.null_acceptance.ci_low,
                r.null_acceptance.ci_high,
                r.overlap_events,
            );
        }
        out
    }
}

/// Runs one cell per grid value, each with the base spec's seed so cells
/// share their normal draws.
pub fn sweep_phase_transition(base: &ExperimentSpec, grid: &SweepGrid) -> Result<SweepTable> {
    if grid.values().is_empty() {
        return Err(Error::spec("grid", "sweep grid is empty"));
    }
    let expected = match grid {
        SweepGrid::T(_) => Regime::FixedA,
        SweepGrid::C(_) => Regime::CubeScaling,
    };
    if base.regime != expected {
        return Err(Error::spec(
            "regime",
            format!("a {} sweep needs the {expected:?} regime", grid.parameter()),
        ));
    }
    let mut rows = Vec::with_capacity(grid.values().len());
    let mut cells = Vec::with_capacity(grid.values().len());
    for &value in grid.values() {
        let mut spec = base.clone();
        let summary = match grid {
            SweepGrid::T(_) => {
                spec.t = Some(value);
                run_thm2_detectable(&spec)?
            }
            SweepGrid::C(_) => {
                spec.c = Some(value);
                run_cube_cell(&spec)?
            }
        };
        let success = summary.rates["attacker_success"];
        rows.push(SweepRow {
            parameter: grid.parameter().to_string(),
            value,
            a: summary.a,
            g_a: summary.g_a,
            n: spec.n,
            trials: spec.trials,
            attacker_success: success,
            detector_win: 1.0 - success.estimate,
            null_acceptance: summary.rates["null_acceptance"],
            overlap_events: summary.counts.get("overlap_events").copied().unwrap_or(0),
        });
        cells.push(summary);
    }
    Ok(SweepTable { rows, cells })
}
