//! Seeded Monte Carlo experiments.
//!
//! Every trial draws from its own ChaCha8 stream selected by
//! `(master_seed, trial_index)`, and trial results are reduced in index
//! order, so a summary is bit-identical regardless of how many rayon workers
//! ran it.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::PerturbationVector;
use crate::error::{Error, Result};
use crate::kernels::{self, KernelParams};
use crate::stats::Rate;

mod coupling;
mod sweep;
mod thm1;
mod thm2;

pub use coupling::run_coupling_validation;
pub use sweep::{sweep_phase_transition, SweepGrid, SweepRow, SweepTable};
pub use thm1::{run_cube_cell, run_thm1_detectable, run_thm1_undetectable};
pub use thm2::{run_thm2_detectable, run_thm2_undetectable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `a` is a constant independent of `n`.
    FixedA,
    /// `a = c / sqrt(ln n)`.
    CubeScaling,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_ks_cap() -> usize {
    2_000_000
}

/// One experiment's parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub regime: Regime,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    pub n: usize,
    /// Sparsity threshold; derived from `G(a) +- epsilon` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub epsilon: f64,
    pub lambda: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// Keep per-trial records (and perturbations) in the summary.
    #[serde(default)]
    pub record_trials: bool,
    /// Upper limit on pooled coordinates fed to the KS statistic.
    #[serde(default = "default_ks_cap")]
    pub ks_sample_cap: usize,
}

impl ExperimentSpec {
    pub fn fixed_a(a: f64, n: usize, epsilon: f64, lambda: f64, trials: usize, seed: u64) -> Self {
        Self {
            regime: Regime::FixedA,
            a: Some(a),
            c: None,
            n,
            t: None,
            epsilon,
            lambda,
            alpha: default_alpha(),
            trials,
            master_seed: seed,
            record_trials: false,
            ks_sample_cap: default_ks_cap(),
        }
    }

    pub fn cube_scaling(c: f64, n: usize, lambda: f64, trials: usize, seed: u64) -> Self {
        Self {
            regime: Regime::CubeScaling,
            a: None,
            c: Some(c),
            n,
            t: None,
            epsilon: 0.05,
            lambda,
            alpha: default_alpha(),
            trials,
            master_seed: seed,
            record_trials: false,
            ks_sample_cap: default_ks_cap(),
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    fn positive(field: &str, v: f64) -> Result<()> {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::spec(field, format!("must be finite and positive, got {v}")))
        }
    }

    /// Field-level checks shared by every experiment.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::spec("n", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::spec("trials", "must be at least 1"));
        }
        Self::positive("epsilon", self.epsilon)?;
        Self::positive("lambda", self.lambda)?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::spec("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if let Some(t) = self.t {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::spec("t", format!("must lie in [0, 1], got {t}")));
            }
        }
        match self.regime {
            Regime::FixedA => {
                let a = self.a.ok_or_else(|| Error::spec("a", "required in the fixed_a regime"))?;
                Self::positive("a", a)?;
            }
            Regime::CubeScaling => {
                let c = self
                    .c
                    .ok_or_else(|| Error::spec("c", "required in the cube_scaling regime"))?;
                Self::positive("c", c)?;
                if self.n < 3 {
                    return Err(Error::spec("n", "cube_scaling needs n >= 3 so that ln n > 1"));
                }
            }
        }
        Ok(())
    }

    /// Effective edge half-length `a`.
    pub fn edge(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self.regime {
            Regime::FixedA => self.a.unwrap_or_default(),
            Regime::CubeScaling => self.c.unwrap_or_default() / (self.n as f64).ln().sqrt(),
        })
    }

    fn require(&self, regime: Regime, experiment: &str) -> Result<()> {
        if self.regime != regime {
            return Err(Error::spec(
                "regime",
                format!("{experiment} needs the {regime:?} regime"),
            ));
        }
        Ok(())
    }

    /// Kernel, `a` and `G(a)` for a fixed-`a` run, enforcing
    /// `0 < G(a) - epsilon < G(a) + epsilon < 1`.
    pub(crate) fn fixed_setup(&self, experiment: &str) -> Result<Setup> {
        self.require(Regime::FixedA, experiment)?;
        let setup = Setup::new(self.edge()?)?;
        if !(setup.g_a - self.epsilon > 0.0 && setup.g_a + self.epsilon < 1.0) {
            return Err(Error::spec(
                "epsilon",
                format!(
                    "need 0 < G(a) - epsilon and G(a) + epsilon < 1; G({}) = {}, epsilon = {}",
                    setup.a, setup.g_a, self.epsilon
                ),
            ));
        }
        Ok(setup)
    }

    pub(crate) fn cube_setup(&self, experiment: &str) -> Result<Setup> {
        self.require(Regime::CubeScaling, experiment)?;
        Setup::new(self.edge()?)
    }

    pub(crate) fn trial_count(&self) -> u64 {
        self.trials as u64
    }
}

/// Resolved kernel quantities shared by all trials of a run.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Setup {
    pub a: f64,
    pub g_a: f64,
    pub kernel: KernelParams,
}

impl Setup {
    fn new(a: f64) -> Result<Self> {
        let kernel = KernelParams::new(a)?;
        let g_a = kernels::eval_big_g(&KernelParams::with_controls(
            a,
            1e-12,
            KernelParams::DEFAULT_MAX_TERMS,
        )?)?
        .value;
        Ok(Self { a, g_a, kernel })
    }
}

/// One Monte Carlo trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub statistic_pre: f64,
    pub statistic_post: f64,
    pub sr: f64,
    pub accepted_pre: bool,
    pub accepted_post: bool,
    /// `S_n`, the number of untouched coordinates.
    pub zero_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<PerturbationVector>,
}

/// An analytic hypothesis evaluated on the run's parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Premise {
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Premise {
    pub(crate) fn greater(statement: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            statement: statement.to_string(),
            lhs,
            rhs,
            holds: lhs > rhs,
        }
    }

    pub(crate) fn at_most(statement: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            statement: statement.to_string(),
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

/// A run-level assertion and its outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub spec: ExperimentSpec,
    pub a: f64,
    pub g_a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub rates: BTreeMap<String, Rate>,
    pub bound_values: BTreeMap<String, f64>,
    pub statistics: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, u64>,
    pub premises: BTreeMap<String, Premise>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

impl ExperimentSummary {
    pub(crate) fn new(experiment: &str, spec: &ExperimentSpec, setup: &Setup) -> Self {
        Self {
            experiment: experiment.to_string(),
            spec: spec.clone(),
            a: setup.a,
            g_a: setup.g_a,
            t: None,
            rates: BTreeMap::new(),
            bound_values: BTreeMap::new(),
            statistics: BTreeMap::new(),
            counts: BTreeMap::new(),
            premises: BTreeMap::new(),
            checks: Vec::new(),
            warnings: Vec::new(),
            trials: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn rate(&self, name: &str) -> Option<&Rate> {
        self.rates.get(name)
    }

    pub(crate) fn push_check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    pub(crate) fn premise(&mut self, key: &str, premise: Premise) -> bool {
        let holds = premise.holds;
        if !holds {
            self.warnings
                .push(format!("premise `{key}` does not hold: {}", premise.statement));
        }
        self.premises.insert(key.to_string(), premise);
        holds
    }

    /// Collects every numeric field, for finiteness checks before output.
    pub fn numeric_fields(&self) -> Vec<(String, f64)> {
        let mut out = vec![("a".to_string(), self.a), ("g_a".to_string(), self.g_a)];
        out.extend(self.t.map(|t| ("t".to_string(), t)));
        for (k, r) in &self.rates {
            out.push((format!("rates.{k}.estimate"), r.estimate));
            out.push((format!("rates.{k}.ci_low"), r.ci_low));
            out.push((format!("rates.{k}.ci_high"), r.ci_high));
        }
        for (prefix, map) in [("bound_values", &self.bound_values), ("statistics", &self.statistics)] {
            out.extend(map.iter().map(|(k, v)| (format!("{prefix}.{k}"), *v)));
        }
        for (k, p) in &self.premises {
            out.push((format!("premises.{k}.lhs"), p.lhs));
            out.push((format!("premises.{k}.rhs"), p.rhs));
        }
        out
    }
}

/// Generator for trial `index`: a pure function of `(master_seed, index)`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

pub fn standard_normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    StandardNormal.sample_iter(rng).take(n).collect()
}

/// Runs `trial` for every index in parallel, returning results in index order.
pub(crate) fn run_trials<T, F>(spec: &ExperimentSpec, trial: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..spec.trial_count())
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(spec.master_seed, i);
            trial(i, &mut rng)
        })
        .collect()
}

/// `exp(-lambda^2 / 2)`: the one-sided concentration bound for the parity mean.
pub fn concentration_bound(lambda: f64) -> f64 {
    (-0.5 * lambda * lambda).exp()
}

/// `exp(-2 n epsilon^2)`.
pub fn hoeffding_bound(n: usize, epsilon: f64) -> f64 {
    (-2.0 * n as f64 * epsilon * epsilon).exp()
}

/// Leading term `(4/pi) exp(-pi^2 / (2 a^2))` of the `G(a)` series.
pub fn leading_g_term(a: f64) -> f64 {
    4.0 / PI * (-PI * PI / (2.0 * a * a)).exp()
}

/// Smallest `n` with `n > lambda^2 / epsilon^2`.
///
/// The ratio is nudged up by a relative `1e-12` so that float noise in
/// `epsilon^2` cannot admit the boundary value itself.
pub fn min_admissible_n(lambda: f64, epsilon: f64) -> usize {
    let ratio = lambda * lambda / (epsilon * epsilon);
    (ratio * (1.0 + 1e-12)).floor() as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_pure_functions_of_seed_and_index() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(9, 17).random()).collect();
        assert!(a.iter().all(|&v| v == a[0]));
        let b: u64 = trial_rng(9, 18).random();
        let c: u64 = trial_rng(10, 17).random();
        assert_ne!(a[0], b);
        assert_ne!(a[0], c);
    }

    #[test]
    fn min_n_is_strict() {
        assert_eq!(min_admissible_n(3.0, 0.05), 3601);
        assert_eq!(min_admissible_n(3.0, 0.1), 901);
        assert_eq!(min_admissible_n(2.0, 0.3), 45);
    }

    #[test]
    fn spec_validation() {
        let spec = ExperimentSpec::fixed_a(2.0, 100, 0.05, 3.0, 10, 1);
        assert!(spec.validate().is_ok());
        let mut bad = spec.clone();
        bad.alpha = 1.5;
        assert!(matches!(bad.validate(), Err(Error::InvalidSpec { field, .. }) if field == "alpha"));
        let wide = ExperimentSpec::fixed_a(2.0, 100, 0.7, 3.0, 10, 1);
        assert!(wide.fixed_setup("test").is_err());
        let cube = ExperimentSpec::cube_scaling(1.5, 2, 3.0, 10, 1);
        assert!(cube.validate().is_err());
        let cube = ExperimentSpec::cube_scaling(1.5, 10_000, 3.0, 10, 1);
        assert!((cube.edge().unwrap() - 0.494_257_671_736_695_6).abs() < 1e-15);
    }

    #[test]
    fn spec_json_shape() {
        let json = r#"{"regime":"fixed_a","a":2.0,"n":5000,"epsilon":0.05,"lambda":3.0,
                       "trials":100,"master_seed":42}"#;
        let spec: ExperimentSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.alpha, 0.05);
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"regime":"fixed_a","bogus":1}"#).is_err());
    }
}
