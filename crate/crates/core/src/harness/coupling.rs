use crate::attack::{couple_perturb, CouplingPolicy};
use crate::detector::{self, DetectorConfig, TestVariant};
use crate::error::Result;
use crate::kernels;
use crate::stats::{self, binomial_se, Moments, Rate};

use super::{
    hoeffding_bound, run_trials, standard_normals, ExperimentSpec, ExperimentSummary, TrialRecord,
};

/// KS critical-value multiplier at level 0.001.
pub const KS_CRITICAL_001: f64 = 1.95;

struct CouplingTrial {
    record: TrialRecord,
    pooled: Vec<f64>,
    moments: Moments,
    tail_event: bool,
    flip_failure: bool,
}

/// Checks the coupling's distributional claims: `x'` is standard normal, the
/// stay fraction is `G(a)`, and `sr >= G(a) + epsilon` is as rare as
/// Hoeffding's bound says.
pub fn run_coupling_validation(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let setup = spec.fixed_setup("coupling validation")?;
    let detector = DetectorConfig::new(setup.a, spec.lambda, TestVariant::Thresholded)?;
    let n = spec.n;
    let cap = spec.ks_sample_cap;
    let tail_level = setup.g_a + spec.epsilon;

    let trials = run_trials(spec, |index, rng| {
        let x = standard_normals(rng, n);
        let mut policy = CouplingPolicy::new(setup.kernel, &mut *rng);
        let (theta, shifted) = couple_perturb(&x, &mut policy)?;
        let sr = theta.sparsity_ratio()?;
        let pre = detector::decide(&x, &detector)?;
        let post = detector::decide(&shifted, &detector)?;
        let flip_failure = detector::flip_identity_check(&x, &theta, setup.a)? != 0.0;
        let offset = (index as usize).saturating_mul(n);
        let keep = cap.saturating_sub(offset).min(n);
        Ok(CouplingTrial {
            record: TrialRecord {
                trial_index: index,
                statistic_pre: pre.statistic_a,
                statistic_post: post.statistic_a,
                sr,
                accepted_pre: pre.accept_h0,
                accepted_post: post.accept_h0,
                zero_count: theta.zero_count() as u64,
                theta: spec.record_trials.then(|| theta.clone()),
            },
            pooled: shifted[..keep].to_vec(),
            moments: Moments::from_slice(&shifted),
            tail_event: sr >= tail_level,
            flip_failure,
        })
    })?;

    let mut summary = ExperimentSummary::new("coupling-validation", spec, &setup);
    let mut moments = Moments::default();
    let mut pooled = Vec::new();
    let mut zeros = 0u64;
    let mut tail_events = 0u64;
    let mut flip_failures = 0u64;
    for trial in &trials {
        moments.merge(&trial.moments);
        pooled.extend_from_slice(&trial.pooled);
        zeros += trial.record.zero_count;
        tail_events += trial.tail_event as u64;
        flip_failures += trial.flip_failure as u64;
    }
    let coordinates = moments.count;
    let trial_count = spec.trial_count();

    let ks_n = pooled.len();
    let ks = stats::ks_distance(&mut pooled, kernels::normal_cdf);
    let ks_critical = KS_CRITICAL_001 / (ks_n as f64).sqrt();
    summary.statistics.insert("ks_distance".into(), ks);
    summary.bound_values.insert("ks_critical".into(), ks_critical);
    summary.counts.insert("ks_sample_size".into(), ks_n as u64);
    summary.push_check(
        "ks_distance",
        ks <= ks_critical,
        format!("D = {ks:.3e} vs 1.95/sqrt({ks_n}) = {ks_critical:.3e}"),
    );

    let zero_rate = Rate::new(zeros, coordinates);
    let zero_se = binomial_se(setup.g_a, coordinates);
    let zero_dev = (zero_rate.estimate - setup.g_a).abs();
    summary.rates.insert("zero_fraction".into(), zero_rate);
    summary.bound_values.insert("zero_fraction_se".into(), zero_se);
    summary.push_check(
        "zero_fraction",
        zero_dev <= 4.0 * zero_se,
        format!(
            "P(theta = 0) = {:.6e} vs G(a) = {:.6e}, |diff| = {:.2} SE",
            zero_rate.estimate,
            setup.g_a,
            zero_dev / zero_se.max(f64::MIN_POSITIVE)
        ),
    );

    let mean = moments.mean();
    let variance = moments.variance();
    let skewness = moments.skewness();
    let count = coordinates as f64;
    let moment_devs = [
        mean.abs() / (1.0 / count).sqrt(),
        (variance - 1.0).abs() / (2.0 / count).sqrt(),
        skewness.abs() / (6.0 / count).sqrt(),
    ];
    summary.statistics.insert("mean".into(), mean);
    summary.statistics.insert("variance".into(), variance);
    summary.statistics.insert("skewness".into(), skewness);
    summary.push_check(
        "moments",
        moment_devs.iter().all(|&d| d <= 4.0),
        format!(
            "mean {mean:.2e}, var {variance:.6}, skew {skewness:.2e} ({:.2}, {:.2}, {:.2} SE)",
            moment_devs[0], moment_devs[1], moment_devs[2]
        ),
    );

    let bound = hoeffding_bound(n, spec.epsilon);
    let tail_rate = Rate::new(tail_events, trial_count);
    let allowance = bound + 3.0 * (bound / trial_count as f64).sqrt();
    summary.rates.insert("hoeffding_tail".into(), tail_rate);
    summary.bound_values.insert("hoeffding_bound".into(), bound);
    summary.counts.insert("hoeffding_tail_events".into(), tail_events);
    summary.push_check(
        "hoeffding_tail",
        tail_rate.estimate <= allowance,
        format!(
            "{tail_events}/{trial_count} trials with sr >= G(a) + eps; bound {bound:.3e}, allowance {allowance:.3e}"
        ),
    );

    summary.counts.insert("coordinates".into(), coordinates);
    summary.counts.insert("flip_identity_failures".into(), flip_failures);
    summary.push_check(
        "flip_identity",
        flip_failures == 0,
        format!("{flip_failures} trials violated the parity-flip identity"),
    );
    if spec.record_trials {
        summary.trials = trials.into_iter().map(|t| t.record).collect();
    }
    Ok(summary)
}
