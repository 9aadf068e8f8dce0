//! Fixed-`a` regime: sparsity threshold `t` against `G(a)`.

use crate::attack::{couple_perturb, optimal_parity_evasion, CouplingPolicy};
use crate::detector::{self, bin_index, parity_label, DetectorConfig, TestVariant};
use crate::error::{Error, Result};
use crate::stats::{binomial_se, Rate};

use super::{
    concentration_bound, hoeffding_bound, min_admissible_n, run_trials, standard_normals,
    ExperimentSpec, ExperimentSummary, Premise, TrialRecord,
};

/// Coupling attack with `t = G(a) + epsilon` against the thresholded parity
/// test: the attacked sample is accepted about as often as a clean one.
pub fn run_thm2_undetectable(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let setup = spec.fixed_setup("thm2 undetectable")?;
    let n = spec.n;
    let t = spec.t.unwrap_or(setup.g_a + spec.epsilon);
    let detector = DetectorConfig::new(setup.a, spec.lambda, TestVariant::Thresholded)?;
    let mut summary = ExperimentSummary::new("thm2-undetectable", spec, &setup);
    summary.t = Some(t);
    let covered = summary.premise(
        "threshold_above_g",
        Premise::greater(
            "t >= G(a) + epsilon (checked as t > G(a) + epsilon - 1e-15)",
            t,
            setup.g_a + spec.epsilon - 1e-15,
        ),
    );

    let trials = run_trials(spec, |index, rng| {
        let x = standard_normals(rng, n);
        let mut policy = CouplingPolicy::new(setup.kernel, &mut *rng);
        let (theta, shifted) = couple_perturb(&x, &mut policy)?;
        let in_f = theta.in_sparse_set(t)?;
        let pre = detector::decide(&x, &detector)?;
        let post = detector::decide(&shifted, &detector)?;
        let flip_ok = detector::flip_identity_check(&x, &theta, setup.a)? == 0.0;
        Ok((
            TrialRecord {
                trial_index: index,
                statistic_pre: pre.statistic_a,
                statistic_post: post.statistic_a,
                sr: theta.sparsity_ratio()?,
                accepted_pre: pre.accept_h0,
                // An attack outside F_{a,t} is not admissible and counts as detected.
                accepted_post: in_f && post.accept_h0,
                zero_count: theta.zero_count() as u64,
                theta: spec.record_trials.then_some(theta),
            },
            in_f,
            flip_ok,
        ))
    })?;

    let total = spec.trial_count();
    let bound = hoeffding_bound(n, spec.epsilon);
    let in_f = trials.iter().filter(|t| t.1).count() as u64;
    let pre = trials.iter().filter(|t| t.0.accepted_pre).count() as u64;
    let post = trials.iter().filter(|t| t.0.accepted_post).count() as u64;
    let flip_failures = trials.iter().filter(|t| !t.2).count() as u64;

    // Paired differences D_i = 1{x in Omega} - 1{attack accepted}.
    let (mut d_sum, mut d_sq) = (0i64, 0i64);
    for (record, _, _) in &trials {
        let d = record.accepted_pre as i64 - record.accepted_post as i64;
        d_sum += d;
        d_sq += d * d;
    }
    let tf = total as f64;
    let gap = d_sum as f64 / tf;
    let gap_var = (d_sq as f64 / tf - gap * gap).max(0.0);
    let gap_se = (gap_var / tf).sqrt();

    let in_f_rate = Rate::new(in_f, total);
    let in_f_floor = 1.0 - bound - 3.0 * binomial_se(bound, total);
    summary.rates.insert("attack_in_f".into(), in_f_rate);
    summary.rates.insert("null_acceptance".into(), Rate::new(pre, total));
    summary.rates.insert("attacked_acceptance".into(), Rate::new(post, total));
    summary.bound_values.insert("hoeffding_bound".into(), bound);
    summary.bound_values.insert("attack_in_f_floor".into(), in_f_floor);
    summary.statistics.insert("acceptance_gap".into(), gap);
    summary.statistics.insert("acceptance_gap_se".into(), gap_se);
    summary.counts.insert("flip_identity_failures".into(), flip_failures);

    if covered {
        summary.push_check(
            "attack_in_f",
            in_f_rate.estimate >= in_f_floor,
            format!(
                "P(sr < t) = {:.6} >= 1 - e^(-2 n eps^2) - 3 SE = {in_f_floor:.6}",
                in_f_rate.estimate
            ),
        );
        let allowance = bound + 3.0 * gap_se;
        summary.push_check(
            "acceptance_gap",
            gap <= allowance,
            format!("P(Omega) - P(attack accepted) = {gap:.3e} <= {allowance:.3e}"),
        );
    }
    summary.push_check(
        "flip_identity",
        flip_failures == 0,
        format!("{flip_failures} trials violated the parity-flip identity"),
    );
    if spec.record_trials {
        summary.trials = trials.into_iter().map(|t| t.0).collect();
    }
    Ok(summary)
}

/// Optimal parity evader with `t = G(a) - epsilon` against the thresholded
/// test. Whenever the clean sample is accepted the attacked one is rejected,
/// provided `n > lambda^2 / epsilon^2`.
pub fn run_thm2_detectable(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let setup = spec.fixed_setup("thm2 detectable")?;
    let n = spec.n;
    let nf = n as f64;
    let min_n = min_admissible_n(spec.lambda, spec.epsilon);
    if n < min_n {
        return Err(Error::spec(
            "n",
            format!(
                "need n > lambda^2 / epsilon^2 = {:.6}; minimal admissible n is {min_n}, got {n}",
                spec.lambda * spec.lambda / (spec.epsilon * spec.epsilon)
            ),
        ));
    }
    let t = spec.t.unwrap_or(setup.g_a - spec.epsilon);
    let detector = DetectorConfig::new(setup.a, spec.lambda, TestVariant::Thresholded)?;
    let mut summary = ExperimentSummary::new("thm2-detectable", spec, &setup);
    summary.t = Some(t);
    summary.bound_values.insert("min_admissible_n".into(), min_n as f64);
    let sparse_enough = summary.premise(
        "threshold_below_g",
        Premise::at_most(
            "t <= G(a) - epsilon (checked with 1e-15 slack)",
            t,
            setup.g_a - spec.epsilon + 1e-15,
        ),
    );
    summary.premise(
        "alpha_level",
        Premise::at_most(
            "exp(-lambda^2 / 2) <= alpha",
            concentration_bound(spec.lambda),
            spec.alpha,
        ),
    );

    let trials = run_trials(spec, |index, rng| {
        let x = standard_normals(rng, n);
        let bins: Vec<i64> = x.iter().map(|&v| bin_index(v, setup.a)).collect();
        let labels: Vec<i8> = bins.iter().map(|&k| parity_label(k)).collect();
        let sum: i64 = labels.iter().map(|&z| z as i64).sum();
        let theta = optimal_parity_evasion(&labels, setup.a, t)?;
        // Attacked bins by integer shift, so the parity flip is exact.
        let shifted_sum: i64 = bins
            .iter()
            .zip(theta.signs())
            .map(|(&k, &s)| parity_label(k + s as i64) as i64)
            .sum();
        let flip_ok = detector::flip_identity_check(&x, &theta, setup.a)? == 0.0;
        Ok((
            TrialRecord {
                trial_index: index,
                statistic_pre: sum as f64 / nf,
                statistic_post: shifted_sum as f64 / nf,
                sr: theta.sparsity_ratio()?,
                accepted_pre: detector.accepts_sum(sum, n),
                accepted_post: detector.accepts_sum(shifted_sum, n),
                zero_count: theta.zero_count() as u64,
                theta: spec.record_trials.then_some(theta),
            },
            flip_ok,
        ))
    })?;

    let total = spec.trial_count();
    let accepted = trials.iter().filter(|t| t.0.accepted_pre).count() as u64;
    let evaded = trials.iter().filter(|t| t.0.accepted_post).count() as u64;
    let overlaps = trials
        .iter()
        .filter(|t| t.0.accepted_pre && t.0.accepted_post)
        .count() as u64;
    let flip_failures = trials.iter().filter(|t| !t.1).count() as u64;
    let alarm_bound = concentration_bound(spec.lambda);
    let false_alarm = Rate::new(total - accepted, total);
    let alarm_ceiling = alarm_bound + 3.0 * binomial_se(alarm_bound, total);

    summary.rates.insert("null_acceptance".into(), Rate::new(accepted, total));
    summary.rates.insert("false_alarm".into(), false_alarm);
    summary.rates.insert("attacker_success".into(), Rate::new(evaded, total));
    summary.rates.insert("detector_win".into(), Rate::new(total - evaded, total));
    summary.bound_values.insert("concentration_bound".into(), alarm_bound);
    summary.bound_values.insert("false_alarm_ceiling".into(), alarm_ceiling);
    summary.counts.insert("overlap_events".into(), overlaps);
    summary.counts.insert("flip_identity_failures".into(), flip_failures);

    if sparse_enough {
        summary.push_check(
            "overlap_zero",
            overlaps == 0,
            format!("{overlaps} trials with x in Omega and x + theta in Omega"),
        );
    }
    summary.push_check(
        "false_alarm",
        false_alarm.estimate <= alarm_ceiling,
        format!(
            "false alarm {:.5} <= e^(-lambda^2/2) + 3 SE = {alarm_ceiling:.5}",
            false_alarm.estimate
        ),
    );
    summary.push_check(
        "flip_identity",
        flip_failures == 0,
        format!("{flip_failures} trials violated the parity-flip identity"),
    );
    if spec.record_trials {
        summary.trials = trials.into_iter().map(|t| t.0).collect();
    }
    Ok(summary)
}
