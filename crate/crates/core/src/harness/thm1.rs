//! Hypercube regime `a = c / sqrt(ln n)`.

use std::f64::consts::{PI, SQRT_2};

use crate::attack::{couple_perturb, CouplingPolicy, PerturbationVector};
use crate::detector::{self, bin_index, parity_label, DetectorConfig, TestVariant};
use crate::error::Result;
use crate::stats::{binomial_se, Rate};

use super::{
    concentration_bound, leading_g_term, run_trials, standard_normals, ExperimentSpec,
    ExperimentSummary, Premise, TrialRecord,
};

/// `(1 - p)^n` evaluated as `exp(n ln(1 - p))`; zero when `p >= 1`.
fn survival_power(p: f64, n: usize) -> f64 {
    if p >= 1.0 {
        0.0
    } else {
        (n as f64 * (-p).ln_1p()).exp()
    }
}

/// Coupling attack in the hypercube regime: estimates `P(S_n = 0)` and
/// compares it with `(1 - G(a))^n` and the lower bound
/// `(1 - (4/pi) exp(-pi^2 / (2 a^2)))^n`.
pub fn run_thm1_undetectable(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let setup = spec.cube_setup("thm1 undetectable")?;
    let c = spec.c.unwrap_or_default();
    let n = spec.n;
    let detector = DetectorConfig::new(setup.a, spec.lambda, TestVariant::Zero)?;
    let mut summary = ExperimentSummary::new("thm1-undetectable", spec, &setup);
    if c >= PI / SQRT_2 {
        summary.warnings.push(format!(
            "c = {c} >= pi/sqrt(2): the undetectability hypothesis is violated"
        ));
    }

    let leading = leading_g_term(setup.a);
    let exact = survival_power(setup.g_a, n);
    let bound = survival_power(leading, n);
    let deficit = 4.0 / PI * (n as f64).powf(1.0 - PI * PI / (2.0 * c * c));
    summary.bound_values.insert("exact_p_zero_free".into(), exact);
    summary.bound_values.insert("chain_lower_bound".into(), bound);
    summary.bound_values.insert("bound_deficit".into(), deficit);
    summary.bound_values.insert("leading_g_term".into(), leading);
    // The odd-harmonic series alternates and its first omitted term is
    // negative, so G(a) <= leading term, hence (1 - G)^n >= (1 - leading)^n.
    summary.push_check(
        "cube_o_chain",
        setup.g_a <= leading && exact >= bound && exact >= 1.0 - deficit,
        format!(
            "G(a) = {:.6e} <= {leading:.6e}; (1-G)^n = {exact:.10} >= {bound:.10}; 1 - deficit = {:.10}",
            setup.g_a,
            1.0 - deficit
        ),
    );

    let trials = run_trials(spec, |index, rng| {
        let x = standard_normals(rng, n);
        let mut policy = CouplingPolicy::new(setup.kernel, &mut *rng);
        let (theta, shifted) = couple_perturb(&x, &mut policy)?;
        let pre = detector::decide(&x, &detector)?;
        let post = detector::decide(&shifted, &detector)?;
        Ok(TrialRecord {
            trial_index: index,
            statistic_pre: pre.statistic_a,
            statistic_post: post.statistic_a,
            sr: theta.sparsity_ratio()?,
            accepted_pre: pre.accept_h0,
            accepted_post: post.accept_h0,
            zero_count: theta.zero_count() as u64,
            theta: spec.record_trials.then_some(theta),
        })
    })?;

    let zero_free = trials.iter().filter(|t| t.zero_count == 0).count() as u64;
    let rate = Rate::new(zero_free, spec.trial_count());
    summary.rates.insert("p_zero_free".into(), rate);
    summary.push_check(
        "mc_matches_exact",
        rate.contains(exact),
        format!(
            "MC P(S_n = 0) = {:.6} [{:.6}, {:.6}] vs exact {exact:.8}",
            rate.estimate, rate.ci_low, rate.ci_high
        ),
    );
    if spec.record_trials {
        summary.trials = trials;
    }
    Ok(summary)
}

/// Bin-parity test `{A > 0}` against every hypercube vertex: shifting all
/// coordinates by `+-a` negates `A`, so a sample and its attacked copy are
/// never both accepted.
pub fn run_thm1_detectable(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let setup = spec.cube_setup("thm1 detectable")?;
    let c = spec.c.unwrap_or_default();
    let n = spec.n;
    let nf = n as f64;
    let detector = DetectorConfig::new(setup.a, spec.lambda, TestVariant::Zero)?;
    let mut summary = ExperimentSummary::new("thm1-detectable", spec, &setup);
    if c <= PI {
        summary
            .warnings
            .push(format!("c = {c} <= pi: the detectability hypothesis is violated"));
    }

    let lambda2 = spec.lambda * spec.lambda;
    summary.premise(
        "cube_n1",
        Premise::greater(
            "G(a) > n^(-pi^2 / (2 c^2))",
            setup.g_a,
            nf.powf(-PI * PI / (2.0 * c * c)),
        ),
    );
    summary.premise(
        "cube_n2",
        Premise::greater(
            "n^(1 - pi^2 / c^2) > lambda^2",
            nf.powf(1.0 - PI * PI / (c * c)),
            lambda2,
        ),
    );
    let concentrated = summary.premise(
        "concentration",
        Premise::greater("sqrt(n) G(a) > lambda", nf.sqrt() * setup.g_a, spec.lambda),
    );

    let trials = run_trials(spec, |index, rng| {
        let x = standard_normals(rng, n);
        let labels: Vec<i64> = x
            .iter()
            .map(|&v| parity_label(bin_index(v, setup.a)) as i64)
            .collect();
        let sum: i64 = labels.iter().sum();
        let accepted_pre = detector.accepts_sum(sum, n);
        // Every coordinate moves one bin: labels flip by integer shift.
        let theta = PerturbationVector::full_flip(n, setup.a)?;
        let shifted_sum: i64 = -sum;
        let flip_ok = detector::flip_identity_check(&x, &theta, setup.a)? == 0.0;
        Ok((
            TrialRecord {
                trial_index: index,
                statistic_pre: sum as f64 / nf,
                statistic_post: shifted_sum as f64 / nf,
                sr: 0.0,
                accepted_pre,
                accepted_post: detector.accepts_sum(shifted_sum, n),
                zero_count: 0,
                theta: spec.record_trials.then_some(theta),
            },
            flip_ok,
        ))
    })?;

    let total = spec.trial_count();
    let accepted = trials.iter().filter(|(t, _)| t.accepted_pre).count() as u64;
    let overlaps = trials
        .iter()
        .filter(|(t, _)| t.accepted_pre && t.accepted_post)
        .count() as u64;
    let flip_failures = trials.iter().filter(|(_, ok)| !ok).count() as u64;
    summary.counts.insert("overlap_events".into(), overlaps);
    summary.counts.insert("flip_identity_failures".into(), flip_failures);
    summary.push_check(
        "overlap_zero",
        overlaps == 0,
        format!("{overlaps} trials with both x and x + theta in Omega"),
    );
    summary.push_check(
        "flip_identity",
        flip_failures == 0,
        format!("{flip_failures} trials violated A(x + theta) = -A(x)"),
    );

    let null = Rate::new(accepted, total);
    let tail = concentration_bound(spec.lambda);
    let floor = 1.0 - tail - 3.0 * binomial_se(tail, total);
    summary.rates.insert("null_acceptance".into(), null);
    summary.bound_values.insert("concentration_bound".into(), tail);
    summary.bound_values.insert("null_acceptance_floor".into(), floor);
    if concentrated {
        summary.push_check(
            "null_acceptance",
            null.estimate >= floor,
            format!("P(A > 0) = {:.6} >= {floor:.6}", null.estimate),
        );
    }
    if spec.record_trials {
        summary.trials = trials.into_iter().map(|(t, _)| t).collect();
    }
    Ok(summary)
}

/// One cell of the `c` sweep: an adaptive hypercube attacker (coupling when it
/// lands in `K_a`, otherwise the all-flip vertex) against `{A > 0}`.
pub fn run_cube_cell(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    let setup = spec.cube_setup("cube sweep cell")?;
    let n = spec.n;
    let nf = n as f64;
    let detector = DetectorConfig::new(setup.a, spec.lambda, TestVariant::Zero)?;
    let mut summary = ExperimentSummary::new("cube-cell", spec, &setup);

    let trials = run_trials(spec, |index, rng| {
        let x = standard_normals(rng, n);
        let mut policy = CouplingPolicy::new(setup.kernel, &mut *rng);
        let (theta, shifted) = couple_perturb(&x, &mut policy)?;
        let sum = detector::label_sum(&x, setup.a);
        let coupled_sum = detector::label_sum(&shifted, setup.a);
        let coupling_wins = theta.is_vertex() && detector.accepts_sum(coupled_sum, n);
        let flip_wins = detector.accepts_sum(-sum, n);
        let (post_sum, post_theta) = if coupling_wins || !flip_wins {
            (coupled_sum, theta)
        } else {
            (-sum, PerturbationVector::full_flip(n, setup.a)?)
        };
        Ok((
            TrialRecord {
                trial_index: index,
                statistic_pre: sum as f64 / nf,
                statistic_post: post_sum as f64 / nf,
                sr: post_theta.sparsity_ratio()?,
                accepted_pre: detector.accepts_sum(sum, n),
                accepted_post: coupling_wins || flip_wins,
                zero_count: post_theta.zero_count() as u64,
                theta: spec.record_trials.then_some(post_theta),
            },
            coupling_wins,
        ))
    })?;

    let total = spec.trial_count();
    let count = |f: &dyn Fn(&(TrialRecord, bool)) -> bool| trials.iter().filter(|t| f(t)).count() as u64;
    summary
        .rates
        .insert("null_acceptance".into(), Rate::new(count(&|t| t.0.accepted_pre), total));
    summary
        .rates
        .insert("attacker_success".into(), Rate::new(count(&|t| t.0.accepted_post), total));
    summary
        .rates
        .insert("coupling_success".into(), Rate::new(count(&|t| t.1), total));
    summary
        .bound_values
        .insert("exact_p_zero_free".into(), survival_power(setup.g_a, n));
    if spec.record_trials {
        summary.trials = trials.into_iter().map(|(t, _)| t).collect();
    }
    Ok(summary)
}
