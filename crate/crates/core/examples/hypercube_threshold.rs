//! Hypercube regime `a = c / sqrt(ln n)` on both sides of the critical
//! constants.

use gaussvol::harness::{self, ExperimentSpec};

fn main() -> gaussvol::Result<()> {
    let n = 10_000;
    let trials = 2000;

    let low = harness::run_thm1_undetectable(&ExperimentSpec::cube_scaling(1.5, n, 3.0, trials, 1))?;
    println!("c = 1.5, a = {:.6}, G(a) = {:.4e}", low.a, low.g_a);
    for key in ["exact_p_zero_free", "chain_lower_bound", "bound_deficit"] {
        println!("  {key:<20} {:.10}", low.bound_values[key]);
    }
    let p = low.rates["p_zero_free"];
    println!("  MC P(S_n = 0)        {:.6} [{:.6}, {:.6}]", p.estimate, p.ci_low, p.ci_high);

    let high = harness::run_thm1_detectable(&ExperimentSpec::cube_scaling(4.0, n, 3.0, trials, 2))?;
    println!("c = 4.0, a = {:.6}, G(a) = {:.6}", high.a, high.g_a);
    for (name, premise) in &high.premises {
        println!("  {name:<14} {:.6} vs {:.6} -> {}", premise.lhs, premise.rhs, premise.holds);
    }
    println!("  overlap events {}", high.counts["overlap_events"]);
    for check in low.checks.iter().chain(&high.checks) {
        println!("{} {}: {}", if check.pass { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    Ok(())
}
