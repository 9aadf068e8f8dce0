//! Fixed `a`: attacks sparser than `G(a)` are caught, denser ones are not.

use gaussvol::harness::{self, ExperimentSpec};

fn main() -> gaussvol::Result<()> {
    let trials = 2000;
    let above = harness::run_thm2_undetectable(&ExperimentSpec::fixed_a(2.0, 2000, 0.05, 3.0, trials, 11))?;
    let below = harness::run_thm2_detectable(&ExperimentSpec::fixed_a(2.0, 5000, 0.05, 3.0, trials, 12))?;

    println!("G(2) = {:.6}", above.g_a);
    println!(
        "t = {:.4}: clean acceptance {:.4}, attacked acceptance {:.4}",
        above.t.unwrap_or_default(),
        above.rates["null_acceptance"].estimate,
        above.rates["attacked_acceptance"].estimate
    );
    println!(
        "t = {:.4}: clean acceptance {:.4}, attacked acceptance {:.4}, overlaps {}",
        below.t.unwrap_or_default(),
        below.rates["null_acceptance"].estimate,
        below.rates["attacker_success"].estimate,
        below.counts["overlap_events"]
    );
    println!("minimal n for lambda = 3, eps = 0.05: {}", harness::min_admissible_n(3.0, 0.05));
    Ok(())
}
