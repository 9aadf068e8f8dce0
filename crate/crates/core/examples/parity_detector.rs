//! The bin-parity detector on clean samples, a hypercube shift and the
//! optimal sparse evader.

use gaussvol::attack::{optimal_parity_evasion, PerturbationVector};
use gaussvol::detector::{decide, labels, DetectorConfig, TestVariant};
use gaussvol::harness::{standard_normals, trial_rng};

fn shifted(x: &[f64], theta: &PerturbationVector) -> Vec<f64> {
    x.iter().zip(theta.entries()).map(|(v, d)| v + d).collect()
}

fn main() -> gaussvol::Result<()> {
    let (a, n, lambda) = (2.0, 5000, 3.0);
    let config = DetectorConfig::new(a, lambda, TestVariant::Thresholded)?;
    println!("a = {a}, n = {n}, lambda = {lambda}, E[A] = G(a) = {:.6}", config.g_a());

    let mut rng = trial_rng(7, 0);
    let x = standard_normals(&mut rng, n);
    let clean = decide(&x, &config)?;
    println!("clean sample:        A = {:+.5}  accept = {}", clean.statistic_a, clean.accept_h0);

    let flip = PerturbationVector::full_flip(n, a)?;
    let flipped = decide(&shifted(&x, &flip), &config)?;
    println!("all coordinates +a:  A = {:+.5}  accept = {}", flipped.statistic_a, flipped.accept_h0);

    let z = labels(&x, a);
    for t in [config.g_a() - 0.05, config.g_a() + 0.05] {
        let theta = optimal_parity_evasion(&z, a, t)?;
        let r = decide(&shifted(&x, &theta), &config)?;
        println!(
            "evader, t = {t:.4}:   A = {:+.5}  accept = {}  (sr = {:.4})",
            r.statistic_a,
            r.accept_h0,
            theta.sparsity_ratio()?
        );
    }
    Ok(())
}
