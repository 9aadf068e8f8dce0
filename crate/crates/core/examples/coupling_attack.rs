//! Runs the distribution-preserving coupling on one sample and checks that
//! the attacked coordinates still look standard normal.

use gaussvol::attack::{couple_perturb, CouplingPolicy};
use gaussvol::harness::{standard_normals, trial_rng};
use gaussvol::kernels::{self, KernelParams};
use gaussvol::stats::{ks_distance, Moments};

fn main() -> gaussvol::Result<()> {
    let (a, n, seed) = (1.0, 200_000, 2024);
    let kernel = KernelParams::new(a)?;
    let g_a = kernels::eval_big_g(&kernel)?.value;

    let mut rng = trial_rng(seed, 0);
    let x = standard_normals(&mut rng, n);
    let mut policy = CouplingPolicy::new(kernel, &mut rng);
    let (theta, mut shifted) = couple_perturb(&x, &mut policy)?;

    let plus = theta.signs().iter().filter(|&&s| s == 1).count();
    let minus = theta.signs().iter().filter(|&&s| s == -1).count();
    println!("a = {a}, n = {n}");
    println!("theta: {plus} at +a, {} at 0, {minus} at -a", theta.zero_count());
    println!("sparsity ratio {:.6} vs G(a) = {g_a:.6}", theta.sparsity_ratio()?);

    let m = Moments::from_slice(&shifted);
    println!("x' mean {:.2e}, variance {:.5}, skewness {:.2e}", m.mean(), m.variance(), m.skewness());
    let d = ks_distance(&mut shifted, kernels::normal_cdf);
    println!("KS distance {d:.2e} (critical {:.2e} at level 0.001)", 1.95 / (n as f64).sqrt());
    let rle = theta.to_rle();
    println!("theta as RLE (prefix): {}", &rle[..40.min(rle.len())]);
    Ok(())
}
