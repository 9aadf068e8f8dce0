//! Tabulates `G(a)` by both routes and the coupling kernels on a small grid.
//!
//! ```text
//! cargo run --example kernel_tables -- 1.5
//! ```

use gaussvol::kernels::{self, KernelParams};

fn main() -> gaussvol::Result<()> {
    let a: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("edge length"))
        .unwrap_or(1.5);

    println!("{:>8} {:>24} {:>24} {:>10}", "a", "G(a) series", "G(a) quadrature", "|diff|");
    for edge in [0.3, 0.5, 1.0, std::f64::consts::PI.sqrt(), 2.0, 3.0, 5.0, 8.0] {
        let p = KernelParams::new(edge)?;
        let series = kernels::eval_big_g(&p)?.value;
        let oracle = kernels::big_g_oracle(&p)?;
        println!("{edge:>8.4} {series:>24.16e} {oracle:>24.16e} {:>10.2e}", (series - oracle).abs());
    }

    let p = KernelParams::new(a)?;
    println!("\na = {a} ({:?} series)", p.mode());
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}", "x", "p", "g", "gamma", "phi", "residual");
    for i in -8..=8 {
        let x = 0.5 * i as f64;
        println!(
            "{x:>6.2} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6e} {:>10.2e}",
            kernels::normal_pdf(x),
            kernels::eval_g(x, &p)?.value,
            kernels::eval_gamma(x, &p)?,
            kernels::eval_phi(x, &p)?,
            kernels::fp_residual(x, &p)?
        );
    }

    let half = kernels::solve_a_for_g(0.5, 1e-12)?;
    println!("\nG(a) = 1/2 at a = {half:.12}");
    Ok(())
}
