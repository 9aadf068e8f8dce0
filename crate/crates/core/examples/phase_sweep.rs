//! Attacker success across `t` near `G(a)` and across `c` near the critical
//! constants. Writes both tables as CSV next to the working directory.
//!
//! ```text
//! cargo run --release --example phase_sweep -- out/
//! ```

use std::path::PathBuf;

use gaussvol::harness::{self, ExperimentSpec, SweepGrid};
use gaussvol::kernels::{self, KernelParams};

fn main() -> gaussvol::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sweep_out".into()));
    std::fs::create_dir_all(&dir)?;

    let base = ExperimentSpec::fixed_a(2.0, 2000, 0.1, 3.0, 2000, 21);
    let g_a = kernels::eval_big_g(&KernelParams::new(2.0)?)?.value;
    let t_table = harness::sweep_phase_transition(&base, &SweepGrid::around_threshold(g_a))?;
    std::fs::write(dir.join("sweep_t.csv"), t_table.to_csv())?;
    println!("t sweep around G(2) = {g_a:.4} (monotone: {})", t_table.attacker_success_monotone());
    for row in &t_table.rows {
        println!("  t = {:.4}  success {:.4}", row.value, row.attacker_success.estimate);
    }

    let cube = ExperimentSpec::cube_scaling(1.0, 2000, 3.0, 500, 22);
    let c_table = harness::sweep_phase_transition(&cube, &SweepGrid::cube_constants())?;
    std::fs::write(dir.join("sweep_c.csv"), c_table.to_csv())?;
    println!("c sweep (attacker success / clean acceptance)");
    for row in &c_table.rows {
        println!(
            "  c = {:.4}  {:.4} / {:.4}",
            row.value, row.attacker_success.estimate, row.null_acceptance.estimate
        );
    }
    println!("tables written to {}", dir.display());
    Ok(())
}
