//! Delta-run error norms on refined lattices and their log-log slope.

use dispersim::harness::experiments::compute_convergence;
use dispersim::harness::preset;

fn main() -> dispersim::Result<()> {
    let mut cfg = preset("fig7-convergence")?;
    if let Some(s) = cfg.sweep.as_mut() {
        s.k_max = 6;
    }
    let r = compute_convergence(&cfg)?;
    for row in &r.rows {
        println!("N_x = {:5}  L1 = {:.4e}  L2 = {:.4e}", row.n_x, row.l1, row.l2);
    }
    if let (Some(a), Some(b)) = (r.fit_l1, r.fit_l2) {
        println!("slopes: L1 {:.3} +- {:.3}, L2 {:.3} +- {:.3}", a.slope, a.stderr, b.slope, b.stderr);
    }
    Ok(())
}
