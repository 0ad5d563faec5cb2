//! Ricker wavelet through the silver slab in both solvers, run in lockstep.

use dispersim::harness::experiments::compute_ricker_compare;
use dispersim::harness::preset;

fn main() -> dispersim::Result<()> {
    let r = compute_ricker_compare(&preset("fig2-ricker")?)?;
    for ((t, _), d) in r.elbm_snapshots.iter().zip(&r.snapshot_discrepancy) {
        println!("step {t:3}: max |E_elbm - E_fdtd| / peak = {:.3e}", d / r.peak);
    }
    println!("FDTD H lag at probe {}: {:.3} steps", r.probe, r.h_lag_steps);
    Ok(())
}
