//! One delta run recovers the slab transmittance over the whole band.

use dispersim::harness::experiments::compute_delta_broadband;
use dispersim::harness::preset;

fn main() -> dispersim::Result<()> {
    let r = compute_delta_broadband(&preset("fig6-delta")?)?;
    println!("{} steps in {:.2} s", r.n_t, r.resources.wall_time_s);
    println!("1-5 eV mean relative error: {:.4}%", 100.0 * r.window_mean_rel);
    println!("full band L1 = {:.4}, L2 = {:.4}", r.full.l1, r.full.l2);
    for i in (0..r.energies.len()).filter(|&i| r.energies[i] >= 1.0 && r.energies[i] <= 5.0).step_by(10) {
        println!("{:6.3} eV  T = {:.5e}  exact {:.5e}", r.energies[i], r.transmittance[i], r.analytic[i]);
    }
    Ok(())
}
