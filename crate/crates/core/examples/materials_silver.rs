//! Prints the six-pole silver permittivity, refractive index and the
//! per-step update coefficients at the coarsest sweep resolution.

use dispersim::constants::ev_to_rad_per_s;
use dispersim::materials::{ag_palik_model, coefficients_for, refractive_index};

fn main() -> dispersim::Result<()> {
    let model = ag_palik_model(1.0);
    println!("{:>8} {:>12} {:>12} {:>10} {:>10}", "E (eV)", "Re eps", "Im eps", "n", "k");
    for i in 0..=8 {
        let ev = 1.0 + 0.5 * i as f64;
        let w = ev_to_rad_per_s(ev);
        let eps = model.relative_permittivity(w);
        let (n, k) = refractive_index(&model, w)?;
        println!("{ev:8.2} {:12.4} {:12.4} {n:10.4} {k:10.4}", eps.re, eps.im);
    }

    let dt = 6.2e-9 / dispersim::constants::C0;
    let c = coefficients_for(&model, dt)?;
    println!("\ndt = {:.3} as, eps_r = {:.6}", dt * 1e18, c.eps_r);
    for (p, (k, b)) in c.kappa.iter().zip(&c.beta).enumerate() {
        println!("pole {p}: |kappa| = {:.6}  beta = {:.3e}", k.norm(), b);
    }
    Ok(())
}
