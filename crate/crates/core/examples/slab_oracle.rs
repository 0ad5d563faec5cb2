//! Analytical transmittance of a 100 nm silver slab across 1-5 eV.

use dispersim::materials::ag_palik_model;
use dispersim::oracle::{transmittance_curve, SlabSpec};

fn main() -> dispersim::Result<()> {
    let slab = SlabSpec::new(100e-9, ag_palik_model(1.0))?;
    let energies: Vec<f64> = (0..=16).map(|i| 1.0 + 0.25 * i as f64).collect();
    for (e, t) in energies.iter().zip(transmittance_curve(&slab, &energies)?) {
        println!("{e:5.2} eV  T = {t:.6e}");
    }
    Ok(())
}
