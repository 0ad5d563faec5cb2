//! Continuous-wave transmittance at a handful of energies, ELBM and FDTD.

use dispersim::harness::experiments::{cw_energies, period_steps_for, cw_sweep_k, CwOptions};
use dispersim::harness::{preset, Setup};
use dispersim::geometry::Layout;
use dispersim::materials::ag_palik_model;
use dispersim::sources::SourceSpec;
use dispersim::SolverKind;

fn main() -> dispersim::Result<()> {
    let cfg = preset("fig3-sweep")?;
    let opts = CwOptions::from(cfg.sweep.as_ref().unwrap());
    let setup = Setup::new(Layout::centered_slab(620.0, 200, 100.0)?, ag_palik_model(1.0))?;
    let energies = cw_energies(9, 1.0, 5.0);
    let source = SourceSpec::sine(50, period_steps_for(energies[0], setup.dt()));
    let probe = 175;
    let r = cw_sweep_k(2, &setup, &source, probe, &energies, &[SolverKind::Elbm, SolverKind::Fdtd], &opts)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "eV", "exact", "elbm", "fdtd");
    for i in 0..energies.len() {
        println!(
            "{:6.2} {:12.5e} {:12.5e} {:12.5e}",
            energies[i], r.analytic[i], r.solvers[0].transmittance[i], r.solvers[1].transmittance[i]
        );
    }
    Ok(())
}
