//! A delta wave-function crossing an empty ELBM lattice stays a single
//! unit-amplitude node and leaves through the free boundary.

use dispersim::elbm::ElbmState;
use dispersim::sources::{delta_init, SourceSpec};
use dispersim::Solver;

fn main() -> dispersim::Result<()> {
    let mut sim = ElbmState::vacuum(64)?;
    delta_init(&mut sim, &SourceSpec::delta(8))?;
    for t in 0..70 {
        sim.step()?;
        if t % 10 == 9 {
            let lit: Vec<usize> = (0..64).filter(|&i| sim.e()[i] != 0.0).collect();
            println!("step {:3}: nonzero nodes {:?}, energy {:.3e}", sim.time(), lit, sim.energy());
        }
    }
    Ok(())
}
