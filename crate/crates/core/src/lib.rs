//! One-dimensional electrodynamic lattice-Boltzmann (ELBM) and Yee FDTD
//! solvers for media with complex-conjugate pole-residue permittivity, with
//! an analytical slab oracle and a spectral analysis harness.
//!
//! ```
//! use dispersim::geometry::Layout;
//! use dispersim::materials::{ag_palik_model, coefficients_for};
//! use dispersim::elbm::ElbmState;
//!
//! let layout = Layout::centered_slab(620.0, 200, 100.0).unwrap();
//! let coeffs = coefficients_for(&ag_palik_model(1.0), layout.dt_seconds()).unwrap();
//! let mut sim = ElbmState::new(&layout.medium(&coeffs).unwrap(), coeffs).unwrap();
//! sim.set_fields(50, 0.5, 0.5).unwrap();
//! sim.run(100).unwrap();
//! ```

pub mod constants;
pub mod elbm;
pub mod error;
pub mod export;
pub mod fdtd;
pub mod geometry;
pub mod harness;
pub mod materials;
pub mod oracle;
pub mod solver;
pub mod sources;
pub mod spectral;

pub use error::{Error, Result};
pub use solver::{Launch, Solver, SolverKind};
