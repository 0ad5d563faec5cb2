//! Interface shared by the ELBM and FDTD solvers.

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Elbm,
    Fdtd,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Elbm => "elbm",
            SolverKind::Fdtd => "fdtd",
        }
    }
}

/// How an injected value couples into the fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Launch {
    /// One-way: a pulse of amplitude `v` travelling in +x only.
    #[default]
    Directional,
    /// Soft electric source: for a smooth waveform, pulses of amplitude `v/2`
    /// in both directions.
    Soft,
}

/// A time-stepping field solver on a 1D lattice.
///
/// `time()` counts completed steps. [`Solver::probe`] returns E and H
/// colocated at a node and at the current time.
pub trait Solver: Send {
    fn kind(&self) -> SolverKind;
    fn n_x(&self) -> usize;
    fn time(&self) -> usize;
    /// Adds a source value at `node` for the current time level.
    fn add_source(&mut self, node: usize, value: f64, launch: Launch) -> Result<()>;
    /// Sets E and H at `node` as an impulsive initial condition.
    fn impulse(&mut self, node: usize, e: f64, h: f64) -> Result<()>;
    fn step(&mut self) -> Result<()>;
    fn probe(&self, node: usize) -> Result<(f64, f64)>;
    /// Largest |E| over the lattice at the current time.
    fn max_abs_e(&self) -> f64;
    /// Bytes held by the field and auxiliary arrays.
    fn state_bytes(&self) -> usize;
}
