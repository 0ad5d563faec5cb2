//! Analytical normal-incidence transmittance of a homogeneous slab in vacuum.
//!
//! With `n = n - jk` (e^{+jwt}) and `phi = n w d / c`,
//!
//! ```text
//! t = t12 t23 e^{-j phi} / (1 + r12 r23 e^{-2j phi})
//! ```
//!
//! where `r12 = (1 - n)/(1 + n)`, `t12 = 2/(1 + n)`, `r23 = (n - 1)/(n + 1)`,
//! `t23 = 2n/(n + 1)`. Both claddings are vacuum, so `T = |t|^2` with no
//! impedance factor.

use num_complex::Complex64;

use crate::constants::{ev_to_rad_per_s, C0};
use crate::error::{Error, Result};
use crate::materials::{refractive_index, CcprpModel};

#[derive(Debug, Clone, PartialEq)]
pub struct SlabSpec {
    pub thickness_m: f64,
    pub model: CcprpModel,
}

impl SlabSpec {
    pub fn new(thickness_m: f64, model: CcprpModel) -> Result<Self> {
        if !(thickness_m > 0.0 && thickness_m.is_finite()) {
            return Err(Error::invalid("thickness_m", format!("must be > 0, got {thickness_m}")));
        }
        Ok(Self { thickness_m, model })
    }
}

/// Complex amplitude transmission coefficient.
pub fn slab_amplitude(spec: &SlabSpec, omega: f64) -> Result<Complex64> {
    let (n, k) = refractive_index(&spec.model, omega)?;
    let idx = Complex64::new(n, -k);
    let one = Complex64::new(1.0, 0.0);
    let r12 = (one - idx) / (one + idx);
    let t12 = 2.0 / (one + idx);
    let r23 = (idx - one) / (idx + one);
    let t23 = 2.0 * idx / (idx + one);
    let phi = idx * (omega * spec.thickness_m / C0);
    let j = Complex64::new(0.0, 1.0);
    Ok(t12 * t23 * (-j * phi).exp() / (one + r12 * r23 * (-2.0 * j * phi).exp()))
}

pub fn slab_transmittance(spec: &SlabSpec, omega: f64) -> Result<f64> {
    Ok(slab_amplitude(spec, omega)?.norm_sqr())
}

/// Transmittance at each photon energy (eV).
pub fn transmittance_curve(spec: &SlabSpec, energies_ev: &[f64]) -> Result<Vec<f64>> {
    energies_ev
        .iter()
        .map(|&e| slab_transmittance(spec, ev_to_rad_per_s(e)))
        .collect()
}

/// Energies at which the model yields `T > 1 + tol`, i.e. gain.
pub fn non_passive_energies(spec: &SlabSpec, energies_ev: &[f64], tol: f64) -> Result<Vec<f64>> {
    let t = transmittance_curve(spec, energies_ev)?;
    Ok(energies_ev
        .iter()
        .zip(t)
        .filter(|(_, t)| *t > 1.0 + tol)
        .map(|(e, _)| *e)
        .collect())
}
