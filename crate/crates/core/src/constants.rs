//! Physical constants (CODATA 2018, exact where the SI defines them).

/// Reduced Planck constant over elementary charge, eV·s.
pub const HBAR_OVER_E: f64 = 6.582119569e-16;

/// Planck constant over elementary charge, eV·s.
pub const H_OVER_E: f64 = 4.135667696e-15;

/// Speed of light in vacuum, m/s.
pub const C0: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.8541878128e-12;

/// Angular frequency (rad/s) of a photon with the given energy in eV.
#[inline]
pub fn ev_to_rad_per_s(energy_ev: f64) -> f64 {
    energy_ev / HBAR_OVER_E
}

/// Photon energy (eV) for an angular frequency in rad/s.
#[inline]
pub fn rad_per_s_to_ev(omega: f64) -> f64 {
    omega * HBAR_OVER_E
}
