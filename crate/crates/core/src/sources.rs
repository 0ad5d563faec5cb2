//! Ricker, time-harmonic sine and Dirac-delta sources.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::H_OVER_E;
use crate::error::{Error, Result};
use crate::solver::{Launch, Solver};

/// Ricker delay in units of the zero-crossing half-width. Truncation at the
/// start is then below `1e-6` of the peak.
pub const RICKER_DELAY_WIDTHS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Waveform {
    /// Second derivative of a Gaussian with spectral peak at `peak_energy_ev`.
    /// `half_breadth_as` is carried as metadata.
    Ricker {
        peak_energy_ev: f64,
        half_breadth_as: f64,
    },
    Sine {
        period_steps: f64,
    },
    /// Single-node impulse with wave impedance `eta` (lattice units).
    Delta {
        eta: f64,
    },
}

impl Waveform {
    pub fn name(&self) -> &'static str {
        match self {
            Waveform::Ricker { .. } => "ricker",
            Waveform::Sine { .. } => "sine",
            Waveform::Delta { .. } => "delta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub waveform: Waveform,
    pub position: usize,
    pub start: usize,
    pub amplitude: f64,
    pub launch: Launch,
}

impl SourceSpec {
    pub fn ricker(position: usize, peak_energy_ev: f64, half_breadth_as: f64) -> Self {
        Self::with(Waveform::Ricker { peak_energy_ev, half_breadth_as }, position)
    }

    pub fn sine(position: usize, period_steps: f64) -> Self {
        Self::with(Waveform::Sine { period_steps }, position)
    }

    pub fn delta(position: usize) -> Self {
        Self::with(Waveform::Delta { eta: 1.0 }, position)
    }

    fn with(waveform: Waveform, position: usize) -> Self {
        Self {
            waveform,
            position,
            start: 0,
            amplitude: 1.0,
            launch: Launch::Directional,
        }
    }

    /// Checks the spec against a lattice of `n_x` nodes.
    pub fn validate(&self, n_x: usize) -> Result<()> {
        if self.position == 0 || self.position + 1 >= n_x {
            return Err(Error::invalid(
                "source.position",
                format!("{} is not interior to {n_x} nodes", self.position),
            ));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::invalid("source.amplitude", "must be finite"));
        }
        match self.waveform {
            Waveform::Ricker { peak_energy_ev, half_breadth_as } => {
                if !(peak_energy_ev > 0.0) {
                    return Err(Error::invalid("source.peak_energy_ev", "must be > 0"));
                }
                if !(half_breadth_as >= 0.0) {
                    return Err(Error::invalid("source.half_breadth_as", "must be >= 0"));
                }
            }
            Waveform::Sine { period_steps } => {
                if !(period_steps >= 2.0) {
                    return Err(Error::invalid(
                        "source.period_steps",
                        format!("must be >= 2 (Nyquist), got {period_steps}"),
                    ));
                }
            }
            Waveform::Delta { eta } => {
                if !(eta > 0.0) {
                    return Err(Error::invalid("source.eta", "must be > 0"));
                }
            }
        }
        Ok(())
    }
}

/// Peak frequency (Hz) of a Ricker wavelet with the given peak photon energy.
pub fn ricker_peak_frequency(peak_energy_ev: f64) -> f64 {
    peak_energy_ev / H_OVER_E
}

/// Time (s) from the peak to the first zero crossing.
pub fn ricker_zero_crossing(peak_energy_ev: f64) -> f64 {
    1.0 / (PI * ricker_peak_frequency(peak_energy_ev) * 2f64.sqrt())
}

/// Delay in steps between `start` and the wavelet peak.
pub fn ricker_delay_steps(peak_energy_ev: f64, dt_seconds: f64) -> f64 {
    (RICKER_DELAY_WIDTHS * ricker_zero_crossing(peak_energy_ev) / dt_seconds).ceil()
}

/// Half-breadth expressed in time steps.
pub fn half_breadth_steps(half_breadth_as: f64, dt_seconds: f64) -> f64 {
    half_breadth_as * 1e-18 / dt_seconds
}

pub fn ricker_value(t: usize, spec: &SourceSpec, dt_seconds: f64) -> Result<f64> {
    let Waveform::Ricker { peak_energy_ev, .. } = spec.waveform else {
        return Err(Error::WrongSourceKind {
            expected: "ricker",
            found: spec.waveform.name(),
        });
    };
    if t < spec.start {
        return Ok(0.0);
    }
    let fp = ricker_peak_frequency(peak_energy_ev);
    let tc = ricker_delay_steps(peak_energy_ev, dt_seconds);
    let tau = ((t - spec.start) as f64 - tc) * dt_seconds;
    let a = (PI * fp * tau).powi(2);
    Ok(spec.amplitude * (1.0 - 2.0 * a) * (-a).exp())
}

/// `A sin(2 pi (t - t0) / T)` under a raised-cosine ramp lasting one period.
pub fn sine_value(t: usize, spec: &SourceSpec) -> Result<f64> {
    let Waveform::Sine { period_steps } = spec.waveform else {
        return Err(Error::WrongSourceKind {
            expected: "sine",
            found: spec.waveform.name(),
        });
    };
    if t < spec.start {
        return Ok(0.0);
    }
    let s = (t - spec.start) as f64;
    let ramp = if s < period_steps {
        0.5 * (1.0 - (PI * s / period_steps).cos())
    } else {
        1.0
    };
    Ok(spec.amplitude * ramp * (2.0 * PI * s / period_steps).sin())
}

/// Seeds the delta wave-function at `position`: `E = A/(2 dx)` and
/// `H = A/(2 eta dx)` with `dx = 1`. A soft launch drops the H part, giving
/// two counter-propagating half-amplitude pulses.
pub fn delta_init(solver: &mut dyn Solver, spec: &SourceSpec) -> Result<()> {
    let Waveform::Delta { eta } = spec.waveform else {
        return Err(Error::WrongSourceKind {
            expected: "delta",
            found: spec.waveform.name(),
        });
    };
    let e = 0.5 * spec.amplitude;
    let h = match spec.launch {
        Launch::Directional => 0.5 * spec.amplitude / eta,
        Launch::Soft => 0.0,
    };
    solver.impulse(spec.position, e, h)
}

/// Source value at step `t`, or `None` for a delta (which acts only once).
pub fn source_value(spec: &SourceSpec, t: usize, dt_seconds: f64) -> Result<Option<f64>> {
    match spec.waveform {
        Waveform::Ricker { .. } => ricker_value(t, spec, dt_seconds).map(Some),
        Waveform::Sine { .. } => sine_value(t, spec).map(Some),
        Waveform::Delta { .. } => Ok(None),
    }
}

/// Applies the source for step `t` to the solver, which must sit at time `t`.
pub fn inject(solver: &mut dyn Solver, spec: &SourceSpec, t: usize, dt_seconds: f64) -> Result<()> {
    if t < spec.start {
        return Ok(());
    }
    match source_value(spec, t, dt_seconds)? {
        Some(v) => solver.add_source(spec.position, v, spec.launch),
        None if t == spec.start => delta_init(solver, spec),
        None => Ok(()),
    }
}
