//! Complex-conjugate pole-residue pair (CCPRP) permittivity models.
//!
//! A model is a high-frequency permittivity `eps_inf` plus a list of pole
//! pairs `(c_p, a_p)`. Each pair contributes
//!
//! ```text
//! c_p / (jw - a_p) + conj(c_p) / (jw - conj(a_p))
//! ```
//!
//! to the relative permittivity, with the `e^{+jwt}` time-harmonic convention.
//! Pole constants are stored in eV and only converted to rad/s (×e/ħ) or to
//! per-step dimensionless form at the boundaries where they are consumed.
//!
//! Debye and Lorentz media map onto the same representation through
//! [`debye_pole`] and [`lorentz_pole`], so both solvers share one update
//! pipeline: [`dimensionless`] followed by [`update_coefficients`].

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{EPS0, HBAR_OVER_E};
use crate::error::{Error, Result};

/// Name under which the built-in six-pole silver model is addressable.
pub const AG_PALIK_NAME: &str = "ag-palik-6pole";

/// Magnitude below which `1 - alpha*tau` is treated as singular.
const SINGULAR_DENOMINATOR: f64 = 1e-12;

/// One complex pole-residue pair, constants in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolePair {
    pub residue: Complex64,
    pub pole: Complex64,
}

impl PolePair {
    pub const fn new(residue: Complex64, pole: Complex64) -> Self {
        Self { residue, pole }
    }

    /// Contribution of this pair to the relative permittivity at `omega_ev`
    /// (angular frequency expressed as a photon energy).
    #[inline]
    fn susceptibility_ev(&self, omega_ev: f64) -> Complex64 {
        let jw = Complex64::new(0.0, omega_ev);
        self.residue / (jw - self.pole) + self.residue.conj() / (jw - self.pole.conj())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcprpModel {
    eps_inf: f64,
    poles: Vec<PolePair>,
}

impl CcprpModel {
    /// Builds a model, rejecting `eps_inf <= 0` and non-decaying poles.
    pub fn new(eps_inf: f64, poles: Vec<PolePair>) -> Result<Self> {
        if !(eps_inf.is_finite() && eps_inf > 0.0) {
            return Err(Error::invalid("eps_inf", format!("must be > 0, got {eps_inf}")));
        }
        for (i, p) in poles.iter().enumerate() {
            if !(p.pole.re < 0.0) {
                return Err(Error::invalid(
                    "poles",
                    format!("pole {} has Re{{a_p}} = {} (must be < 0)", i + 1, p.pole.re),
                ));
            }
            if !(p.residue.re.is_finite() && p.residue.im.is_finite() && p.pole.im.is_finite()) {
                return Err(Error::invalid("poles", format!("pole {} is not finite", i + 1)));
            }
        }
        Ok(Self { eps_inf, poles })
    }

    /// A dispersion-free dielectric.
    pub fn dielectric(eps_r: f64) -> Result<Self> {
        Self::new(eps_r, Vec::new())
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }

    pub fn poles(&self) -> &[PolePair] {
        &self.poles
    }

    pub fn with_eps_inf(mut self, eps_inf: f64) -> Result<Self> {
        self.eps_inf = eps_inf;
        Self::new(self.eps_inf, self.poles)
    }

    /// Relative permittivity `eps(w)/eps0` at angular frequency `omega` (rad/s).
    pub fn relative_permittivity(&self, omega: f64) -> Complex64 {
        let omega_ev = omega * HBAR_OVER_E;
        self.poles
            .iter()
            .fold(Complex64::new(self.eps_inf, 0.0), |acc, p| {
                acc + p.susceptibility_ev(omega_ev)
            })
    }
}

/// Absolute permittivity (F/m) at angular frequency `omega` (rad/s).
pub fn permittivity(model: &CcprpModel, omega: f64) -> Complex64 {
    model.relative_permittivity(omega) * EPS0
}

/// Debye relaxation pole from a permittivity step and a relaxation time (s).
pub fn debye_pole(delta_eps: f64, tau_relax: f64) -> Result<PolePair> {
    if !(tau_relax > 0.0 && tau_relax.is_finite()) {
        return Err(Error::invalid("tau_relax", format!("must be > 0, got {tau_relax}")));
    }
    let c = delta_eps / (2.0 * tau_relax) * HBAR_OVER_E;
    let a = -1.0 / tau_relax * HBAR_OVER_E;
    Ok(PolePair::new(Complex64::new(c, 0.0), Complex64::new(a, 0.0)))
}

/// Underdamped Lorentz pole; `omega_p` and `delta_damp` in rad/s.
pub fn lorentz_pole(delta_eps: f64, omega_p: f64, delta_damp: f64) -> Result<PolePair> {
    if !(delta_damp >= 0.0 && omega_p > delta_damp && omega_p.is_finite()) {
        return Err(Error::invalid(
            "omega_p",
            format!("requires omega_p > delta_damp >= 0, got {omega_p} and {delta_damp}"),
        ));
    }
    let root = (omega_p * omega_p - delta_damp * delta_damp).sqrt();
    let c = Complex64::new(0.0, delta_eps * omega_p * omega_p / (2.0 * root));
    let a = Complex64::new(-delta_damp, -root);
    Ok(PolePair::new(c * HBAR_OVER_E, a * HBAR_OVER_E))
}

/// Refractive index `(n, k)` at `omega` (rad/s).
///
/// Under `e^{+jwt}` an absorbing medium has `n_complex = n - jk` with `k >= 0`,
/// so `(n - jk)^2 = eps/eps0`. The principal root is taken and negated when
/// needed to make `k >= 0`.
pub fn refractive_index(model: &CcprpModel, omega: f64) -> Result<(f64, f64)> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    let mut root = model.relative_permittivity(omega).sqrt();
    if root.im > 0.0 {
        root = -root;
    }
    Ok((root.re, -root.im))
}

/// Pole constants scaled to one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessPoles {
    pub alpha: Vec<Complex64>,
    pub chi: Vec<Complex64>,
    pub dt_seconds: f64,
}

pub fn dimensionless(model: &CcprpModel, dt_seconds: f64) -> Result<DimensionlessPoles> {
    if !(dt_seconds > 0.0 && dt_seconds.is_finite()) {
        return Err(Error::invalid("dt_seconds", format!("must be > 0, got {dt_seconds}")));
    }
    let scale = dt_seconds / HBAR_OVER_E;
    Ok(DimensionlessPoles {
        alpha: model.poles.iter().map(|p| p.pole * scale).collect(),
        chi: model.poles.iter().map(|p| p.residue * scale).collect(),
        dt_seconds,
    })
}

/// Per-step recursion coefficients shared by the ELBM and FDTD solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateCoefficients {
    pub kappa: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// Equilibrium relative permittivity `eps_inf + sum Re{beta_p}`.
    pub eps_r: f64,
    pub eps_inf: f64,
    pub tau: f64,
    pub dt_seconds: f64,
}

impl UpdateCoefficients {
    pub fn n_poles(&self) -> usize {
        self.kappa.len()
    }

    /// Coefficients of a medium with no poles.
    pub fn non_dispersive(eps_r: f64, dt_seconds: f64) -> Self {
        Self {
            kappa: Vec::new(),
            beta: Vec::new(),
            eps_r,
            eps_inf: eps_r,
            tau: 0.5,
            dt_seconds,
        }
    }
}

pub fn update_coefficients(
    dp: &DimensionlessPoles,
    tau: f64,
    eps_inf: f64,
) -> Result<UpdateCoefficients> {
    let one = Complex64::new(1.0, 0.0);
    let mut kappa = Vec::with_capacity(dp.alpha.len());
    let mut beta = Vec::with_capacity(dp.alpha.len());
    for (index, (&alpha, &chi)) in dp.alpha.iter().zip(&dp.chi).enumerate() {
        let denom = one - alpha * tau;
        if denom.norm() < SINGULAR_DENOMINATOR {
            return Err(Error::SingularPole {
                index,
                magnitude: denom.norm(),
            });
        }
        kappa.push((one + alpha * tau) / denom);
        beta.push(chi / denom);
    }
    let eps_r = eps_inf + beta.iter().map(|b| b.re).sum::<f64>();
    Ok(UpdateCoefficients {
        kappa,
        beta,
        eps_r,
        eps_inf,
        tau,
        dt_seconds: dp.dt_seconds,
    })
}

/// Convenience: `update_coefficients(dimensionless(model, dt), 1/2, eps_inf)`.
pub fn coefficients_for(model: &CcprpModel, dt_seconds: f64) -> Result<UpdateCoefficients> {
    update_coefficients(&dimensionless(model, dt_seconds)?, 0.5, model.eps_inf)
}

/// Six-pole evaporated-silver model.
///
/// The pole set carries the full dispersive response; `eps_inf = 1.0` is the
/// default and reproduces the measured n/k curve.
///
/// The imaginary part of `c_3` is `7.324e2`. Read as `7.324e-2` the model
/// turns optically active (Im eps > 0 above 2 eV) and the time-domain
/// recursions diverge.
pub fn ag_palik_model(eps_inf: f64) -> CcprpModel {
    const RAW: [(f64, f64, f64, f64); 6] = [
        (5.987e-1, 4.195e3, -2.502e-2, -8.626e-3),
        (-2.211e-1, 2.680e-1, -2.021e-1, -9.407e-1),
        (-4.240, 7.324e2, -1.467e1, -1.338),
        (6.391e-1, -7.186e-2, -2.997e-1, -4.034),
        (1.806, 4.563, -1.896, -4.808),
        (1.443, -8.129e1, -9.396, -6.477),
    ];
    let poles = RAW
        .iter()
        .map(|&(c_re, c_im, a_re, a_im)| {
            PolePair::new(Complex64::new(c_re, c_im), Complex64::new(a_re, a_im))
        })
        .collect();
    CcprpModel::new(eps_inf, poles).expect("built-in silver model is valid")
}

/// One pole pair as written in a material file, in eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleEntry {
    pub c_re: f64,
    pub c_im: f64,
    pub a_re: f64,
    pub a_im: f64,
}

impl From<PoleEntry> for PolePair {
    fn from(p: PoleEntry) -> Self {
        PolePair::new(Complex64::new(p.c_re, p.c_im), Complex64::new(p.a_re, p.a_im))
    }
}

impl From<&PolePair> for PoleEntry {
    fn from(p: &PolePair) -> Self {
        PoleEntry {
            c_re: p.residue.re,
            c_im: p.residue.im,
            a_re: p.pole.re,
            a_im: p.pole.im,
        }
    }
}

/// Material block of a configuration: a built-in name, an external file, or
/// inline poles. `eps_inf` overrides the built-in default when given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_inf: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub poles: Vec<PoleEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialFile {
    eps_inf: f64,
    #[serde(default)]
    poles: Vec<PoleEntry>,
}

impl MaterialSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: Some(name.to_owned()),
            ..Self::default()
        }
    }

    pub fn inline(model: &CcprpModel) -> Self {
        Self {
            eps_inf: Some(model.eps_inf()),
            poles: model.poles().iter().map(PoleEntry::from).collect(),
            ..Self::default()
        }
    }

    /// Resolves to a model; relative `file` paths are taken from `base_dir`.
    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<CcprpModel> {
        let sources = [self.name.is_some(), self.file.is_some(), !self.poles.is_empty()];
        if sources.iter().filter(|&&s| s).count() > 1 {
            return Err(Error::Config(
                "material: give only one of `name`, `file` or inline `poles`".into(),
            ));
        }
        if let Some(name) = &self.name {
            return match name.as_str() {
                AG_PALIK_NAME => Ok(ag_palik_model(self.eps_inf.unwrap_or(1.0))),
                "vacuum" => CcprpModel::dielectric(1.0),
                other => Err(Error::Config(format!("unknown material `{other}`"))),
            };
        }
        if let Some(file) = &self.file {
            let path = match base_dir {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file.clone(),
            };
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Config(format!("cannot read material file {}: {e}", path.display()))
            })?;
            let parsed = load_model_str(&text)?;
            return match self.eps_inf {
                Some(e) => parsed.with_eps_inf(e),
                None => Ok(parsed),
            };
        }
        let eps_inf = self
            .eps_inf
            .ok_or_else(|| Error::Config("material: `eps_inf` is required for inline poles".into()))?;
        CcprpModel::new(eps_inf, self.poles.iter().copied().map(PolePair::from).collect())
    }
}

/// Parses a stand-alone material file (`eps_inf` plus `[[poles]]` tables).
pub fn load_model_str(text: &str) -> Result<CcprpModel> {
    let file: MaterialFile = toml::from_str(text)?;
    CcprpModel::new(file.eps_inf, file.poles.into_iter().map(PolePair::from).collect())
}
