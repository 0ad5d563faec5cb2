//! Experiment configuration (TOML, `schema_version = 1`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Layout;
use crate::materials::{MaterialSpec, AG_PALIK_NAME};
use crate::solver::{Launch, SolverKind};
use crate::sources::{SourceSpec, Waveform};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    RickerCompare,
    CwSweep,
    DeltaBroadband,
    Convergence,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::RickerCompare => "ricker-compare",
            ExperimentKind::CwSweep => "cw-sweep",
            ExperimentKind::DeltaBroadband => "delta-broadband",
            ExperimentKind::Convergence => "convergence",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ricker-compare" => Ok(Self::RickerCompare),
            "cw-sweep" => Ok(Self::CwSweep),
            "delta-broadband" => Ok(Self::DeltaBroadband),
            "convergence" => Ok(Self::Convergence),
            other => Err(Error::Config(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Elbm,
    Fdtd,
    Both,
}

impl SolverChoice {
    pub fn kinds(self) -> Vec<SolverKind> {
        match self {
            SolverChoice::Elbm => vec![SolverKind::Elbm],
            SolverChoice::Fdtd => vec![SolverKind::Fdtd],
            SolverChoice::Both => vec![SolverKind::Elbm, SolverKind::Fdtd],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabConfig {
    /// Target thickness; the lattice realizes `round(thickness / dx)` cells.
    pub thickness_nm: f64,
}

impl Default for SlabConfig {
    fn default() -> Self {
        Self { thickness_nm: 100.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKindName {
    Ricker,
    Sine,
    Delta,
}

/// Source block. `position` defaults to `n_x / 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub kind: SourceKindName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<usize>,
    #[serde(default)]
    pub start: usize,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub launch: Launch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_energy_ev: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_breadth_as: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_steps: Option<f64>,
    #[serde(default = "one")]
    pub eta: f64,
}

fn one() -> f64 {
    1.0
}

impl SourceConfig {
    pub fn of_kind(kind: SourceKindName) -> Self {
        Self {
            kind,
            position: None,
            start: 0,
            amplitude: 1.0,
            launch: Launch::Directional,
            peak_energy_ev: None,
            half_breadth_as: None,
            period_steps: None,
            eta: 1.0,
        }
    }

    /// Concrete source for a lattice of `n_x` nodes. A sine period may be
    /// supplied by the caller (the sweep sets it per frequency).
    pub fn to_spec(&self, n_x: usize, period_override: Option<f64>) -> Result<SourceSpec> {
        let waveform = match self.kind {
            SourceKindName::Ricker => Waveform::Ricker {
                peak_energy_ev: self
                    .peak_energy_ev
                    .ok_or_else(|| missing("source.peak_energy_ev"))?,
                half_breadth_as: self.half_breadth_as.unwrap_or(0.0),
            },
            SourceKindName::Sine => Waveform::Sine {
                period_steps: period_override
                    .or(self.period_steps)
                    .ok_or_else(|| missing("source.period_steps"))?,
            },
            SourceKindName::Delta => Waveform::Delta { eta: self.eta },
        };
        let spec = SourceSpec {
            waveform,
            position: self.position.unwrap_or(n_x / 4),
            start: self.start,
            amplitude: self.amplitude,
            launch: self.launch,
        };
        spec.validate(n_x)?;
        Ok(spec)
    }
}

fn missing(field: &str) -> Error {
    Error::Config(format!("missing required field `{field}`"))
}

/// Indexed-study parameters: run `k` has `n_x = nx_per_k * k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub k_min: usize,
    pub k_max: usize,
    #[serde(default = "default_nx_per_k")]
    pub nx_per_k: usize,
    /// Time steps per `k` (delta runs).
    #[serde(default = "default_nt_per_k")]
    pub nt_per_k: usize,
    /// Frequencies per `k` (continuous-wave runs).
    #[serde(default = "default_nu_per_k")]
    pub nu_per_k: usize,
    #[serde(default = "default_e_min")]
    pub e_min_ev: f64,
    #[serde(default = "default_e_max")]
    pub e_max_ev: f64,
    /// Periods per steady-state averaging window.
    #[serde(default = "default_window_periods")]
    pub window_periods: usize,
    /// Relative agreement of consecutive windows that counts as steady.
    #[serde(default = "default_steady_tol")]
    pub steady_tol: f64,
    /// Step cap per run, in periods of the drive.
    #[serde(default = "default_max_periods")]
    pub max_periods: usize,
}

fn default_nx_per_k() -> usize {
    100
}
fn default_nt_per_k() -> usize {
    4000
}
fn default_nu_per_k() -> usize {
    16
}
fn default_e_min() -> f64 {
    1.0
}
fn default_e_max() -> f64 {
    5.0
}
fn default_window_periods() -> usize {
    2
}
fn default_steady_tol() -> f64 {
    1e-6
}
fn default_max_periods() -> usize {
    2000
}

impl SweepConfig {
    pub fn range(k_min: usize, k_max: usize) -> Self {
        Self {
            k_min,
            k_max,
            nx_per_k: default_nx_per_k(),
            nt_per_k: default_nt_per_k(),
            nu_per_k: default_nu_per_k(),
            e_min_ev: default_e_min(),
            e_max_ev: default_e_max(),
            window_periods: default_window_periods(),
            steady_tol: default_steady_tol(),
            max_periods: default_max_periods(),
        }
    }

    pub fn ks(&self) -> std::ops::RangeInclusive<usize> {
        self.k_min..=self.k_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    /// Flat unit spectrum of the delta launch.
    #[default]
    Analytic,
    /// PSD recorded at the same probe in an empty domain.
    VacuumRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub solver: SolverChoice,
    pub domain_length_nm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_t: Option<usize>,
    /// Absent means an empty (vacuum) domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slab: Option<SlabConfig>,
    #[serde(default = "default_material")]
    pub material: MaterialSpec,
    pub source: SourceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    /// Probe nodes; the first one is the analysis probe.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<usize>,
    /// Steps at which field snapshots are exported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<usize>,
    #[serde(default)]
    pub reference: ReferenceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn default_material() -> MaterialSpec {
    MaterialSpec::named(AG_PALIK_NAME)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(file), Some(dir)) = (&cfg.material.file, path.parent()) {
            if file.is_relative() {
                cfg.material.file = Some(dir.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Checks the fields each experiment needs, before anything is allocated.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if !(self.domain_length_nm > 0.0) {
            return Err(Error::Config("domain_length_nm must be > 0".into()));
        }
        let need = |v: Option<usize>, name: &str| -> Result<usize> {
            match v {
                Some(n) if n > 0 => Ok(n),
                _ => Err(missing(name)),
            }
        };
        let sweep = |cfg: &Self| -> Result<()> {
            let s = cfg.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
            if s.k_min == 0 || s.k_max < s.k_min {
                return Err(Error::Config(format!(
                    "sweep range k = {}..={} is empty or starts at 0",
                    s.k_min, s.k_max
                )));
            }
            if !(s.e_min_ev > 0.0 && s.e_max_ev >= s.e_min_ev) {
                return Err(Error::Config("sweep energy window is invalid".into()));
            }
            if s.nx_per_k < 4 || s.window_periods == 0 || !(s.steady_tol > 0.0) {
                return Err(Error::Config("sweep discretization parameters are invalid".into()));
            }
            Ok(())
        };
        match self.experiment {
            ExperimentKind::RickerCompare => {
                let n_x = need(self.n_x, "n_x")?;
                need(self.n_t, "n_t")?;
                self.expect_source(SourceKindName::Ricker)?;
                self.source.to_spec(n_x, None)?;
            }
            ExperimentKind::DeltaBroadband => {
                let n_x = need(self.n_x, "n_x")?;
                need(self.n_t, "n_t")?;
                self.expect_source(SourceKindName::Delta)?;
                self.source.to_spec(n_x, None)?;
                if self.solver != SolverChoice::Elbm {
                    return Err(Error::Config(
                        "delta-broadband runs on the ELBM only; FDTD cannot carry a delta".into(),
                    ));
                }
            }
            ExperimentKind::CwSweep => {
                sweep(self)?;
                self.expect_source(SourceKindName::Sine)?;
            }
            ExperimentKind::Convergence => {
                sweep(self)?;
                self.expect_source(SourceKindName::Delta)?;
                if self.solver != SolverChoice::Elbm {
                    return Err(Error::Config("convergence runs on the ELBM only".into()));
                }
                let s = self.sweep.as_ref().expect("checked");
                if s.k_max > 50 {
                    return Err(Error::Config("convergence supports k up to 50".into()));
                }
            }
        }
        Ok(())
    }

    fn expect_source(&self, kind: SourceKindName) -> Result<()> {
        if self.source.kind != kind {
            return Err(Error::Config(format!(
                "experiment {} needs a {kind:?} source, got {:?}",
                self.experiment.name(),
                self.source.kind
            )));
        }
        Ok(())
    }

    pub fn thickness_nm(&self) -> f64 {
        self.slab.as_ref().map_or(0.0, |s| s.thickness_nm)
    }

    pub fn layout(&self, n_x: usize) -> Result<Layout> {
        Layout::centered_slab(self.domain_length_nm, n_x, self.thickness_nm())
    }
}

/// Probe midway between the slab's far face (or the domain center when
/// there is no slab) and the right boundary.
pub fn default_transmission_probe(layout: &Layout) -> usize {
    let far = layout.slab.map_or(layout.n_x / 2, |(_, b)| b);
    far + (layout.n_x - far) / 2
}
