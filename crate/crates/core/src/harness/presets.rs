//! Named configurations reproducing the silver-slab experiments.

use super::config::{
    ExperimentConfig, ExperimentKind, ReferenceKind, SlabConfig, SolverChoice, SourceConfig,
    SourceKindName, SweepConfig, SCHEMA_VERSION,
};
use crate::error::{Error, Result};
use crate::materials::{MaterialSpec, AG_PALIK_NAME};

pub const PRESET_NAMES: [&str; 4] = ["fig2-ricker", "fig3-sweep", "fig6-delta", "fig7-convergence"];

pub fn preset_description(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2-ricker" => "Ricker wavelet through a 99.2 nm slab, ELBM and FDTD fields side by side",
        "fig3-sweep" => "continuous-wave transmittance sweep, N_x = 100k, 16k energies in 1-5 eV",
        "fig6-delta" => "single delta-source run, N_x = 1000, N_t = 40000, broadband transmittance",
        "fig7-convergence" => "delta runs at N_x = 100k, N_t = 4000k, log-log error slopes",
        _ => return None,
    })
}

fn base(experiment: ExperimentKind, domain_length_nm: f64, source: SourceConfig) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        experiment,
        solver: SolverChoice::Elbm,
        domain_length_nm,
        n_x: None,
        n_t: None,
        slab: Some(SlabConfig::default()),
        material: MaterialSpec::named(AG_PALIK_NAME),
        source,
        sweep: None,
        probes: Vec::new(),
        snapshots: Vec::new(),
        reference: ReferenceKind::Analytic,
        output_dir: None,
    }
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "fig2-ricker" => {
            let mut src = SourceConfig::of_kind(SourceKindName::Ricker);
            src.position = Some(125);
            src.peak_energy_ev = Some(3.8735);
            src.half_breadth_as = Some(145.32);
            let mut c = base(ExperimentKind::RickerCompare, 3100.0, src);
            c.solver = SolverChoice::Both;
            c.n_x = Some(500);
            c.n_t = Some(400);
            c.snapshots = vec![150, 190, 300];
            c
        }
        "fig3-sweep" => {
            let mut c = base(
                ExperimentKind::CwSweep,
                620.0,
                SourceConfig::of_kind(SourceKindName::Sine),
            );
            c.solver = SolverChoice::Both;
            c.sweep = Some(SweepConfig::range(1, 10));
            c
        }
        "fig6-delta" => {
            let mut c = base(
                ExperimentKind::DeltaBroadband,
                620.0,
                SourceConfig::of_kind(SourceKindName::Delta),
            );
            c.n_x = Some(1000);
            c.n_t = Some(40000);
            c
        }
        "fig7-convergence" => {
            let mut c = base(
                ExperimentKind::Convergence,
                620.0,
                SourceConfig::of_kind(SourceKindName::Delta),
            );
            c.sweep = Some(SweepConfig::range(1, 8));
            c
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
