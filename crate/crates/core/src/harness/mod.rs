//! Config-driven experiment harness.

pub mod config;
pub mod experiments;
pub mod presets;
pub mod resources;

pub use config::{
    ExperimentConfig, ExperimentKind, ReferenceKind, SlabConfig, SolverChoice, SourceConfig,
    SourceKindName, SweepConfig,
};
pub use experiments::{
    compute_convergence, compute_cw_sweep, compute_delta_broadband, compute_ricker_compare,
    run_convergence, run_cw_sweep, run_delta_broadband, run_experiment, run_ricker_compare,
    RunReport, Setup,
};
pub use presets::{preset, PRESET_NAMES};
pub use resources::{measure_resources, Resources};
