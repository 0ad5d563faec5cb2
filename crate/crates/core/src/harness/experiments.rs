//! Experiment drivers. `compute_*` functions return in-memory results;
//! `run_*` functions also write CSVs, `config_echo` and `report` files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{
    default_transmission_probe, ExperimentConfig, ExperimentKind, ReferenceKind, SweepConfig,
};
use super::resources::{measure_resources, Resources};
use crate::constants::H_OVER_E;
use crate::elbm::ElbmState;
use crate::error::{Error, Result};
use crate::export::{
    fmt, write_columns, write_curve, write_elbm_snapshot, write_fdtd_snapshot, write_spectrum,
};
use crate::fdtd::FdtdState;
use crate::geometry::{Layout, Medium};
use crate::materials::{coefficients_for, CcprpModel, UpdateCoefficients};
use crate::oracle::{transmittance_curve, SlabSpec};
use crate::solver::{Solver, SolverKind};
use crate::sources::{inject, SourceSpec, Waveform};
use crate::spectral::{
    energy_window, error_norms, fft_series, photon_energy_axis, psd, transmittance_from_psd,
    ErrorNorms, Spectrum, SteadyStateMonitor, TimeSeries,
};

/// Lattice, material and coefficients for one discretization.
#[derive(Debug, Clone)]
pub struct Setup {
    pub layout: Layout,
    pub model: CcprpModel,
    pub coeffs: UpdateCoefficients,
    pub medium: Medium,
}

impl Setup {
    pub fn new(layout: Layout, model: CcprpModel) -> Result<Self> {
        let coeffs = coefficients_for(&model, layout.dt_seconds())?;
        let medium = layout.medium(&coeffs)?;
        Ok(Self { layout, model, coeffs, medium })
    }

    /// The same lattice with the slab removed.
    pub fn vacuum(&self) -> Self {
        Self {
            layout: Layout { slab: None, ..self.layout.clone() },
            model: self.model.clone(),
            coeffs: self.coeffs.clone(),
            medium: Medium::vacuum(self.layout.n_x),
        }
    }

    pub fn dt(&self) -> f64 {
        self.layout.dt_seconds()
    }

    pub fn solver(&self, kind: SolverKind) -> Result<Box<dyn Solver>> {
        build_solver(kind, &self.medium, &self.coeffs)
    }

    pub fn oracle(&self) -> Result<SlabSpec> {
        SlabSpec::new(self.layout.realized_thickness_m(), self.model.clone())
    }
}

pub fn build_solver(
    kind: SolverKind,
    medium: &Medium,
    coeffs: &UpdateCoefficients,
) -> Result<Box<dyn Solver>> {
    Ok(match kind {
        SolverKind::Elbm => Box::new(ElbmState::new(medium, coeffs.clone())?),
        SolverKind::Fdtd => Box::new(FdtdState::new(medium, coeffs.clone())?),
    })
}

fn setup_for(cfg: &ExperimentConfig, n_x: usize) -> Result<Setup> {
    Setup::new(cfg.layout(n_x)?, cfg.material.resolve(None)?)
}

fn probe_for(cfg: &ExperimentConfig, layout: &Layout) -> Result<usize> {
    let p = cfg
        .probes
        .first()
        .copied()
        .unwrap_or_else(|| default_transmission_probe(layout));
    if p == 0 || p + 1 >= layout.n_x {
        return Err(Error::Config(format!("probe {p} is not interior to {} nodes", layout.n_x)));
    }
    Ok(p)
}

// ---------------------------------------------------------------- ricker

#[derive(Debug, Clone)]
pub struct RickerCompareResult {
    pub layout: Layout,
    pub n_t: usize,
    pub source: SourceSpec,
    pub dt_seconds: f64,
    pub elbm_snapshots: Vec<(usize, ElbmState)>,
    pub fdtd_snapshots: Vec<(usize, FdtdState)>,
    /// `max |E_elbm - E_fdtd|` over the lattice at each snapshot.
    pub snapshot_discrepancy: Vec<f64>,
    /// Peak amplitude of the launched pulse.
    pub peak: f64,
    pub probe: usize,
    pub probe_elbm_e: Vec<f64>,
    pub probe_elbm_h: Vec<f64>,
    pub probe_fdtd_e: Vec<f64>,
    /// Raw staggered H at half node `probe + 1/2` and time `t - 1/2`.
    pub probe_fdtd_h: Vec<f64>,
    /// Lag (steps) of the FDTD H record behind the ELBM H record.
    pub h_lag_steps: f64,
    pub elbm_wall_s: f64,
    pub fdtd_wall_s: f64,
}

impl RickerCompareResult {
    pub fn max_relative_discrepancy(&self) -> f64 {
        self.snapshot_discrepancy.iter().fold(0.0f64, |m, &v| m.max(v)) / self.peak
    }
}

/// Lag maximizing the normalized correlation of `a[t]` with `b[t + lag]` over
/// their overlap, refined by a parabola through the peak and its neighbours.
/// Normalizing per lag keeps pulses truncated by the record end unbiased.
pub fn cross_correlation_lag(a: &[f64], b: &[f64], max_lag: usize) -> f64 {
    let n = a.len().min(b.len()) as isize;
    let m = max_lag as isize;
    let corr = |lag: isize| -> f64 {
        let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
        for t in (0..n).filter(|&t| t + lag >= 0 && t + lag < n) {
            let (x, y) = (a[t as usize], b[(t + lag) as usize]);
            ab += x * y;
            aa += x * x;
            bb += y * y;
        }
        if aa > 0.0 && bb > 0.0 {
            ab / (aa * bb).sqrt()
        } else {
            0.0
        }
    };
    let values: Vec<f64> = (-m..=m).map(corr).collect();
    let (best, _) = values
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut lag = best as f64 - m as f64;
    if best > 0 && best + 1 < values.len() {
        let (y0, y1, y2) = (values[best - 1], values[best], values[best + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        if denom != 0.0 {
            lag += 0.5 * (y0 - y2) / denom;
        }
    }
    lag
}

pub fn compute_ricker_compare(cfg: &ExperimentConfig) -> Result<RickerCompareResult> {
    let n_x = cfg.n_x.ok_or_else(|| Error::Config("missing n_x".into()))?;
    let n_t = cfg.n_t.ok_or_else(|| Error::Config("missing n_t".into()))?;
    let setup = setup_for(cfg, n_x)?;
    let source = cfg.source.to_spec(n_x, None)?;
    let probe = probe_for(cfg, &setup.layout)?;
    ricker_compare(&setup, &source, n_t, probe, &cfg.snapshots)
}

/// Runs both solvers in lockstep from the same source.
pub fn ricker_compare(
    setup: &Setup,
    source: &SourceSpec,
    n_t: usize,
    probe: usize,
    snapshots: &[usize],
) -> Result<RickerCompareResult> {
    let dt = setup.dt();
    let mut elbm = ElbmState::new(&setup.medium, setup.coeffs.clone())?;
    let mut fdtd = FdtdState::new(&setup.medium, setup.coeffs.clone())?;
    let mut out = RickerCompareResult {
        layout: setup.layout.clone(),
        n_t,
        source: *source,
        dt_seconds: dt,
        elbm_snapshots: Vec::new(),
        fdtd_snapshots: Vec::new(),
        snapshot_discrepancy: Vec::new(),
        peak: source.amplitude.abs(),
        probe,
        probe_elbm_e: Vec::with_capacity(n_t),
        probe_elbm_h: Vec::with_capacity(n_t),
        probe_fdtd_e: Vec::with_capacity(n_t),
        probe_fdtd_h: Vec::with_capacity(n_t),
        h_lag_steps: f64::NAN,
        elbm_wall_s: 0.0,
        fdtd_wall_s: 0.0,
    };
    for t in 0..=n_t {
        inject(&mut elbm, source, t, dt)?;
        inject(&mut fdtd, source, t, dt)?;
        if snapshots.contains(&t) {
            let d = elbm
                .e()
                .iter()
                .zip(fdtd.e())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            out.snapshot_discrepancy.push(d);
            out.elbm_snapshots.push((t, elbm.clone()));
            out.fdtd_snapshots.push((t, fdtd.clone()));
        }
        if t == n_t {
            break;
        }
        let (e, h) = Solver::probe(&elbm, probe)?;
        out.probe_elbm_e.push(e);
        out.probe_elbm_h.push(h);
        out.probe_fdtd_e.push(fdtd.e()[probe]);
        out.probe_fdtd_h.push(fdtd.h()[probe]);
        let t0 = Instant::now();
        elbm.step()?;
        out.elbm_wall_s += t0.elapsed().as_secs_f64();
        let t1 = Instant::now();
        fdtd.step()?;
        out.fdtd_wall_s += t1.elapsed().as_secs_f64();
    }
    out.h_lag_steps = cross_correlation_lag(&out.probe_elbm_h, &out.probe_fdtd_h, 8);
    Ok(out)
}

// ---------------------------------------------------------------- cw sweep

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwOptions {
    pub window_periods: usize,
    pub steady_tol: f64,
    pub max_periods: usize,
}

impl From<&SweepConfig> for CwOptions {
    fn from(s: &SweepConfig) -> Self {
        Self {
            window_periods: s.window_periods,
            steady_tol: s.steady_tol,
            max_periods: s.max_periods,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwPoint {
    /// Settled (or, when not converged, latest) time-averaged `E H`.
    pub power: f64,
    pub steps: usize,
    pub converged: bool,
    pub wall_time_s: f64,
}

/// Drives a sine source until the Poynting average at `probe` settles.
pub fn cw_probe_power(
    kind: SolverKind,
    setup: &Setup,
    source: &SourceSpec,
    probe: usize,
    opts: &CwOptions,
) -> Result<CwPoint> {
    let Waveform::Sine { period_steps } = source.waveform else {
        return Err(Error::WrongSourceKind {
            expected: "sine",
            found: source.waveform.name(),
        });
    };
    let mut solver = setup.solver(kind)?;
    let mut monitor = SteadyStateMonitor::new(opts.window_periods, period_steps, opts.steady_tol);
    let max_steps = (opts.max_periods as f64 * period_steps).ceil() as usize + 2 * setup.layout.n_x;
    let dt = setup.dt();
    let start = Instant::now();
    let mut steps = 0;
    while steps < max_steps {
        inject(solver.as_mut(), source, steps, dt)?;
        let (e, h) = solver.probe(probe)?;
        if let Some(p) = monitor.push(e, h) {
            return Ok(CwPoint {
                power: p,
                steps,
                converged: true,
                wall_time_s: start.elapsed().as_secs_f64(),
            });
        }
        solver.step()?;
        steps += 1;
    }
    Ok(CwPoint {
        power: monitor.latest().unwrap_or(0.0),
        steps,
        converged: false,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// `n` energies spanning `[lo, hi]` inclusive.
pub fn cw_energies(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Drive period in steps for a photon energy.
pub fn period_steps_for(energy_ev: f64, dt_seconds: f64) -> f64 {
    H_OVER_E / (energy_ev * dt_seconds)
}

#[derive(Debug, Clone)]
pub struct CwSolverResult {
    pub kind: SolverKind,
    pub transmittance: Vec<f64>,
    pub converged: Vec<bool>,
    /// Norms over converged frequencies only.
    pub norms: Option<ErrorNorms>,
    /// Stepping time summed over every slab and calibration run.
    pub wall_time_s: f64,
    pub steps: usize,
    pub state_bytes: usize,
    pub peak_memory_bytes: Option<u64>,
}

impl CwSolverResult {
    pub fn non_converged(&self) -> usize {
        self.converged.iter().filter(|c| !**c).count()
    }
}

#[derive(Debug, Clone)]
pub struct CwK {
    pub k: usize,
    pub n_x: usize,
    pub dx_m: f64,
    pub dt_seconds: f64,
    pub slab_cells: usize,
    pub thickness_m: f64,
    pub source_position: usize,
    pub probe: usize,
    pub energies: Vec<f64>,
    pub analytic: Vec<f64>,
    pub solvers: Vec<CwSolverResult>,
}

#[derive(Debug, Clone)]
pub struct CwSweepResult {
    pub ks: Vec<CwK>,
}

pub fn compute_cw_sweep(cfg: &ExperimentConfig) -> Result<CwSweepResult> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("missing sweep".into()))?;
    let opts = CwOptions::from(sweep);
    let model = cfg.material.resolve(None)?;
    let mut ks = Vec::new();
    for k in sweep.ks() {
        let n_x = sweep.nx_per_k * k;
        let setup = Setup::new(cfg.layout(n_x)?, model.clone())?;
        let probe = probe_for(cfg, &setup.layout)?;
        let energies = cw_energies(sweep.nu_per_k * k, sweep.e_min_ev, sweep.e_max_ev);
        let base = cfg.source.to_spec(n_x, Some(period_steps_for(energies[0], setup.dt())))?;
        ks.push(cw_sweep_k(k, &setup, &base, probe, &energies, &cfg.solver.kinds(), &opts)?);
    }
    Ok(CwSweepResult { ks })
}

/// One discretization of the sweep: every (solver, energy) pair runs a slab
/// simulation and a vacuum calibration, in parallel, collected in order.
pub fn cw_sweep_k(
    k: usize,
    setup: &Setup,
    base: &SourceSpec,
    probe: usize,
    energies: &[f64],
    kinds: &[SolverKind],
    opts: &CwOptions,
) -> Result<CwK> {
    let oracle = setup.oracle().ok();
    let analytic = match &oracle {
        Some(o) => transmittance_curve(o, energies)?,
        None => vec![1.0; energies.len()],
    };
    let vacuum = setup.vacuum();
    let dt = setup.dt();
    let jobs: Vec<(SolverKind, usize)> = kinds
        .iter()
        .flat_map(|&kind| (0..energies.len()).map(move |i| (kind, i)))
        .collect();
    let points: Vec<(CwPoint, CwPoint)> = jobs
        .par_iter()
        .map(|&(kind, i)| {
            let mut spec = *base;
            spec.waveform = Waveform::Sine {
                period_steps: period_steps_for(energies[i], dt),
            };
            let slab = cw_probe_power(kind, setup, &spec, probe, opts)?;
            let vac = cw_probe_power(kind, &vacuum, &spec, probe, opts)?;
            Ok((slab, vac))
        })
        .collect::<Result<_>>()?;
    let mut solvers = Vec::new();
    for (s, &kind) in kinds.iter().enumerate() {
        let n = energies.len();
        let mut transmittance = Vec::with_capacity(n);
        let mut converged = Vec::with_capacity(n);
        let (mut wall, mut steps) = (0.0, 0);
        for &(slab, vac) in &points[s * n..(s + 1) * n] {
            transmittance.push(slab.power / vac.power);
            converged.push(slab.converged && vac.converged);
            wall += slab.wall_time_s + vac.wall_time_s;
            steps += slab.steps + vac.steps;
        }
        let (num, ana): (Vec<f64>, Vec<f64>) = transmittance
            .iter()
            .zip(&analytic)
            .zip(&converged)
            .filter(|(_, c)| **c)
            .map(|((t, a), _)| (*t, *a))
            .unzip();
        let norms = if num.is_empty() { None } else { Some(error_norms(&num, &ana)?) };
        let (state_bytes, res) = memory_probe(kind, setup, base, 4 * setup.layout.n_x)?;
        solvers.push(CwSolverResult {
            kind,
            transmittance,
            converged,
            norms,
            wall_time_s: wall,
            steps,
            state_bytes,
            peak_memory_bytes: res.peak_memory_bytes,
        });
    }
    Ok(CwK {
        k,
        n_x: setup.layout.n_x,
        dx_m: setup.layout.dx_m,
        dt_seconds: dt,
        slab_cells: setup.layout.slab_cells(),
        thickness_m: setup.layout.realized_thickness_m(),
        source_position: base.position,
        probe,
        energies: energies.to_vec(),
        analytic,
        solvers,
    })
}

/// Runs one solver alone for `steps` steps to sample its peak RSS.
fn memory_probe(
    kind: SolverKind,
    setup: &Setup,
    source: &SourceSpec,
    steps: usize,
) -> Result<(usize, Resources)> {
    let (r, res) = measure_resources(|| -> Result<usize> {
        let mut s = setup.solver(kind)?;
        for t in 0..steps {
            inject(s.as_mut(), source, t, setup.dt())?;
            s.step()?;
        }
        Ok(s.state_bytes())
    });
    Ok((r?, res))
}

// ---------------------------------------------------------------- delta

#[derive(Debug, Clone)]
pub struct DeltaResult {
    pub layout: Layout,
    pub n_t: usize,
    pub source_position: usize,
    pub probe: usize,
    pub dt_seconds: f64,
    pub psd: Spectrum,
    pub reference: Spectrum,
    /// Photon energy of each half-spectrum bin.
    pub energies: Vec<f64>,
    /// Numerical transmittance per bin (`NaN` where the reference vanishes).
    pub transmittance: Vec<f64>,
    /// Analytical transmittance per bin (`NaN` at 0 eV).
    pub analytic: Vec<f64>,
    pub rel_error: Vec<f64>,
    /// Mean relative error over bins in the analysis window.
    pub window_mean_rel: f64,
    pub window_bins: usize,
    /// L1/L2 over every bin from the first non-zero frequency to Nyquist.
    pub full: ErrorNorms,
    /// Largest |E| seen on the lattice over the run.
    pub max_field: f64,
    pub resources: Resources,
    pub state_bytes: usize,
    pub e_series: Vec<f64>,
    pub h_series: Vec<f64>,
}

pub struct DeltaSeries {
    pub e: Vec<f64>,
    pub h: Vec<f64>,
    pub max_field: f64,
    pub state_bytes: usize,
}

/// ELBM impulse response recorded at `probe` for `n_t` steps.
pub fn delta_series(setup: &Setup, source: &SourceSpec, probe: usize, n_t: usize) -> Result<DeltaSeries> {
    let mut s = ElbmState::new(&setup.medium, setup.coeffs.clone())?;
    let dt = setup.dt();
    let (mut e, mut h) = (Vec::with_capacity(n_t), Vec::with_capacity(n_t));
    let mut max_field = 0.0f64;
    for t in 0..n_t {
        inject(&mut s, source, t, dt)?;
        max_field = max_field.max(s.max_abs_e());
        let (pe, ph) = Solver::probe(&s, probe)?;
        e.push(pe);
        h.push(ph);
        s.step()?;
    }
    max_field = max_field.max(s.max_abs_e());
    Ok(DeltaSeries {
        e,
        h,
        max_field,
        state_bytes: Solver::state_bytes(&s),
    })
}

pub fn compute_delta_broadband(cfg: &ExperimentConfig) -> Result<DeltaResult> {
    let n_x = cfg.n_x.ok_or_else(|| Error::Config("missing n_x".into()))?;
    let n_t = cfg.n_t.ok_or_else(|| Error::Config("missing n_t".into()))?;
    let setup = setup_for(cfg, n_x)?;
    let source = cfg.source.to_spec(n_x, None)?;
    let probe = probe_for(cfg, &setup.layout)?;
    let (lo, hi) = cfg
        .sweep
        .as_ref()
        .map_or((1.0, 5.0), |s| (s.e_min_ev, s.e_max_ev));
    delta_broadband(&setup, &source, probe, n_t, cfg.reference, (lo, hi))
}

pub fn delta_broadband(
    setup: &Setup,
    source: &SourceSpec,
    probe: usize,
    n_t: usize,
    reference: ReferenceKind,
    window_ev: (f64, f64),
) -> Result<DeltaResult> {
    if n_t < 2 {
        return Err(Error::invalid("n_t", "need at least 2 steps"));
    }
    let dt = setup.dt();
    let (series, resources) = measure_resources(|| delta_series(setup, source, probe, n_t));
    let series = series?;
    let spectrum = |e: &[f64], h: &[f64]| -> Result<Spectrum> {
        let es = fft_series(&TimeSeries::new(e.to_vec(), dt, probe)?);
        let hs = fft_series(&TimeSeries::new(h.to_vec(), dt, probe)?);
        psd(&es, &hs)
    };
    let s = spectrum(&series.e, &series.h)?;
    let reference = match reference {
        ReferenceKind::Analytic => {
            let mut r = Spectrum::unit(n_t, dt);
            for b in &mut r.bins {
                *b *= source.amplitude * source.amplitude;
            }
            r
        }
        ReferenceKind::VacuumRun => {
            let v = delta_series(&setup.vacuum(), source, probe, n_t)?;
            spectrum(&v.e, &v.h)?
        }
    };
    let energies = photon_energy_axis(&s);
    let transmittance: Vec<f64> = transmittance_from_psd(&s, &reference)?
        .into_iter()
        .map(|t| t.unwrap_or(f64::NAN))
        .collect();
    let mut analytic = vec![f64::NAN; energies.len()];
    match setup.oracle() {
        Ok(o) => {
            let curve = transmittance_curve(&o, &energies[1..])?;
            analytic[1..].copy_from_slice(&curve);
        }
        Err(_) => analytic[1..].fill(1.0),
    }
    let rel_error: Vec<f64> = transmittance
        .iter()
        .zip(&analytic)
        .map(|(t, a)| ((t - a) / a).abs())
        .collect();
    let window = energy_window(&energies, window_ev.0, window_ev.1);
    let valid = |i: &usize| transmittance[*i].is_finite() && analytic[*i].is_finite();
    let win: Vec<usize> = window.into_iter().filter(valid).collect();
    let window_mean_rel = win.iter().map(|&i| rel_error[i]).sum::<f64>() / win.len().max(1) as f64;
    let full_idx: Vec<usize> = (1..energies.len()).filter(valid).collect();
    let num: Vec<f64> = full_idx.iter().map(|&i| transmittance[i]).collect();
    let ana: Vec<f64> = full_idx.iter().map(|&i| analytic[i]).collect();
    let full = error_norms(&num, &ana)?;
    Ok(DeltaResult {
        layout: setup.layout.clone(),
        n_t,
        source_position: source.position,
        probe,
        dt_seconds: dt,
        psd: s,
        reference,
        energies,
        transmittance,
        analytic,
        rel_error,
        window_mean_rel,
        window_bins: win.len(),
        full,
        max_field: series.max_field,
        resources,
        state_bytes: series.state_bytes,
        e_series: series.e,
        h_series: series.h,
    })
}

// ---------------------------------------------------------------- convergence

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub k: usize,
    pub n_x: usize,
    pub n_t: usize,
    /// Frequencies resolved up to Nyquist.
    pub n_nu: usize,
    pub l1: f64,
    pub l2: f64,
    pub window_mean_rel: f64,
    pub wall_time_s: f64,
    pub error: Option<String>,
}

/// Least-squares line `y = slope x + intercept` in log-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// 95% confidence interval for the slope (`NaN` bounds with 2 points).
    pub ci95: (f64, f64),
    pub points: usize,
}

/// Two-sided 95% Student-t quantiles for 1..=30 degrees of freedom.
const T975: [f64; 30] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045, 2.042,
];

/// Fits `ln y` against `ln x`; `None` for fewer than two usable points.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let (stderr, ci95) = if n > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (rss / (n - 2) as f64 / sxx).sqrt();
        let t = T975.get(n - 3).copied().unwrap_or(1.96);
        (se, (slope - t * se, slope + t * se))
    } else {
        (f64::NAN, (f64::NAN, f64::NAN))
    };
    Some(SlopeFit {
        slope,
        intercept,
        stderr,
        ci95,
        points: n,
    })
}

#[derive(Debug, Clone)]
pub struct ConvergenceResult {
    pub rows: Vec<ConvergenceRow>,
    pub fit_l1: Option<SlopeFit>,
    pub fit_l2: Option<SlopeFit>,
    pub fit_l1_nu: Option<SlopeFit>,
    pub fit_l2_nu: Option<SlopeFit>,
}

pub fn compute_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceResult> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("missing sweep".into()))?;
    let model = cfg.material.resolve(None)?;
    let window = (sweep.e_min_ev, sweep.e_max_ev);
    let ks: Vec<usize> = sweep.ks().collect();
    let rows: Vec<ConvergenceRow> = ks
        .par_iter()
        .map(|&k| {
            let n_x = sweep.nx_per_k * k;
            let n_t = sweep.nt_per_k * k;
            let run = || -> Result<DeltaResult> {
                let setup = Setup::new(cfg.layout(n_x)?, model.clone())?;
                let source = cfg.source.to_spec(n_x, None)?;
                let probe = default_transmission_probe(&setup.layout);
                delta_broadband(&setup, &source, probe, n_t, cfg.reference, window)
            };
            match run() {
                Ok(r) => ConvergenceRow {
                    k,
                    n_x,
                    n_t,
                    n_nu: n_t / 2,
                    l1: r.full.l1,
                    l2: r.full.l2,
                    window_mean_rel: r.window_mean_rel,
                    wall_time_s: r.resources.wall_time_s,
                    error: None,
                },
                Err(e) => ConvergenceRow {
                    k,
                    n_x,
                    n_t,
                    n_nu: n_t / 2,
                    l1: f64::NAN,
                    l2: f64::NAN,
                    window_mean_rel: f64::NAN,
                    wall_time_s: 0.0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(convergence_from_rows(rows))
}

pub fn convergence_from_rows(rows: Vec<ConvergenceRow>) -> ConvergenceResult {
    let ok: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.error.is_none()).collect();
    let nx: Vec<f64> = ok.iter().map(|r| r.n_x as f64).collect();
    let nu: Vec<f64> = ok.iter().map(|r| r.n_nu as f64).collect();
    let l1: Vec<f64> = ok.iter().map(|r| r.l1).collect();
    let l2: Vec<f64> = ok.iter().map(|r| r.l2).collect();
    ConvergenceResult {
        fit_l1: loglog_fit(&nx, &l1),
        fit_l2: loglog_fit(&nx, &l2),
        fit_l1_nu: loglog_fit(&nu, &l1),
        fit_l2_nu: loglog_fit(&nu, &l2),
        rows,
    }
}

// ---------------------------------------------------------------- reports

/// Run metadata written as `key=value` lines.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub experiment: String,
    pub wall_time_s: f64,
    pub peak_memory_bytes: Option<u64>,
    pub steps: usize,
    pub config_echo: String,
    pub outputs: Vec<PathBuf>,
    pub metrics: Vec<(String, String)>,
}

impl RunReport {
    fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            experiment: cfg.experiment.name().to_owned(),
            config_echo: cfg.to_toml(),
            ..Self::default()
        }
    }

    pub fn metric(&mut self, key: &str, value: impl ToString) {
        self.metrics.push((key.to_owned(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.metrics
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment={}", self.experiment);
        let _ = writeln!(s, "steps={}", self.steps);
        let _ = writeln!(s, "wall_time_s={}", fmt(self.wall_time_s));
        match self.peak_memory_bytes {
            Some(m) => {
                let _ = writeln!(s, "peak_memory_bytes={m}");
            }
            None => {
                let _ = writeln!(s, "peak_memory_bytes=unavailable");
            }
        }
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "{k}={v}");
        }
        for p in &self.outputs {
            let _ = writeln!(s, "output={}", p.display());
        }
        s
    }

    fn write(&mut self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config_echo"), &self.config_echo)?;
        std::fs::write(dir.join("report"), self.to_text())?;
        Ok(())
    }
}

/// `<out>/<experiment-name>`.
pub fn experiment_dir(cfg: &ExperimentConfig, out: Option<&Path>) -> PathBuf {
    let base = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));
    base.join(cfg.experiment.name())
}

pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunReport> {
    cfg.validate()?;
    let dir = experiment_dir(cfg, out);
    match cfg.experiment {
        ExperimentKind::RickerCompare => run_ricker_compare(cfg, &dir),
        ExperimentKind::CwSweep => run_cw_sweep(cfg, &dir),
        ExperimentKind::DeltaBroadband => run_delta_broadband(cfg, &dir),
        ExperimentKind::Convergence => run_convergence(cfg, &dir),
    }
}

pub fn run_ricker_compare(cfg: &ExperimentConfig, dir: &Path) -> Result<RunReport> {
    let r = compute_ricker_compare(cfg)?;
    let mut rep = RunReport::new(cfg);
    rep.steps = r.n_t;
    rep.wall_time_s = r.elbm_wall_s + r.fdtd_wall_s;
    rep.peak_memory_bytes = super::resources::peak_rss_bytes();
    rep.metric("n_x", r.layout.n_x);
    rep.metric("dx_nm", fmt(r.layout.dx_m * 1e9));
    rep.metric("dt_as", fmt(r.dt_seconds * 1e18));
    rep.metric("slab_cells", r.layout.slab_cells());
    rep.metric("slab_thickness_nm", fmt(r.layout.realized_thickness_m() * 1e9));
    rep.metric("source_position", r.source.position);
    if let Waveform::Ricker { peak_energy_ev, half_breadth_as } = r.source.waveform {
        rep.metric("ricker_peak_energy_ev", fmt(peak_energy_ev));
        rep.metric("ricker_half_breadth_as", fmt(half_breadth_as));
        rep.metric(
            "ricker_half_breadth_steps",
            fmt(crate::sources::half_breadth_steps(half_breadth_as, r.dt_seconds)),
        );
    }
    rep.metric("max_e_discrepancy_rel", fmt(r.max_relative_discrepancy()));
    rep.metric("h_lag_steps", fmt(r.h_lag_steps));
    rep.metric("probe", r.probe);
    rep.metric("elbm_wall_time_s", fmt(r.elbm_wall_s));
    rep.metric("fdtd_wall_time_s", fmt(r.fdtd_wall_s));
    for ((t, es), ((_, fs), d)) in r
        .elbm_snapshots
        .iter()
        .zip(r.fdtd_snapshots.iter().zip(&r.snapshot_discrepancy))
    {
        let pe = dir.join(format!("elbm_snapshot_{t}.csv"));
        let pf = dir.join(format!("fdtd_snapshot_{t}.csv"));
        write_elbm_snapshot(&pe, &r.layout, es)?;
        write_fdtd_snapshot(&pf, &r.layout, fs)?;
        rep.metric(&format!("e_discrepancy_rel_step_{t}"), fmt(d / r.peak));
        rep.outputs.extend([pe, pf]);
    }
    let steps: Vec<f64> = (0..r.probe_elbm_e.len()).map(|t| t as f64).collect();
    let pp = dir.join("probe_series.csv");
    write_columns(
        &pp,
        &["step", "elbm_E", "elbm_H", "fdtd_E", "fdtd_H_staggered"],
        &[&steps, &r.probe_elbm_e, &r.probe_elbm_h, &r.probe_fdtd_e, &r.probe_fdtd_h],
    )?;
    rep.outputs.push(pp);
    rep.write(dir)?;
    Ok(rep)
}

pub fn run_cw_sweep(cfg: &ExperimentConfig, dir: &Path) -> Result<RunReport> {
    let r = compute_cw_sweep(cfg)?;
    let mut rep = RunReport::new(cfg);
    let mut rows: Vec<[f64; 8]> = Vec::new();
    for k in &r.ks {
        let mut cols: Vec<Vec<f64>> = vec![k.energies.clone(), k.analytic.clone()];
        let mut headers = vec!["energy_ev".to_owned(), "T_analytical".to_owned()];
        for s in &k.solvers {
            let name = s.kind.name();
            headers.push(format!("T_{name}"));
            cols.push(s.transmittance.clone());
            headers.push(format!("converged_{name}"));
            cols.push(s.converged.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect());
            rep.steps += s.steps;
            rep.wall_time_s += s.wall_time_s;
            rep.peak_memory_bytes = match (rep.peak_memory_bytes, s.peak_memory_bytes) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            let (l1, l2) = s.norms.map_or((f64::NAN, f64::NAN), |n| (n.l1, n.l2));
            rows.push([
                k.k as f64,
                k.n_x as f64,
                k.energies.len() as f64,
                if s.kind == SolverKind::Elbm { 0.0 } else { 1.0 },
                l1,
                l2,
                s.wall_time_s,
                s.state_bytes as f64,
            ]);
            rep.metric(&format!("k{}_{name}_L1", k.k), fmt(l1));
            rep.metric(&format!("k{}_{name}_L2", k.k), fmt(l2));
            rep.metric(&format!("k{}_{name}_non_converged", k.k), s.non_converged());
            rep.metric(&format!("k{}_{name}_wall_time_s", k.k), fmt(s.wall_time_s));
            rep.metric(&format!("k{}_{name}_state_bytes", k.k), s.state_bytes);
            rep.metric(
                &format!("k{}_{name}_peak_memory_bytes", k.k),
                s.peak_memory_bytes.map_or("unavailable".to_owned(), |m| m.to_string()),
            );
        }
        rep.metric(&format!("k{}_slab_cells", k.k), k.slab_cells);
        rep.metric(&format!("k{}_slab_thickness_nm", k.k), fmt(k.thickness_m * 1e9));
        let path = dir.join(format!("transmittance_k{}.csv", k.k));
        let h: Vec<&str> = headers.iter().map(String::as_str).collect();
        let c: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        write_columns(&path, &h, &c)?;
        rep.outputs.push(path);
    }
    let ratio = timing_ratio(&r);
    if let Some((t, m)) = ratio {
        rep.metric("elbm_over_fdtd_wall_time", fmt(t));
        rep.metric("elbm_over_fdtd_state_bytes", fmt(m));
    }
    let path = dir.join("norms.csv");
    let cols: Vec<Vec<f64>> = (0..8).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let c: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    write_columns(
        &path,
        &["k", "n_x", "n_nu", "solver_fdtd", "L1", "L2", "wall_time_s", "state_bytes"],
        &c,
    )?;
    rep.outputs.push(path);
    rep.write(dir)?;
    Ok(rep)
}

/// Summed ELBM/FDTD wall-time and state-size ratios across all k.
pub fn timing_ratio(r: &CwSweepResult) -> Option<(f64, f64)> {
    let sum = |kind: SolverKind, f: &dyn Fn(&CwSolverResult) -> f64| -> Option<f64> {
        let v: Vec<f64> = r
            .ks
            .iter()
            .flat_map(|k| k.solvers.iter().filter(|s| s.kind == kind).map(f))
            .collect();
        (!v.is_empty()).then(|| v.iter().sum())
    };
    let te = sum(SolverKind::Elbm, &|s| s.wall_time_s)?;
    let tf = sum(SolverKind::Fdtd, &|s| s.wall_time_s)?;
    let me = sum(SolverKind::Elbm, &|s| s.state_bytes as f64)?;
    let mf = sum(SolverKind::Fdtd, &|s| s.state_bytes as f64)?;
    Some((te / tf, me / mf))
}

pub fn run_delta_broadband(cfg: &ExperimentConfig, dir: &Path) -> Result<RunReport> {
    let r = compute_delta_broadband(cfg)?;
    let mut rep = RunReport::new(cfg);
    rep.steps = r.n_t;
    rep.wall_time_s = r.resources.wall_time_s;
    rep.peak_memory_bytes = r.resources.peak_memory_bytes;
    rep.metric("n_x", r.layout.n_x);
    rep.metric("dt_as", fmt(r.dt_seconds * 1e18));
    rep.metric("slab_cells", r.layout.slab_cells());
    rep.metric("slab_thickness_nm", fmt(r.layout.realized_thickness_m() * 1e9));
    rep.metric("source_position", r.source_position);
    rep.metric("probe", r.probe);
    rep.metric("window_mean_rel_error", fmt(r.window_mean_rel));
    rep.metric("window_bins", r.window_bins);
    rep.metric("full_L1", fmt(r.full.l1));
    rep.metric("full_L2", fmt(r.full.l2));
    rep.metric("full_excluded_bins", r.full.excluded);
    rep.metric("max_field", fmt(r.max_field));
    rep.metric("state_bytes", r.state_bytes);
    let ps = dir.join("psd.csv");
    write_spectrum(&ps, &r.psd, true)?;
    let pc = dir.join("analytic.csv");
    write_curve(&pc, &r.energies, &r.analytic)?;
    let pt = dir.join("transmittance.csv");
    write_columns(
        &pt,
        &["energy_ev", "T_numerical", "T_analytical", "rel_error"],
        &[&r.energies, &r.transmittance, &r.analytic, &r.rel_error],
    )?;
    rep.outputs.extend([ps, pc, pt]);
    rep.write(dir)?;
    Ok(rep)
}

pub fn run_convergence(cfg: &ExperimentConfig, dir: &Path) -> Result<RunReport> {
    let r = compute_convergence(cfg)?;
    let mut rep = RunReport::new(cfg);
    rep.peak_memory_bytes = super::resources::peak_rss_bytes();
    for row in &r.rows {
        rep.steps += row.n_t;
        rep.wall_time_s += row.wall_time_s;
        if let Some(e) = &row.error {
            rep.metric(&format!("k{}_error", row.k), e);
        }
    }
    for (name, fit) in [
        ("L1_vs_nx", r.fit_l1),
        ("L2_vs_nx", r.fit_l2),
        ("L1_vs_nnu", r.fit_l1_nu),
        ("L2_vs_nnu", r.fit_l2_nu),
    ] {
        match fit {
            Some(f) => {
                rep.metric(&format!("slope_{name}"), fmt(f.slope));
                rep.metric(&format!("slope_{name}_stderr"), fmt(f.stderr));
                rep.metric(&format!("slope_{name}_ci95_lo"), fmt(f.ci95.0));
                rep.metric(&format!("slope_{name}_ci95_hi"), fmt(f.ci95.1));
            }
            None => rep.metric(&format!("slope_{name}"), "insufficient points"),
        }
    }
    let col = |f: &dyn Fn(&ConvergenceRow) -> f64| -> Vec<f64> { r.rows.iter().map(f).collect() };
    let path = dir.join("convergence.csv");
    write_columns(
        &path,
        &["k", "n_x", "n_t", "n_nu", "L1", "L2", "window_mean_rel", "wall_time_s"],
        &[
            &col(&|r| r.k as f64),
            &col(&|r| r.n_x as f64),
            &col(&|r| r.n_t as f64),
            &col(&|r| r.n_nu as f64),
            &col(&|r| r.l1),
            &col(&|r| r.l2),
            &col(&|r| r.window_mean_rel),
            &col(&|r| r.wall_time_s),
        ],
    )?;
    rep.outputs.push(path);
    rep.write(dir)?;
    Ok(rep)
}
