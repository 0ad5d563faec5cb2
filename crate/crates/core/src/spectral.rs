//! Spectra, power spectral density, transmittance, error norms and
//! steady-state Poynting averages.
//!
//! The forward transform is unnormalized, `X_k = sum_n x_n e^{-2 pi i k n / N}`,
//! so a unit impulse has a flat unit spectrum and Parseval reads
//! `sum |x|^2 = (1/N) sum |X|^2`. Bin `i` sits at dimensionless frequency
//! `nu_i = i / N` (cycles per step) and photon energy `h nu_i / dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::constants::H_OVER_E;
use crate::error::{Error, Result};

/// Reference bins below this magnitude yield no transmittance value.
pub const REFERENCE_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    pub dt_seconds: f64,
    pub probe_node: usize,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dt_seconds: f64, probe_node: usize) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::invalid("values", "a time series needs at least 2 samples"));
        }
        if !(dt_seconds > 0.0) {
            return Err(Error::invalid("dt_seconds", "must be > 0"));
        }
        Ok(Self { values, dt_seconds, probe_node })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Discrete spectrum of a length-`n_t` record. `bins` holds either all
/// `n_t` bins or the non-negative half `0..=n_t/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub n_t: usize,
    pub dt_seconds: f64,
}

impl Spectrum {
    /// Frequency resolution in cycles per step.
    pub fn dnu(&self) -> f64 {
        1.0 / self.n_t as f64
    }

    pub fn nu(&self, bin: usize) -> f64 {
        bin as f64 / self.n_t as f64
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.norm()).collect()
    }

    /// Unit spectrum, the analytic reference for a delta launch.
    pub fn unit(n_t: usize, dt_seconds: f64) -> Self {
        Self {
            bins: vec![Complex64::new(1.0, 0.0); n_t / 2 + 1],
            n_t,
            dt_seconds,
        }
    }
}

pub fn fft_series(ts: &TimeSeries) -> Spectrum {
    let mut buf: Vec<Complex64> = ts.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    Spectrum {
        bins: buf,
        n_t: ts.len(),
        dt_seconds: ts.dt_seconds,
    }
}

/// `S(nu) = E(nu) H(nu)` over the non-negative half of the spectrum.
pub fn psd(e: &Spectrum, h: &Spectrum) -> Result<Spectrum> {
    if e.bins.len() != h.bins.len() || e.n_t != h.n_t {
        return Err(Error::LengthMismatch {
            left: e.bins.len(),
            right: h.bins.len(),
        });
    }
    if e.dt_seconds != h.dt_seconds {
        return Err(Error::invalid("dt_seconds", "E and H spectra use different time steps"));
    }
    let half = (e.n_t / 2 + 1).min(e.bins.len());
    Ok(Spectrum {
        bins: e.bins[..half].iter().zip(&h.bins[..half]).map(|(a, b)| a * b).collect(),
        n_t: e.n_t,
        dt_seconds: e.dt_seconds,
    })
}

/// `|S| / |S_ref|` per bin; `None` where the reference vanishes.
pub fn transmittance_from_psd(s: &Spectrum, reference: &Spectrum) -> Result<Vec<Option<f64>>> {
    if s.bins.len() != reference.bins.len() {
        return Err(Error::LengthMismatch {
            left: s.bins.len(),
            right: reference.bins.len(),
        });
    }
    Ok(s.bins
        .iter()
        .zip(&reference.bins)
        .map(|(a, r)| {
            let rn = r.norm();
            (rn >= REFERENCE_FLOOR).then(|| a.norm() / rn)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    /// Bins left out of L1 because the analytical value is zero.
    pub excluded: usize,
}

/// `L1 = mean |(T - S)/T|`, `L2 = sqrt(sum |T - S|^2 / sum |T|^2)` with `T`
/// the analytical and `S` the numerical values.
pub fn error_norms(numerical: &[f64], analytical: &[f64]) -> Result<ErrorNorms> {
    if numerical.len() != analytical.len() {
        return Err(Error::LengthMismatch {
            left: numerical.len(),
            right: analytical.len(),
        });
    }
    if numerical.is_empty() {
        return Err(Error::invalid("numerical", "need at least one bin"));
    }
    let (mut l1, mut used) = (0.0, 0usize);
    let (mut num, mut den) = (0.0, 0.0);
    for (&s, &t) in numerical.iter().zip(analytical) {
        if t != 0.0 {
            l1 += ((t - s) / t).abs();
            used += 1;
        }
        num += (t - s) * (t - s);
        den += t * t;
    }
    let excluded = numerical.len() - used;
    Ok(ErrorNorms {
        l1: if used > 0 { l1 / used as f64 } else { f64::NAN },
        l2: if den > 0.0 { (num / den).sqrt() } else { f64::NAN },
        excluded,
    })
}

/// Photon energy (eV) of every bin held by the spectrum.
pub fn photon_energy_axis(spec: &Spectrum) -> Vec<f64> {
    let scale = H_OVER_E / (spec.n_t as f64 * spec.dt_seconds);
    (0..spec.bins.len()).map(|i| i as f64 * scale).collect()
}

/// Indices whose energy lies in `[lo, hi]` inclusive.
pub fn energy_window(energies: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    (0..energies.len())
        .filter(|&i| energies[i] >= lo && energies[i] <= hi)
        .collect()
}

/// Least-squares fit of `a cos(w t) + b sin(w t)` over `values`, with `t`
/// starting at `t0`.
fn fit_phasor(values: &[f64], t0: usize, omega: f64) -> (f64, f64) {
    let (mut cc, mut ss, mut cs, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, &y) in values.iter().enumerate() {
        let (s, c) = (omega * (t0 + k) as f64).sin_cos();
        cc += c * c;
        ss += s * s;
        cs += c * s;
        yc += y * c;
        ys += y * s;
    }
    let det = cc * ss - cs * cs;
    if det.abs() < 1e-300 {
        return (0.0, 0.0);
    }
    ((yc * ss - ys * cs) / det, (ys * cc - yc * cs) / det)
}

/// Time-averaged `E H` over `[t0, t0 + len)` at the drive frequency, and
/// the amplitude product `|E| |H| / 2` that bounds it.
pub fn window_stats(e: &[f64], h: &[f64], t0: usize, period_steps: f64) -> (f64, f64) {
    let omega = 2.0 * PI / period_steps;
    let (ae, be) = fit_phasor(e, t0, omega);
    let (ah, bh) = fit_phasor(h, t0, omega);
    let power = 0.5 * (ae * ah + be * bh);
    let scale = 0.5 * (ae.hypot(be) * ah.hypot(bh));
    (power, scale)
}

pub fn window_power(e: &[f64], h: &[f64], t0: usize, period_steps: f64) -> f64 {
    window_stats(e, h, t0, period_steps).0
}

/// Window length in steps covering `periods` full periods.
pub fn window_len(periods: usize, period_steps: f64) -> usize {
    (periods as f64 * period_steps).ceil().max(2.0) as usize
}

/// Mean `E H` over the last window of `periods` periods, after checking that
/// it agrees with the preceding window to `tol` relative.
pub fn poynting_average_tol(
    e_ts: &TimeSeries,
    h_ts: &TimeSeries,
    periods: usize,
    period_steps: f64,
    tol: f64,
) -> Result<f64> {
    if e_ts.len() != h_ts.len() {
        return Err(Error::LengthMismatch {
            left: e_ts.len(),
            right: h_ts.len(),
        });
    }
    if periods == 0 || !(period_steps >= 2.0) {
        return Err(Error::invalid("periods", "need >= 1 period of >= 2 steps"));
    }
    let w = window_len(periods, period_steps);
    let n = e_ts.len();
    if n < 2 * w {
        return Err(Error::NotConverged(format!(
            "series of {n} steps is shorter than two {w}-step windows"
        )));
    }
    let (a0, b0) = (n - 2 * w, n - w);
    let prev = window_stats(&e_ts.values[a0..b0], &h_ts.values[a0..b0], a0, period_steps);
    let last = window_stats(&e_ts.values[b0..], &h_ts.values[b0..], b0, period_steps);
    if !converged(prev, last, tol) {
        return Err(Error::NotConverged(format!(
            "consecutive window averages {:e} and {:e} differ by more than {tol:e}",
            prev.0, last.0
        )));
    }
    Ok(last.0)
}

/// [`poynting_average_tol`] with the default `1e-6` criterion.
pub fn poynting_average(
    e_ts: &TimeSeries,
    h_ts: &TimeSeries,
    periods: usize,
    period_steps: f64,
) -> Result<f64> {
    poynting_average_tol(e_ts, h_ts, periods, period_steps, 1e-6)
}

/// Relative agreement of two `(power, amplitude scale)` windows. Powers far
/// below the amplitude product (fields in quadrature) are compared against
/// the amplitude product instead. An all-zero signal never counts as steady.
fn converged(prev: (f64, f64), last: (f64, f64), tol: f64) -> bool {
    let amp = prev.1.max(last.1);
    if !(amp > 0.0) || prev.1 == 0.0 || last.1 == 0.0 {
        return false;
    }
    let mut scale = prev.0.abs().max(last.0.abs());
    if scale < 1e-9 * amp {
        scale = amp;
    }
    (last.0 - prev.0).abs() <= tol * scale
}

/// Records one probe during a run and reports when its windowed Poynting
/// average has settled.
#[derive(Debug, Clone)]
pub struct SteadyStateMonitor {
    e: Vec<f64>,
    h: Vec<f64>,
    period_steps: f64,
    window: usize,
    tol: f64,
    last: Option<(f64, f64)>,
    settled: Option<f64>,
}

impl SteadyStateMonitor {
    pub fn new(periods: usize, period_steps: f64, tol: f64) -> Self {
        Self {
            e: Vec::new(),
            h: Vec::new(),
            period_steps,
            window: window_len(periods.max(1), period_steps),
            tol,
            last: None,
            settled: None,
        }
    }

    /// Adds one sample; returns the settled average once two consecutive
    /// windows agree.
    pub fn push(&mut self, e: f64, h: f64) -> Option<f64> {
        self.e.push(e);
        self.h.push(h);
        let n = self.e.len();
        if self.settled.is_none() && n % self.window == 0 {
            let t0 = n - self.window;
            let p = window_stats(&self.e[t0..], &self.h[t0..], t0, self.period_steps);
            if let Some(prev) = self.last {
                if converged(prev, p, self.tol) {
                    self.settled = Some(p.0);
                }
            }
            self.last = Some(p);
        }
        self.settled
    }

    pub fn settled(&self) -> Option<f64> {
        self.settled
    }

    /// Most recent window average, settled or not.
    pub fn latest(&self) -> Option<f64> {
        self.last.map(|p| p.0)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Relative change between the last two windows, if both exist.
    pub fn last_change(&self) -> Option<f64> {
        let n = self.e.len() / self.window * self.window;
        if n < 2 * self.window {
            return None;
        }
        let (a, b) = (n - 2 * self.window, n - self.window);
        let p0 = window_power(&self.e[a..b], &self.h[a..b], a, self.period_steps);
        let p1 = window_power(&self.e[b..n], &self.h[b..n], b, self.period_steps);
        let scale = p0.abs().max(p1.abs());
        Some(if scale == 0.0 { 0.0 } else { (p1 - p0).abs() / scale })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<f64>) -> TimeSeries {
        TimeSeries::new(v, 1e-18, 0).unwrap()
    }

    #[test]
    fn constant_series_has_only_dc() {
        let s = fft_series(&ts(vec![2.0; 16]));
        assert!((s.bins[0].re - 32.0).abs() < 1e-12);
        assert!(s.bins[1..].iter().all(|b| b.norm() < 1e-12));
    }

    #[test]
    fn sinusoid_at_bin() {
        let n = 64;
        let v = (0..n).map(|i| (2.0 * PI * 5.0 * i as f64 / n as f64).cos()).collect();
        let s = fft_series(&ts(v));
        for (k, b) in s.bins.iter().enumerate() {
            let want = if k == 5 || k == n - 5 { 32.0 } else { 0.0 };
            assert!((b.norm() - want).abs() < 1e-10, "bin {k}");
        }
    }

    #[test]
    fn norms_examples() {
        let n = error_norms(&[1.0], &[2.0]).unwrap();
        assert_eq!((n.l1, n.l2), (0.5, 0.5));
        let z = error_norms(&[0.3, 0.7], &[0.3, 0.7]).unwrap();
        assert_eq!((z.l1, z.l2, z.excluded), (0.0, 0.0, 0));
        let ex = error_norms(&[0.1, 1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(ex.excluded, 1);
        assert!(error_norms(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn psd_zero_and_mismatch() {
        let a = fft_series(&ts(vec![0.0; 8]));
        let b = fft_series(&ts(vec![1.0, 2.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0]));
        let p = psd(&a, &b).unwrap();
        assert_eq!(p.bins.len(), 5);
        assert!(p.bins.iter().all(|v| v.norm() == 0.0));
        let c = fft_series(&ts(vec![1.0; 6]));
        assert!(psd(&a, &c).is_err());
    }

    #[test]
    fn transmittance_guards_reference() {
        let s = Spectrum::unit(8, 1.0);
        let mut r = Spectrum::unit(8, 1.0);
        r.bins[2] = Complex64::new(0.0, 0.0);
        let t = transmittance_from_psd(&s, &r).unwrap();
        assert_eq!(t[0], Some(1.0));
        assert_eq!(t[2], None);
    }

    #[test]
    fn energy_axis() {
        let s = Spectrum::unit(1000, 20.7e-18);
        let ax = photon_energy_axis(&s);
        assert_eq!(ax[0], 0.0);
        assert!((ax[500] - 99.9).abs() < 0.5);
        let fine = photon_energy_axis(&Spectrum::unit(1000, 0.414e-18));
        assert!((fine[500] - 5000.0).abs() < 10.0);
    }

    #[test]
    fn poynting_examples() {
        let n = 4000;
        let period = 37.3;
        let w = 2.0 * PI / period;
        let sin: Vec<f64> = (0..n).map(|t| (w * t as f64).sin()).collect();
        let cos: Vec<f64> = (0..n).map(|t| (w * t as f64).cos()).collect();
        let p = poynting_average(&ts(sin.clone()), &ts(sin.clone()), 5, period).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let q = poynting_average(&ts(sin), &ts(cos), 5, period).unwrap();
        assert!(q.abs() < 1e-12);
    }

    #[test]
    fn poynting_requires_steady_state() {
        let period = 20.0;
        let w = 2.0 * PI / period;
        let growing: Vec<f64> = (0..400).map(|t| t as f64 * (w * t as f64).sin()).collect();
        let r = poynting_average(&ts(growing.clone()), &ts(growing), 2, period);
        assert!(matches!(r, Err(Error::NotConverged(_))));
        let short = ts(vec![0.0; 10]);
        assert!(poynting_average(&short, &short, 2, period).is_err());
    }

    #[test]
    fn monitor_settles() {
        let period = 25.5;
        let w = 2.0 * PI / period;
        let mut m = SteadyStateMonitor::new(3, period, 1e-9);
        let mut got = None;
        for t in 0..2000 {
            let v = 2.0 * (w * t as f64).sin();
            got = m.push(v, v);
        }
        assert!((got.unwrap() - 2.0).abs() < 1e-10);
    }
}
