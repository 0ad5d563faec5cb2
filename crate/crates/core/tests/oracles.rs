//! Independent reference computations checked against the library.

use std::f64::consts::PI;

use dispersim::constants::{ev_to_rad_per_s, C0, HBAR_OVER_E, H_OVER_E};
use dispersim::materials::{
    ag_palik_model, coefficients_for, debye_pole, lorentz_pole, refractive_index, CcprpModel,
    PolePair,
};
use dispersim::oracle::{slab_transmittance, transmittance_curve, SlabSpec};
use dispersim::spectral::{fft_series, photon_energy_axis, psd, TimeSeries};
use num_complex::Complex64;

/// Pole table in eV: (Re c, Im c, Re a, Im a).
const SILVER: [(f64, f64, f64, f64); 6] = [
    (5.987e-1, 4.195e3, -2.502e-2, -8.626e-3),
    (-2.211e-1, 2.680e-1, -2.021e-1, -9.407e-1),
    (-4.240, 7.324e2, -1.467e1, -1.338),
    (6.391e-1, -7.186e-2, -2.997e-1, -4.034),
    (1.806, 4.563, -1.896, -4.808),
    (1.443, -8.129e1, -9.396, -6.477),
];

/// `eps_inf + sum c/(jw - a) + c*/(jw - a*)`, written out in real arithmetic.
fn eps_term_by_term(eps_inf: f64, poles: &[(f64, f64, f64, f64)], w_ev: f64) -> (f64, f64) {
    let (mut re, mut im) = (eps_inf, 0.0);
    for &(cr, ci, ar, ai) in poles {
        // c / (jw - a) with jw - a = -ar + j(w - ai)
        for (cr, ci, ar, ai) in [(cr, ci, ar, ai), (cr, -ci, ar, -ai)] {
            let (dr, di) = (-ar, w_ev - ai);
            let den = dr * dr + di * di;
            re += (cr * dr + ci * di) / den;
            im += (ci * dr - cr * di) / den;
        }
    }
    (re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn silver_model_matches_table() {
    let m = ag_palik_model(1.0);
    assert_eq!(m.eps_inf(), 1.0);
    for (p, &(cr, ci, ar, ai)) in m.poles().iter().zip(&SILVER) {
        assert_eq!(p.residue, Complex64::new(cr, ci));
        assert_eq!(p.pole, Complex64::new(ar, ai));
    }
}

#[test]
fn permittivity_term_by_term() {
    let m = ag_palik_model(1.0);
    for i in 0..200 {
        let ev = 0.125 + i as f64 * (20.0 - 0.125) / 199.0;
        let got = m.relative_permittivity(ev_to_rad_per_s(ev));
        let (re, im) = eps_term_by_term(1.0, &SILVER, ev);
        assert!((got.re - re).abs() <= 1e-12 * re.abs().max(im.abs()), "{ev} eV");
        assert!((got.im - im).abs() <= 1e-12 * re.abs().max(im.abs()), "{ev} eV");
    }
}

#[test]
fn silver_is_passive_and_metallic_in_band() {
    let m = ag_palik_model(1.0);
    for i in 0..=400 {
        let ev = 0.125 + i as f64 * 0.05;
        let eps = m.relative_permittivity(ev_to_rad_per_s(ev));
        assert!(eps.im <= 0.0, "gain at {ev} eV");
    }
    // metallic below the plasma edge, weakly absorbing above it
    assert!(m.relative_permittivity(ev_to_rad_per_s(2.0)).re < -10.0);
    assert!(m.relative_permittivity(ev_to_rad_per_s(4.0)).re > 0.0);
}

#[test]
fn tiny_third_residue_gives_gain() {
    let mut raw = SILVER;
    raw[2].1 = 7.324e-2;
    let gain = (0..200)
        .map(|i| 2.0 + i as f64 * 0.015)
        .any(|ev| eps_term_by_term(1.0, &raw, ev).1 > 0.0);
    assert!(gain);
}

#[test]
fn debye_and_lorentz_forms() {
    // Debye: d_eps / (1 + j w tau)
    let tau = 1e-15;
    let m = CcprpModel::new(2.0, vec![debye_pole(3.0, tau).unwrap()]).unwrap();
    for w in [1e13, 1e15, 5e15] {
        let want = Complex64::new(2.0, 0.0) + 3.0 / Complex64::new(1.0, w * tau);
        let got = m.relative_permittivity(w);
        assert!((got - want).norm() < 1e-12 * want.norm(), "{w}");
    }
    // Lorentz: d_eps wp^2 / (wp^2 + 2 j w delta - w^2)
    let (wp, delta) = (4e15, 2e14);
    let m = CcprpModel::new(1.0, vec![lorentz_pole(1.5, wp, delta).unwrap()]).unwrap();
    for w in [1e14, 3.9e15, 8e15] {
        let want = Complex64::new(1.0, 0.0)
            + 1.5 * wp * wp / Complex64::new(wp * wp - w * w, 2.0 * w * delta);
        let got = m.relative_permittivity(w);
        assert!((got - want).norm() < 1e-10 * want.norm(), "{w}");
    }
}

#[test]
fn refractive_index_squares_back() {
    let m = ag_palik_model(1.0);
    for ev in [0.5, 1.0, 2.5, 3.8, 4.2, 5.0, 40.0] {
        let w = ev_to_rad_per_s(ev);
        let (n, k) = refractive_index(&m, w).unwrap();
        assert!(k >= 0.0);
        let sq = Complex64::new(n, -k).powi(2);
        let eps = m.relative_permittivity(w);
        assert!((sq - eps).norm() < 1e-12 * eps.norm(), "{ev} eV");
    }
}

#[test]
fn coefficients_by_hand() {
    let dt = 6.2e-9 / C0;
    let c = coefficients_for(&ag_palik_model(1.0), dt).unwrap();
    let mut eps_r = 1.0;
    for (p, &(cr, ci, ar, ai)) in SILVER.iter().enumerate() {
        let s = dt / HBAR_OVER_E;
        let (alpha, chi) = (Complex64::new(ar, ai) * s, Complex64::new(cr, ci) * s);
        let kappa = (1.0 + alpha / 2.0) / (1.0 - alpha / 2.0);
        let beta = chi / (1.0 - alpha / 2.0);
        assert!((c.kappa[p] - kappa).norm() < 1e-14);
        assert!((c.beta[p] - beta).norm() < 1e-14 * beta.norm());
        assert!(c.kappa[p].norm() < 1.0, "pole {p} not decaying");
        eps_r += beta.re;
    }
    assert!(rel(c.eps_r, eps_r) < 1e-14);
}

/// Characteristic-matrix transmittance with the `exp(-i w t)` convention,
/// where a lossy medium has `n + i k` with `k > 0`.
fn transfer_matrix_t(eps_rel: Complex64, d: f64, omega: f64) -> f64 {
    let eps_phys = eps_rel.conj();
    let mut nn = eps_phys.sqrt();
    if nn.im < 0.0 {
        nn = -nn;
    }
    let delta = nn * omega * d / C0;
    let i = Complex64::i();
    let (cs, sn) = (delta.cos(), delta.sin());
    let m11 = cs;
    let m12 = -i * sn / nn;
    let m21 = -i * nn * sn;
    let m22 = cs;
    let t = 2.0 / (m11 + m12 + m21 + m22);
    t.norm_sqr()
}

#[test]
fn airy_matches_characteristic_matrix() {
    let m = ag_palik_model(1.0);
    let slab = SlabSpec::new(100e-9, m.clone()).unwrap();
    for i in 0..=300 {
        let ev = 0.125 + i as f64 * (5.0 - 0.125) / 300.0;
        let w = ev_to_rad_per_s(ev);
        let want = transfer_matrix_t(m.relative_permittivity(w), 100e-9, w);
        let got = slab_transmittance(&slab, w).unwrap();
        assert!(rel(got, want) < 1e-10, "{ev} eV: {got} vs {want}");
    }
}

#[test]
fn lossless_slab_fabry_perot() {
    // T = 1 / (1 + F sin^2(n k0 d)), F = ((n^2 - 1) / (2 n))^2
    let n: f64 = 2.0;
    let m = CcprpModel::dielectric(n * n).unwrap();
    let d = 250e-9;
    let slab = SlabSpec::new(d, m).unwrap();
    let f = ((n * n - 1.0) / (2.0 * n)).powi(2);
    for ev in [0.7, 1.3, 2.48, 3.1, 4.4] {
        let w = ev_to_rad_per_s(ev);
        let phase = n * w * d / C0;
        let want = 1.0 / (1.0 + f * phase.sin().powi(2));
        assert!(rel(slab_transmittance(&slab, w).unwrap(), want) < 1e-12, "{ev} eV");
    }
}

#[test]
fn thin_slab_limit() {
    let thin = SlabSpec::new(1e-13, ag_palik_model(1.0)).unwrap();
    for ev in [1.0, 3.0, 5.0] {
        let t = slab_transmittance(&thin, ev_to_rad_per_s(ev)).unwrap();
        assert!((t - 1.0).abs() < 1e-4, "{ev} eV: {t}");
    }
}

#[test]
fn thick_silver_is_opaque_below_plasma_edge() {
    let slab = SlabSpec::new(100e-9, ag_palik_model(1.0)).unwrap();
    let t = transmittance_curve(&slab, &[1.0, 2.0, 3.0]).unwrap();
    assert!(t.iter().all(|&v| v < 5e-3));
}

fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| v * Complex64::from_polar(1.0, -2.0 * PI * (k * t) as f64 / n as f64))
                .sum()
        })
        .collect()
}

#[test]
fn fft_matches_naive_dft() {
    let x: Vec<f64> = (0..97).map(|t| ((t * t) as f64 * 0.37).sin() + 0.1 * t as f64).collect();
    let s = fft_series(&TimeSeries::new(x.clone(), 1e-18, 0).unwrap());
    for (a, b) in s.bins.iter().zip(naive_dft(&x)) {
        assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
    }
}

#[test]
fn parseval() {
    let x: Vec<f64> = (0..256).map(|t| (t as f64 * 0.11).cos() * (-(t as f64) / 80.0).exp()).collect();
    let s = fft_series(&TimeSeries::new(x.clone(), 1e-18, 0).unwrap());
    let time: f64 = x.iter().map(|v| v * v).sum();
    let freq: f64 = s.bins.iter().map(|b| b.norm_sqr()).sum::<f64>() / x.len() as f64;
    assert!(rel(freq, time) < 1e-12);
}

#[test]
fn psd_is_product_of_spectra() {
    let e: Vec<f64> = (0..64).map(|t| (t as f64 * 0.3).sin()).collect();
    let h: Vec<f64> = (0..64).map(|t| (t as f64 * 0.7).cos()).collect();
    let se = fft_series(&TimeSeries::new(e.clone(), 1e-18, 0).unwrap());
    let sh = fft_series(&TimeSeries::new(h.clone(), 1e-18, 0).unwrap());
    let p = psd(&se, &sh).unwrap();
    assert_eq!(p.bins.len(), 33);
    let (de, dh) = (naive_dft(&e), naive_dft(&h));
    for (k, b) in p.bins.iter().enumerate() {
        assert!((b - de[k] * dh[k]).norm() < 1e-8 * (1.0 + b.norm()));
    }
}

#[test]
fn energy_axis_nyquist() {
    let dt = 20.7e-18;
    let s = fft_series(&TimeSeries::new(vec![0.0; 4000], dt, 0).unwrap());
    let p = psd(&s, &s).unwrap();
    let axis = photon_energy_axis(&p);
    assert_eq!(axis[0], 0.0);
    let nyq = *axis.last().unwrap();
    assert!((nyq - H_OVER_E * 0.5 / dt).abs() < 1e-9);
    assert!((nyq - 99.9).abs() < 0.5);
    let dt = 0.414e-18;
    let s = fft_series(&TimeSeries::new(vec![0.0; 200], dt, 0).unwrap());
    let nyq = *photon_energy_axis(&psd(&s, &s).unwrap()).last().unwrap();
    assert!((nyq - H_OVER_E * 0.5 / dt).abs() < 1e-9);
    assert!((nyq - 5000.0).abs() < 0.002 * 5000.0);
}

#[test]
fn model_built_from_pairs() {
    let poles: Vec<PolePair> = SILVER
        .iter()
        .map(|&(a, b, c, d)| PolePair::new(Complex64::new(a, b), Complex64::new(c, d)))
        .collect();
    assert_eq!(CcprpModel::new(1.0, poles).unwrap(), ag_palik_model(1.0));
}
