use dispersim::constants::ev_to_rad_per_s;
use dispersim::elbm::{
    equilibrium_current, equilibrium_polarization, equilibrium_population, moments,
    polarization_collide, Boundary, ElbmState, TAU,
};
use dispersim::fdtd::FdtdState;
use dispersim::geometry::{Layout, Medium};
use dispersim::materials::{
    ag_palik_model, coefficients_for, debye_pole, CcprpModel, UpdateCoefficients,
};
use dispersim::oracle::{slab_transmittance, SlabSpec};
use dispersim::sources::{delta_init, inject, SourceSpec};
use dispersim::spectral::{fft_series, TimeSeries};
use dispersim::{Error, Solver};

fn gaussian(x: f64, x0: f64, w: f64) -> f64 {
    (-((x - x0) / w).powi(2)).exp()
}

#[test]
fn elbm_vacuum_is_dalembert_translation() {
    let n = 200;
    let right: Vec<f64> = (0..n).map(|i| gaussian(i as f64, 80.0, 6.0)).collect();
    let left: Vec<f64> = (0..n).map(|i| 0.4 * (i as f64 * 0.9).sin() * gaussian(i as f64, 110.0, 5.0)).collect();
    let e: Vec<f64> = (0..n).map(|i| right[i] + left[i]).collect();
    let h: Vec<f64> = (0..n).map(|i| right[i] - left[i]).collect();
    let mut s = ElbmState::vacuum(n).unwrap();
    s.set_equilibrium(&e, &h).unwrap();
    let k = 37;
    s.run(k).unwrap();
    for i in 0..n {
        let r = if i >= k { right[i - k] } else { 0.0 };
        let l = if i + k < n { left[i + k] } else { 0.0 };
        assert!((s.e()[i] - (r + l)).abs() < 1e-15, "E at {i}");
        assert!((s.h()[i] - (r - l)).abs() < 1e-15, "H at {i}");
    }
}

#[test]
fn fdtd_vacuum_plane_wave_is_exact() {
    let n = 200;
    let g = |x: f64| gaussian(x, 60.0, 5.0);
    // rightward wave: E^0_i = g(i), H^{-1/2}_{i+1/2} = g(i + 1)
    let e: Vec<f64> = (0..n).map(|i| g(i as f64)).collect();
    let h: Vec<f64> = (0..n - 1).map(|i| g(i as f64 + 1.0)).collect();
    let mut s = FdtdState::vacuum(n).unwrap();
    s.set_fields(&e, &h).unwrap();
    let k = 50;
    s.run(k).unwrap();
    for i in 0..n {
        assert!((s.e()[i] - g(i as f64 - k as f64)).abs() < 1e-14, "E at {i}");
    }
}

#[test]
fn free_boundary_absorbs_both_pulses() {
    let n = 20;
    let mut s = ElbmState::vacuum(n).unwrap();
    let e: Vec<f64> = (0..n).map(|i| if i == 8 { 1.0 } else { 0.0 }).collect();
    let h: Vec<f64> = (0..n).map(|i| if i == 8 { 0.3 } else { 0.0 }).collect();
    s.set_equilibrium(&e, &h).unwrap();
    s.run(40).unwrap();
    let residual = s.e().iter().chain(s.h()).fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(residual < 1e-12, "{residual}");
}

#[test]
fn mur_boundary_absorbs_at_unit_courant() {
    let n = 120;
    let g = |x: f64| gaussian(x, 60.0, 4.0);
    let e: Vec<f64> = (0..n).map(|i| g(i as f64)).collect();
    // zero H splits the pulse into two half-amplitude counter-propagating waves
    let h = vec![0.0; n - 1];
    let mut s = FdtdState::vacuum(n).unwrap();
    s.set_fields(&e, &h).unwrap();
    s.run(200).unwrap();
    let residual = s.e().iter().chain(s.h()).fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(residual < 1e-12, "{residual}");
}

#[test]
fn delta_spectrum_is_flat() {
    let n_x = 300;
    let mut s = ElbmState::vacuum(n_x).unwrap();
    delta_init(&mut s, &SourceSpec::delta(40)).unwrap();
    let (mut e, mut h) = (Vec::new(), Vec::new());
    for _ in 0..512 {
        let (pe, ph) = s.probe(200).unwrap();
        e.push(pe);
        h.push(ph);
        s.step().unwrap();
    }
    for series in [e, h] {
        let spec = fft_series(&TimeSeries::new(series, 1e-18, 200).unwrap());
        for b in &spec.bins {
            assert!((b.norm() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn delta_rejected_by_fdtd() {
    let mut f = FdtdState::vacuum(50).unwrap();
    let err = delta_init(&mut f, &SourceSpec::delta(10)).unwrap_err();
    assert!(matches!(err, Error::DeltaUnsupported));
}

#[test]
fn moment_round_trip() {
    for (e, h) in [(1.0, 0.0), (0.0, 1.0), (-2.5, 0.75), (1e-8, -3e5)] {
        let feq = equilibrium_population(e, h);
        let f: [Vec<f64>; 4] = std::array::from_fn(|n| vec![feq[n]]);
        let (mut eo, mut ho) = ([0.0], [0.0]);
        moments(&f, &[0.0], &[1.0], &mut eo, &mut ho).unwrap();
        let scale = e.abs().max(h.abs()).max(1.0);
        assert!((eo[0] - e).abs() <= 4e-16 * scale);
        assert!((ho[0] - h).abs() <= 4e-16 * scale);
    }
}

fn debye_setup(n_x: usize) -> (Layout, UpdateCoefficients) {
    let layout = Layout::centered_slab(620.0, n_x, 100.0).unwrap();
    let model = CcprpModel::new(2.0, vec![debye_pole(3.0, 2e-16).unwrap()]).unwrap();
    let c = coefficients_for(&model, layout.dt_seconds()).unwrap();
    (layout, c)
}

#[test]
fn polarization_step_identity_in_driven_debye_medium() {
    let (layout, c) = debye_setup(300);
    let mut s = ElbmState::new(&layout.medium(&c).unwrap(), c.clone()).unwrap();
    let src = SourceSpec::sine(60, 30.0);
    let node = layout.slab.unwrap().0 + 5;
    let k = s.dispersive_nodes().iter().position(|&n| n == node).unwrap();
    let dt = layout.dt_seconds();
    let mut peak = 0.0f64;
    for t in 0..2000 {
        inject(&mut s, &src, t, dt).unwrap();
        let (p0, e0) = (s.p()[node], s.e()[node]);
        s.step().unwrap();
        let j_eq = equilibrium_current(s.currents(k), &c);
        peak = peak.max(j_eq.abs());
        let p_eq = equilibrium_polarization(e0, c.eps_r, j_eq, TAU, 1.0);
        // the solver's P step is the collision with this equilibrium
        assert!((s.p()[node] - polarization_collide(p0, p_eq)).abs() < 1e-14);
        // from the relaxed state the step is exactly -j_eq
        let relaxed = (c.eps_r - 1.0) * e0;
        let dp = polarization_collide(relaxed, p_eq) - relaxed;
        assert!((dp + j_eq).abs() <= 1e-12 * j_eq.abs().max(1e-300) + 1e-18);
    }
    assert!(peak > 1e-3, "medium was not driven");
}

#[test]
fn relaxation_contract() {
    // with E frozen and no current, the step-centred P equals (eps_r - 1) E
    for (eps_r, e, p0) in [(4.0, 2.0, 0.0), (1.5, -1.0, 3.0), (2.2, 0.3, -7.0)] {
        let p_eq = equilibrium_polarization(e, eps_r, 0.0, TAU, 1.0);
        let p1 = polarization_collide(p0, p_eq);
        assert!((0.5 * (p0 + p1) - (eps_r - 1.0) * e).abs() < 1e-14);
        // and the relaxed value is a fixed point
        assert_eq!(polarization_collide(p_eq, p_eq), p_eq);
    }
}

/// Independent non-dispersive HV ELBM with a per-node permittivity.
fn reference_elbm(eps_r: &[f64], e0: &[f64], h0: &[f64], steps: usize) -> Vec<f64> {
    let n = eps_r.len();
    let (ed, hd) = ([1.0, 1.0, -1.0, -1.0], [1.0, -1.0, 1.0, -1.0]);
    let c = [1isize, -1, -1, 1];
    let mut f = vec![[0.0f64; 4]; n];
    for i in 0..n {
        for q in 0..4 {
            f[i][q] = 0.25 * (ed[q] * e0[i] + hd[q] * h0[i]);
        }
    }
    let (mut e, mut h, mut p) = (e0.to_vec(), h0.to_vec(), vec![0.0; n]);
    for _ in 0..steps {
        for i in 0..n {
            p[i] = 2.0 * (eps_r[i] - 1.0) * e[i] - p[i];
        }
        let mut g = vec![[0.0f64; 4]; n];
        for i in 0..n {
            for q in 0..4 {
                let post = 0.5 * (ed[q] * e[i] + hd[q] * h[i]) - f[i][q];
                let j = (i as isize + c[q]).rem_euclid(n as isize) as usize;
                g[j][q] = post;
            }
        }
        for q in 0..4 {
            if c[q] > 0 {
                g[0][q] = g[1][q];
            } else {
                g[n - 1][q] = g[n - 2][q];
            }
        }
        f = g;
        for i in 0..n {
            let d: f64 = (0..4).map(|q| ed[q] * f[i][q]).sum();
            e[i] = (d + p[i]) / eps_r[i];
            h[i] = (0..4).map(|q| hd[q] * f[i][q]).sum();
        }
    }
    e
}

#[test]
fn zero_pole_model_is_plain_dielectric_elbm() {
    let layout = Layout::centered_slab(620.0, 300, 100.0).unwrap();
    let c = coefficients_for(&CcprpModel::dielectric(3.2).unwrap(), layout.dt_seconds()).unwrap();
    assert_eq!(c.eps_r, 3.2);
    let medium = layout.medium(&c).unwrap();
    let mut s = ElbmState::new(&medium, c).unwrap();
    let e0: Vec<f64> = (0..300).map(|i| gaussian(i as f64, 80.0, 5.0)).collect();
    s.set_equilibrium(&e0, &e0).unwrap();
    s.run(150).unwrap();
    let want = reference_elbm(&medium.eps_r, &e0, &e0, 150);
    for (a, b) in s.e().iter().zip(&want) {
        assert!((a - b).abs() < 1e-13);
    }
}

/// Transmitted spectrum ratio for a Ricker pulse, slab run over vacuum run.
fn pulse_transmittance(
    make: &dyn Fn(&Medium) -> Box<dyn Solver>,
    medium: &Medium,
    source: &SourceSpec,
    probe: usize,
    n_t: usize,
    dt: f64,
) -> (Vec<f64>, Vec<f64>) {
    let record = |m: &Medium| {
        let mut s = make(m);
        let mut e = Vec::with_capacity(n_t);
        for t in 0..n_t {
            inject(s.as_mut(), source, t, dt).unwrap();
            e.push(s.probe(probe).unwrap().0);
            s.step().unwrap();
        }
        fft_series(&TimeSeries::new(e, dt, probe).unwrap())
    };
    let slab = record(medium);
    let vac = record(&Medium::vacuum(medium.len()));
    let half = n_t / 2;
    let t = (0..half).map(|k| (slab.bins[k].norm() / vac.bins[k].norm()).powi(2)).collect();
    let w = (0..half).map(|k| vac.bins[k].norm()).collect();
    (t, w)
}

#[test]
fn dielectric_slab_matches_fabry_perot() {
    let n_x = 2000;
    let layout = Layout::centered_slab(3100.0, n_x, 100.0).unwrap();
    let dt = layout.dt_seconds();
    let model = CcprpModel::dielectric(4.0).unwrap();
    let c = coefficients_for(&model, dt).unwrap();
    let medium = layout.medium(&c).unwrap();
    let source = SourceSpec::ricker(300, 2.0, 0.0);
    let oracle = SlabSpec::new(layout.realized_thickness_m(), model).unwrap();
    let n_t = 8192;
    let cc = c.clone();
    let makers: [(&str, Box<dyn Fn(&Medium) -> Box<dyn Solver>>); 2] = [
        ("elbm", Box::new(move |m: &Medium| Box::new(ElbmState::new(m, cc.clone()).unwrap()) as Box<dyn Solver>)),
        ("fdtd", Box::new(move |m: &Medium| Box::new(FdtdState::new(m, c.clone()).unwrap()) as Box<dyn Solver>)),
    ];
    for (name, make) in &makers {
        let (t, w) = pulse_transmittance(make.as_ref(), &medium, &source, 1700, n_t, dt);
        let wmax = w.iter().cloned().fold(0.0, f64::max);
        let mut checked = 0;
        for k in 1..t.len() {
            if w[k] < 0.05 * wmax {
                continue;
            }
            let ev = dispersim::constants::H_OVER_E * k as f64 / (n_t as f64 * dt);
            let want = slab_transmittance(&oracle, ev_to_rad_per_s(ev)).unwrap();
            assert!((t[k] - want).abs() < 2e-3, "{name} at {ev} eV: {} vs {want}", t[k]);
            checked += 1;
        }
        assert!(checked > 20, "{name}: {checked}");
    }
}

#[test]
fn transmission_is_reciprocal() {
    // silver next to a dielectric layer: not mirror symmetric
    let n = 600;
    let layout = Layout::centered_slab(1860.0, n, 100.0).unwrap();
    let c = coefficients_for(&ag_palik_model(1.0), layout.dt_seconds()).unwrap();
    let mut fwd = layout.medium(&c).unwrap();
    let (_, b) = layout.slab.unwrap();
    for i in b + 10..b + 40 {
        fwd.eps_r[i] = 2.5;
    }
    let rev = Medium {
        eps_r: fwd.eps_r.iter().rev().cloned().collect(),
        dispersive: fwd.dispersive.iter().rev().cloned().collect(),
    };
    let source = SourceSpec::ricker(100, 3.8, 0.0);
    let run = |m: &Medium| {
        let mut s = ElbmState::new(m, c.clone()).unwrap();
        let mut out = Vec::new();
        for t in 0..1500 {
            inject(&mut s, &source, t, layout.dt_seconds()).unwrap();
            out.push(s.e()[520]);
            s.step().unwrap();
        }
        out
    };
    let (a, bb) = (run(&fwd), run(&rev));
    let peak = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(peak > 1e-3, "{peak}");
    let diff = a.iter().zip(&bb).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(diff < 1e-9 * peak, "{diff} vs {peak}");
}

#[test]
fn solvers_consume_identical_coefficients() {
    let layout = Layout::centered_slab(620.0, 400, 100.0).unwrap();
    let c = coefficients_for(&ag_palik_model(1.0), layout.dt_seconds()).unwrap();
    let m = layout.medium(&c).unwrap();
    let e = ElbmState::new(&m, c.clone()).unwrap();
    let f = FdtdState::new(&m, c.clone()).unwrap();
    assert_eq!(e.coefficients(), f.coefficients());
    assert_eq!(e.eps_r_map(), f.eps_r_map());
}

#[test]
fn silver_delta_run_stays_bounded() {
    let n_x = 1000;
    let layout = Layout::centered_slab(620.0, n_x, 100.0).unwrap();
    let c = coefficients_for(&ag_palik_model(1.0), layout.dt_seconds()).unwrap();
    let mut s = ElbmState::new(&layout.medium(&c).unwrap(), c).unwrap();
    delta_init(&mut s, &SourceSpec::delta(n_x / 4)).unwrap();
    let mut peak = 0.0f64;
    for _ in 0..40_000 {
        s.step().unwrap();
        peak = peak.max(s.max_abs_e());
    }
    assert!(peak.is_finite() && peak <= 1.0 + 1e-12, "{peak}");
}

#[test]
fn periodic_lattice_keeps_energy() {
    let n = 64;
    let e: Vec<f64> = (0..n).map(|i| gaussian(i as f64, 30.0, 4.0)).collect();
    let mut s = ElbmState::vacuum(n).unwrap().with_boundary(Boundary::Periodic, Boundary::Periodic);
    s.set_equilibrium(&e, &vec![0.0; n]).unwrap();
    let e0 = s.energy();
    s.run(500).unwrap();
    assert!((s.energy() - e0).abs() < 1e-12 * e0);
}
