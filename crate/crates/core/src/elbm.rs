//! D1Q3 electrodynamic lattice-Boltzmann solver with CCPRP dispersion.
//!
//! Four population outcomes per node carry `(c_n, e_n, h_n)` with
//! `c_n = e_n h_n`. E and H are synchronous, colocated moments. Dispersive
//! nodes additionally carry one complex current per pole. Every node whose
//! permittivity differs from vacuum carries a real polarization density `P`.
//!
//! Within [`ElbmState::step`] the fields `E`, `H` held by the state are the
//! moments at the current time. A step runs pole currents, equilibrium
//! current, equilibrium polarization, the polarization collision, population
//! collision and streaming, the free boundary, `E_prev <- E`, and finally
//! recovers the moments for the next time level.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Medium;
use crate::materials::UpdateCoefficients;
use crate::solver::{Launch, Solver, SolverKind};

/// Velocity, E-direction and H-direction of the four outcomes.
pub const C: [i8; 4] = [1, -1, -1, 1];
pub const E_DIR: [f64; 4] = [1.0, 1.0, -1.0, -1.0];
pub const H_DIR: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// Relaxation time in lattice units.
pub const TAU: f64 = 0.5;

/// Growth factor over the reference amplitude that counts as a blow-up.
pub const INSTABILITY_FACTOR: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Incoming populations copied from the adjacent interior node.
    #[default]
    Free,
    Periodic,
}

#[inline]
pub fn equilibrium_population(e: f64, h: f64) -> [f64; 4] {
    std::array::from_fn(|n| (e * E_DIR[n] + h * H_DIR[n]) * 0.25)
}

/// `f <- 2 f_eq(E, H) - f`, then shift each outcome one node along `c_n`
/// with periodic wrap-around.
///
/// Each pass walks against the streaming direction so the value a node
/// pulls from its upstream neighbour is still the pre-collision one.
pub fn collide_and_stream(f: &mut [Vec<f64>; 4], e: &[f64], h: &[f64]) {
    let n_x = e.len();
    if n_x == 0 {
        return;
    }
    let [f0, f1, f2, f3] = f;
    // outcomes 0 and 3 move right: post = +-(E + H)/2 - f
    let last = n_x - 1;
    let a = 0.5 * (e[last] + h[last]);
    let (w0, w3) = (a - f0[last], -a - f3[last]);
    for i in (1..n_x).rev() {
        let a = 0.5 * (e[i - 1] + h[i - 1]);
        f0[i] = a - f0[i - 1];
        f3[i] = -a - f3[i - 1];
    }
    f0[0] = w0;
    f3[0] = w3;
    // outcomes 1 and 2 move left: post = +-(E - H)/2 - f
    let b = 0.5 * (e[0] - h[0]);
    let (w1, w2) = (b - f1[0], -b - f2[0]);
    for i in 0..last {
        let b = 0.5 * (e[i + 1] - h[i + 1]);
        f1[i] = b - f1[i + 1];
        f2[i] = -b - f2[i + 1];
    }
    f1[last] = w1;
    f2[last] = w2;
}

/// Overwrites the populations that would enter from outside the domain with
/// those of the adjacent interior node.
pub fn free_boundary(f: &mut [Vec<f64>; 4], left: Boundary, right: Boundary) {
    let n_x = f[0].len();
    if n_x < 2 {
        return;
    }
    for (n, fnv) in f.iter_mut().enumerate() {
        if C[n] > 0 && left == Boundary::Free {
            fnv[0] = fnv[1];
        }
        if C[n] < 0 && right == Boundary::Free {
            fnv[n_x - 1] = fnv[n_x - 2];
        }
    }
}

/// `j_p <- kappa_p j_p + beta_p (E - E_prev)` for every dispersive node.
///
/// `j` is laid out node-major with `coeffs.n_poles()` entries per node in
/// `nodes`.
pub fn pole_current_update(
    j: &mut [Complex64],
    nodes: &[usize],
    e: &[f64],
    e_prev: &[f64],
    coeffs: &UpdateCoefficients,
) {
    let np = coeffs.n_poles();
    if np == 0 {
        return;
    }
    for (jn, &node) in j.chunks_exact_mut(np).zip(nodes) {
        let de = e[node] - e_prev[node];
        for ((jp, &k), &b) in jn.iter_mut().zip(&coeffs.kappa).zip(&coeffs.beta) {
            *jp = k * *jp + b * de;
        }
    }
}

/// `Re{ sum_p j_p (1 + kappa_p) }` for one node.
#[inline]
pub fn equilibrium_current(j_node: &[Complex64], coeffs: &UpdateCoefficients) -> f64 {
    j_node
        .iter()
        .zip(&coeffs.kappa)
        .map(|(jp, k)| (jp * (1.0 + k)).re)
        .sum()
}

#[inline]
pub fn equilibrium_polarization(e: f64, eps_r: f64, j_eq: f64, tau: f64, dt: f64) -> f64 {
    (eps_r - 1.0) * e - tau / dt * j_eq
}

#[inline]
pub fn polarization_collide(p: f64, p_eq: f64) -> f64 {
    2.0 * p_eq - p
}

/// Recovers `E = (sum f e + P) / eps_r` and `H = sum f h`, returning max |E|.
pub fn moments(
    f: &[Vec<f64>; 4],
    p: &[f64],
    eps_r: &[f64],
    e: &mut [f64],
    h: &mut [f64],
) -> Result<f64> {
    let mut max_e = 0.0f64;
    for i in 0..e.len() {
        let er = eps_r[i];
        if !(er > 0.0) {
            return Err(Error::NonPositivePermittivity { node: i, value: er });
        }
        let (f0, f1, f2, f3) = (f[0][i], f[1][i], f[2][i], f[3][i]);
        let d = f0 + f1 - f2 - f3;
        e[i] = (d + p[i]) / er;
        h[i] = f0 - f1 + f2 - f3;
        max_e = max_e.max(e[i].abs());
    }
    Ok(max_e)
}

/// Full ELBM simulation state.
#[derive(Debug, Clone)]
pub struct ElbmState {
    f: [Vec<f64>; 4],
    p: Vec<f64>,
    e: Vec<f64>,
    h: Vec<f64>,
    e_prev: Vec<f64>,
    eps_r: Vec<f64>,
    inv_eps_r: Vec<f64>,
    dispersive: Vec<bool>,
    nodes: Vec<usize>,
    /// Non-dispersive nodes with `eps_r != 1`.
    dielectric: Vec<usize>,
    j: Vec<Complex64>,
    coeffs: UpdateCoefficients,
    boundary: (Boundary, Boundary),
    time: usize,
    max_e: f64,
    reference: f64,
}

impl ElbmState {
    /// Quiescent state (all fields zero) over the given medium.
    pub fn new(medium: &Medium, coeffs: UpdateCoefficients) -> Result<Self> {
        let n_x = medium.len();
        if n_x < 2 {
            return Err(Error::invalid("n_x", format!("need at least 2 nodes, got {n_x}")));
        }
        if let Some(node) = medium.eps_r.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::NonPositivePermittivity {
                node,
                value: medium.eps_r[node],
            });
        }
        let nodes = medium.dispersive_nodes();
        let dielectric = (0..n_x)
            .filter(|&i| !medium.dispersive[i] && medium.eps_r[i] != 1.0)
            .collect();
        let j = vec![Complex64::new(0.0, 0.0); nodes.len() * coeffs.n_poles()];
        Ok(Self {
            f: std::array::from_fn(|_| vec![0.0; n_x]),
            p: vec![0.0; n_x],
            e: vec![0.0; n_x],
            h: vec![0.0; n_x],
            e_prev: vec![0.0; n_x],
            eps_r: medium.eps_r.clone(),
            inv_eps_r: medium.eps_r.iter().map(|v| 1.0 / v).collect(),
            dispersive: medium.dispersive.clone(),
            nodes,
            dielectric,
            j,
            coeffs,
            boundary: (Boundary::Free, Boundary::Free),
            time: 0,
            max_e: 0.0,
            reference: 0.0,
        })
    }

    pub fn vacuum(n_x: usize) -> Result<Self> {
        Self::new(&Medium::vacuum(n_x), UpdateCoefficients::non_dispersive(1.0, 1.0))
    }

    pub fn with_boundary(mut self, left: Boundary, right: Boundary) -> Self {
        self.boundary = (left, right);
        self
    }

    /// Sets E and H at the current time without touching the populations.
    pub fn set_fields(&mut self, node: usize, e: f64, h: f64) -> Result<()> {
        self.check_node(node)?;
        self.e[node] = e;
        self.h[node] = h;
        self.note_amplitude(e.abs().max(h.abs()));
        Ok(())
    }

    /// Sets E and H everywhere and seeds the populations with their
    /// equilibrium, so the state is self-consistent in vacuum.
    pub fn set_equilibrium(&mut self, e: &[f64], h: &[f64]) -> Result<()> {
        if e.len() != self.n_x() || h.len() != self.n_x() {
            return Err(Error::LengthMismatch {
                left: e.len().min(h.len()),
                right: self.n_x(),
            });
        }
        for i in 0..self.n_x() {
            let feq = equilibrium_population(e[i], h[i]);
            for n in 0..4 {
                self.f[n][i] = feq[n];
            }
        }
        self.e.copy_from_slice(e);
        self.h.copy_from_slice(h);
        let peak = e.iter().chain(h).fold(0.0f64, |m, v| m.max(v.abs()));
        self.note_amplitude(peak);
        Ok(())
    }

    fn note_amplitude(&mut self, a: f64) {
        self.reference = self.reference.max(a);
        self.max_e = self.max_e.max(self.e.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.n_x() {
            return Err(Error::invalid(
                "node",
                format!("{node} outside lattice of {} nodes", self.n_x()),
            ));
        }
        Ok(())
    }

    pub fn e(&self) -> &[f64] {
        &self.e
    }
    pub fn h(&self) -> &[f64] {
        &self.h
    }
    pub fn p(&self) -> &[f64] {
        &self.p
    }
    pub fn e_prev(&self) -> &[f64] {
        &self.e_prev
    }
    pub fn populations(&self) -> &[Vec<f64>; 4] {
        &self.f
    }
    pub fn eps_r_map(&self) -> &[f64] {
        &self.eps_r
    }
    pub fn material_mask(&self) -> &[bool] {
        &self.dispersive
    }
    pub fn coefficients(&self) -> &UpdateCoefficients {
        &self.coeffs
    }
    /// Pole currents of the `k`-th dispersive node.
    pub fn currents(&self, k: usize) -> &[Complex64] {
        let np = self.coeffs.n_poles();
        &self.j[k * np..(k + 1) * np]
    }
    pub fn dispersive_nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// `(E^2 + H^2)/2` summed over the lattice.
    pub fn energy(&self) -> f64 {
        self.e
            .iter()
            .zip(&self.h)
            .map(|(e, h)| 0.5 * (e * e + h * h))
            .sum()
    }

    /// Equilibrium current per dispersive node for the currents now held.
    pub fn equilibrium_currents(&self) -> Vec<f64> {
        let np = self.coeffs.n_poles();
        if np == 0 {
            return vec![0.0; self.nodes.len()];
        }
        self.j
            .chunks_exact(np)
            .map(|jn| equilibrium_current(jn, &self.coeffs))
            .collect()
    }

    /// Advances one time step.
    pub fn step(&mut self) -> Result<()> {
        let np = self.coeffs.n_poles();
        for (k, &i) in self.nodes.iter().enumerate() {
            let mut j_eq = 0.0;
            if np > 0 {
                // pole update and equilibrium current fused into one pass
                let de = self.e[i] - self.e_prev[i];
                let jn = &mut self.j[k * np..(k + 1) * np];
                for ((jp, &kap), &b) in jn.iter_mut().zip(&self.coeffs.kappa).zip(&self.coeffs.beta) {
                    *jp = kap * *jp + b * de;
                    j_eq += (*jp * (1.0 + kap)).re;
                }
            }
            let p_eq = equilibrium_polarization(self.e[i], self.eps_r[i], j_eq, TAU, 1.0);
            self.p[i] = polarization_collide(self.p[i], p_eq);
        }
        for &i in &self.dielectric {
            let p_eq = equilibrium_polarization(self.e[i], self.eps_r[i], 0.0, TAU, 1.0);
            self.p[i] = polarization_collide(self.p[i], p_eq);
        }
        collide_and_stream(&mut self.f, &self.e, &self.h);
        free_boundary(&mut self.f, self.boundary.0, self.boundary.1);
        std::mem::swap(&mut self.e_prev, &mut self.e);
        let max_e = self.recover_moments();
        self.time += 1;
        self.max_e = max_e;
        let bound = INSTABILITY_FACTOR * self.reference.max(f64::MIN_POSITIVE);
        if !(max_e <= bound) {
            return Err(Error::Unstable {
                step: self.time,
                value: max_e,
                bound,
            });
        }
        Ok(())
    }

    /// [`moments`] with the permittivity already validated and inverted.
    fn recover_moments(&mut self) -> f64 {
        let [f0, f1, f2, f3] = &self.f;
        let mut max_e = 0.0f64;
        for i in 0..self.e.len() {
            let (a, b, c, d) = (f0[i], f1[i], f2[i], f3[i]);
            let e = (a + b - c - d + self.p[i]) * self.inv_eps_r[i];
            self.e[i] = e;
            self.h[i] = a - b + c - d;
            max_e = if e.abs() > max_e { e.abs() } else { max_e };
        }
        max_e
    }

    pub fn run(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }
}

impl Solver for ElbmState {
    fn kind(&self) -> SolverKind {
        SolverKind::Elbm
    }

    fn n_x(&self) -> usize {
        self.e.len()
    }

    fn time(&self) -> usize {
        self.time
    }

    /// Directional: `(E, H) += (v/2, v/2)`; soft: `E += v/2`. The collision
    /// doubles the perturbation so a directional value `v` launches a
    /// rightward pulse of amplitude `v`.
    fn add_source(&mut self, node: usize, value: f64, launch: Launch) -> Result<()> {
        self.check_node(node)?;
        if value == 0.0 {
            return Ok(());
        }
        self.e[node] += 0.5 * value;
        if launch == Launch::Directional {
            self.h[node] += 0.5 * value;
        }
        self.note_amplitude(value.abs());
        Ok(())
    }

    fn impulse(&mut self, node: usize, e: f64, h: f64) -> Result<()> {
        self.set_fields(node, e, h)
    }

    fn step(&mut self) -> Result<()> {
        ElbmState::step(self)
    }

    fn probe(&self, node: usize) -> Result<(f64, f64)> {
        self.check_node(node)?;
        Ok((self.e[node], self.h[node]))
    }

    fn max_abs_e(&self) -> f64 {
        self.max_e
    }

    fn state_bytes(&self) -> usize {
        let reals = 4 * self.f[0].len() + self.p.len() + self.e.len() + self.h.len() + self.e_prev.len()
            + 2 * self.eps_r.len();
        reals * std::mem::size_of::<f64>()
            + self.dispersive.len()
            + (self.nodes.len() + self.dielectric.len()) * std::mem::size_of::<usize>()
            + self.j.len() * std::mem::size_of::<Complex64>()
    }
}
