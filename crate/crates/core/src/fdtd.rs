//! 1D Yee FDTD reference solver with ADE/CCPRP dispersion and first-order
//! Mur boundaries.
//!
//! `E` lives on integer nodes `0..n_x`, `H` on half nodes `i + 1/2` for
//! `i in 0..n_x-1`. At state time `n` the arrays hold `E^n` and `H^{n-1/2}`.
//! Fields are in lattice units with `c = 1`, so a rightward wave has `E = H`.
//!
//! At dispersive nodes the E update is the trapezoidal ADE form
//!
//! ```text
//! eps_r dE = S (-(H_i - H_{i-1})) - Re{ sum_p (1 + kappa_p) J_p }
//! J_p     <- kappa_p J_p + beta_p dE
//! ```
//!
//! with `J_p` scaled by the time step and the same `kappa_p`, `beta_p`,
//! `eps_r` the ELBM consumes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Medium;
use crate::materials::UpdateCoefficients;
use crate::solver::{Launch, Solver, SolverKind};

pub use crate::elbm::INSTABILITY_FACTOR;

#[derive(Debug, Clone)]
pub struct FdtdState {
    e: Vec<f64>,
    h: Vec<f64>,
    e_prev: Vec<f64>,
    eps_r: Vec<f64>,
    inv_eps_r: Vec<f64>,
    dispersive: Vec<bool>,
    nodes: Vec<usize>,
    j: Vec<Complex64>,
    coeffs: UpdateCoefficients,
    courant: f64,
    /// H kicks owed to the next half step by directional sources.
    pending: Vec<(usize, f64)>,
    time: usize,
    max_e: f64,
    reference: f64,
}

impl FdtdState {
    pub fn new(medium: &Medium, coeffs: UpdateCoefficients) -> Result<Self> {
        let n_x = medium.len();
        if n_x < 3 {
            return Err(Error::invalid("n_x", format!("need at least 3 nodes, got {n_x}")));
        }
        if let Some(node) = medium.eps_r.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::NonPositivePermittivity {
                node,
                value: medium.eps_r[node],
            });
        }
        let nodes = medium.dispersive_nodes();
        if nodes.first() == Some(&0) || nodes.last() == Some(&(n_x - 1)) {
            return Err(Error::invalid("medium", "dispersive nodes must be interior"));
        }
        let j = vec![Complex64::new(0.0, 0.0); nodes.len() * coeffs.n_poles()];
        Ok(Self {
            e: vec![0.0; n_x],
            h: vec![0.0; n_x - 1],
            e_prev: vec![0.0; n_x],
            eps_r: medium.eps_r.clone(),
            inv_eps_r: medium.eps_r.iter().map(|v| 1.0 / v).collect(),
            dispersive: medium.dispersive.clone(),
            nodes,
            j,
            coeffs,
            courant: 1.0,
            pending: Vec::new(),
            time: 0,
            max_e: 0.0,
            reference: 0.0,
        })
    }

    pub fn vacuum(n_x: usize) -> Result<Self> {
        Self::new(&Medium::vacuum(n_x), UpdateCoefficients::non_dispersive(1.0, 1.0))
    }

    /// Sets the Courant number `S = c dt / dx`. The update coefficients must
    /// have been built for the matching time step.
    pub fn with_courant(mut self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::invalid("courant", format!("need 0 < S <= 1, got {s}")));
        }
        self.courant = s;
        Ok(self)
    }

    pub fn courant(&self) -> f64 {
        self.courant
    }
    pub fn e(&self) -> &[f64] {
        &self.e
    }
    pub fn h(&self) -> &[f64] {
        &self.h
    }
    pub fn e_prev(&self) -> &[f64] {
        &self.e_prev
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

    /// Overwrites the E and H arrays (`H` at the preceding half step).
    pub fn set_fields(&mut self, e: &[f64], h: &[f64]) -> Result<()> {
        if e.len() != self.e.len() {
            return Err(Error::LengthMismatch { left: e.len(), right: self.e.len() });
        }
        if h.len() != self.h.len() {
            return Err(Error::LengthMismatch { left: h.len(), right: self.h.len() });
        }
        self.e.copy_from_slice(e);
        self.h.copy_from_slice(h);
        let peak = e.iter().chain(h).fold(0.0f64, |m, v| m.max(v.abs()));
        self.reference = self.reference.max(peak);
        self.max_e = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(())
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.e.len() {
            return Err(Error::invalid(
                "node",
                format!("{node} outside lattice of {} nodes", self.e.len()),
            ));
        }
        Ok(())
    }

    /// H at `k + 1/2` one half step ahead, computed from the current E.
    #[inline]
    fn h_ahead(&self, k: usize) -> f64 {
        let kick: f64 = self
            .pending
            .iter()
            .filter(|(i, _)| *i == k)
            .map(|(_, v)| v)
            .sum();
        self.h[k] - self.courant * (self.e[k + 1] - self.e[k]) + kick
    }

    /// Advances one leapfrog step.
    pub fn step(&mut self) -> Result<()> {
        fdtd_step(self)
    }

    pub fn run(&mut self, steps: usize) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }
}

/// H update, pending source kicks, E update with ADE currents, Mur.
pub fn fdtd_step(s: &mut FdtdState) -> Result<()> {
    let n_x = s.e.len();
    let sc = s.courant;
    for (k, hk) in s.h.iter_mut().enumerate() {
        *hk -= sc * (s.e[k + 1] - s.e[k]);
    }
    for (k, v) in s.pending.drain(..) {
        s.h[k] += v;
    }
    s.e_prev.copy_from_slice(&s.e);
    for i in 1..n_x - 1 {
        if !s.dispersive[i] {
            s.e[i] -= sc * (s.h[i] - s.h[i - 1]) * s.inv_eps_r[i];
        }
    }
    let np = s.coeffs.n_poles();
    for (k, &i) in s.nodes.iter().enumerate() {
        let curl = -sc * (s.h[i] - s.h[i - 1]);
        let de = if np == 0 {
            curl * s.inv_eps_r[i]
        } else {
            let jn = &mut s.j[k * np..(k + 1) * np];
            let j_eq: f64 = jn
                .iter()
                .zip(&s.coeffs.kappa)
                .map(|(jp, kap)| (jp * (1.0 + kap)).re)
                .sum();
            let de = (curl - j_eq) * s.inv_eps_r[i];
            for ((jp, &kap), &b) in jn.iter_mut().zip(&s.coeffs.kappa).zip(&s.coeffs.beta) {
                *jp = kap * *jp + b * de;
            }
            de
        };
        s.e[i] += de;
    }
    mur_boundary(s);
    s.time += 1;
    s.max_e = s.e.iter().fold(0.0f64, |m, v| if v.abs() > m { v.abs() } else { m });
    let bound = INSTABILITY_FACTOR * s.reference.max(f64::MIN_POSITIVE);
    if !(s.max_e <= bound) {
        return Err(Error::Unstable {
            step: s.time,
            value: s.max_e,
            bound,
        });
    }
    Ok(())
}

/// First-order Mur at both ends; uses `e_prev` for the previous time level.
pub fn mur_boundary(s: &mut FdtdState) {
    let n = s.e.len();
    let m = (s.courant - 1.0) / (s.courant + 1.0);
    s.e[0] = s.e_prev[1] + m * (s.e[1] - s.e_prev[0]);
    s.e[n - 1] = s.e_prev[n - 2] + m * (s.e[n - 2] - s.e_prev[n - 1]);
}

/// E and H at `node` and the current time. H is averaged over the two
/// adjacent half nodes and the two adjacent half steps.
pub fn colocate_probe(s: &FdtdState, node: usize) -> Result<(f64, f64)> {
    let n_x = s.e.len();
    if node == 0 || node + 1 >= n_x {
        return Err(Error::invalid(
            "node",
            format!("colocated probe needs an interior node, got {node} of {n_x}"),
        ));
    }
    let behind = s.h[node - 1] + s.h[node];
    let ahead = s.h_ahead(node - 1) + s.h_ahead(node);
    Ok((s.e[node], 0.25 * (behind + ahead)))
}

impl Solver for FdtdState {
    fn kind(&self) -> SolverKind {
        SolverKind::Fdtd
    }

    fn n_x(&self) -> usize {
        self.e.len()
    }

    fn time(&self) -> usize {
        self.time
    }

    /// Soft: `E += v`. Directional additionally kicks the H half node behind
    /// the source on the next half step, cancelling the leftward wave
    /// (exactly at `S = 1`).
    fn add_source(&mut self, node: usize, value: f64, launch: Launch) -> Result<()> {
        self.check_node(node)?;
        if value == 0.0 {
            return Ok(());
        }
        if node == 0 || node + 1 >= self.e.len() {
            return Err(Error::invalid("node", "FDTD sources must be interior"));
        }
        self.e[node] += value;
        if launch == Launch::Directional {
            self.pending.push((node - 1, self.courant * value));
        }
        self.reference = self.reference.max(value.abs());
        self.max_e = self.max_e.max(self.e[node].abs());
        Ok(())
    }

    /// A single-node impulse carries content up to the Nyquist limit, which
    /// the conditionally stable Yee scheme cannot represent.
    fn impulse(&mut self, _node: usize, _e: f64, _h: f64) -> Result<()> {
        Err(Error::DeltaUnsupported)
    }

    fn step(&mut self) -> Result<()> {
        fdtd_step(self)
    }

    fn probe(&self, node: usize) -> Result<(f64, f64)> {
        colocate_probe(self, node)
    }

    fn max_abs_e(&self) -> f64 {
        self.max_e
    }

    fn state_bytes(&self) -> usize {
        let reals = self.e.len() + self.h.len() + self.e_prev.len() + 2 * self.eps_r.len();
        reals * std::mem::size_of::<f64>()
            + self.dispersive.len()
            + self.nodes.len() * std::mem::size_of::<usize>()
            + self.j.len() * std::mem::size_of::<Complex64>()
    }
}
