//! Domain discretization and node-sharp slab placement.

use crate::constants::C0;
use crate::error::{Error, Result};
use crate::materials::UpdateCoefficients;

/// A uniform 1D lattice with an optional centered slab.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub n_x: usize,
    pub dx_m: f64,
    /// Half-open node range `[start, end)` occupied by the slab.
    pub slab: Option<(usize, usize)>,
}

impl Layout {
    /// Lays out `n_x` nodes over `domain_length_nm`, with a slab of
    /// `round(thickness / dx)` cells centered at `n_x / 2`.
    pub fn centered_slab(domain_length_nm: f64, n_x: usize, thickness_nm: f64) -> Result<Self> {
        if n_x < 4 {
            return Err(Error::invalid("n_x", format!("need at least 4 nodes, got {n_x}")));
        }
        if !(domain_length_nm > 0.0 && domain_length_nm.is_finite()) {
            return Err(Error::invalid(
                "domain_length_nm",
                format!("must be > 0, got {domain_length_nm}"),
            ));
        }
        if !(thickness_nm >= 0.0 && thickness_nm.is_finite()) {
            return Err(Error::invalid("thickness_nm", format!("must be >= 0, got {thickness_nm}")));
        }
        let dx_m = domain_length_nm * 1e-9 / n_x as f64;
        let cells = (thickness_nm * 1e-9 / dx_m).round() as usize;
        if cells + 2 > n_x {
            return Err(Error::invalid(
                "thickness_nm",
                format!("slab of {cells} cells does not fit in {n_x} nodes"),
            ));
        }
        let slab = (cells > 0).then(|| {
            let start = n_x / 2 - cells / 2;
            (start, start + cells)
        });
        Ok(Self { n_x, dx_m, slab })
    }

    pub fn vacuum(domain_length_nm: f64, n_x: usize) -> Result<Self> {
        Self::centered_slab(domain_length_nm, n_x, 0.0)
    }

    /// Time step at unit Courant number.
    pub fn dt_seconds(&self) -> f64 {
        self.dx_m / C0
    }

    pub fn slab_cells(&self) -> usize {
        self.slab.map_or(0, |(a, b)| b - a)
    }

    /// Thickness actually represented on the lattice.
    pub fn realized_thickness_m(&self) -> f64 {
        self.slab_cells() as f64 * self.dx_m
    }

    pub fn in_slab(&self, node: usize) -> bool {
        self.slab.is_some_and(|(a, b)| node >= a && node < b)
    }

    pub fn x_nm(&self, node: usize) -> f64 {
        node as f64 * self.dx_m * 1e9
    }

    /// Per-node relative permittivity and material mask for the given slab
    /// coefficients.
    pub fn medium(&self, coeffs: &UpdateCoefficients) -> Result<Medium> {
        let mut eps_r = vec![1.0; self.n_x];
        let mut dispersive = vec![false; self.n_x];
        if let Some((a, b)) = self.slab {
            if !(coeffs.eps_r > 0.0) {
                return Err(Error::NonPositivePermittivity {
                    node: a,
                    value: coeffs.eps_r,
                });
            }
            eps_r[a..b].fill(coeffs.eps_r);
            dispersive[a..b].fill(true);
        }
        Ok(Medium { eps_r, dispersive })
    }
}

/// Node-wise material description consumed by both solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct Medium {
    pub eps_r: Vec<f64>,
    pub dispersive: Vec<bool>,
}

impl Medium {
    pub fn vacuum(n_x: usize) -> Self {
        Self {
            eps_r: vec![1.0; n_x],
            dispersive: vec![false; n_x],
        }
    }

    pub fn len(&self) -> usize {
        self.eps_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps_r.is_empty()
    }

    pub fn dispersive_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.dispersive[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ricker_geometry() {
        let l = Layout::centered_slab(3100.0, 500, 100.0).unwrap();
        assert!((l.dx_m - 6.2e-9).abs() < 1e-20);
        assert_eq!(l.slab_cells(), 16);
        assert_eq!(l.slab, Some((242, 258)));
        assert!((l.realized_thickness_m() - 99.2e-9).abs() < 1e-18);
    }

    #[test]
    fn broadband_geometry() {
        let l = Layout::centered_slab(620.0, 1000, 100.0).unwrap();
        assert_eq!(l.slab_cells(), 161);
        assert!((l.dt_seconds() - 0.62e-9 / C0).abs() < 1e-30);
    }

    #[test]
    fn rejects_bad_layouts() {
        assert!(Layout::centered_slab(620.0, 2, 0.0).is_err());
        assert!(Layout::centered_slab(0.0, 100, 0.0).is_err());
        assert!(Layout::centered_slab(620.0, 100, 700.0).is_err());
        assert_eq!(Layout::vacuum(620.0, 100).unwrap().slab, None);
    }
}
