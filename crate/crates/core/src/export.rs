//! CSV writers. Floats are printed with 17 significant digits so that every
//! value parses back to the identical `f64`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::elbm::ElbmState;
use crate::error::Result;
use crate::fdtd::FdtdState;
use crate::geometry::Layout;
use crate::spectral::{photon_energy_axis, Spectrum};

/// Round-trip formatting of one float.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Writes a header row and one row per entry of equally long columns.
pub fn write_columns(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", headers.join(","))?;
    let rows = columns.iter().map(|c| c.len()).min().unwrap_or(0);
    for r in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| fmt(c[r])).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_elbm_snapshot(path: &Path, layout: &Layout, state: &ElbmState) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "node_index,x_nm,E,H,P")?;
    for i in 0..state.e().len() {
        writeln!(
            w,
            "{i},{},{},{},{}",
            fmt(layout.x_nm(i)),
            fmt(state.e()[i]),
            fmt(state.h()[i]),
            fmt(state.p()[i])
        )?;
    }
    w.flush()?;
    Ok(())
}

/// E-node rows carry `E`; H-node rows sit half a cell to the right and carry
/// `H` from the preceding half step. FDTD has no `P` column values.
pub fn write_fdtd_snapshot(path: &Path, layout: &Layout, state: &FdtdState) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "node_index,x_nm,E,H,P,grid")?;
    for i in 0..state.e().len() {
        writeln!(w, "{i},{},{},,,E-node", fmt(layout.x_nm(i)), fmt(state.e()[i]))?;
    }
    let half = 0.5 * layout.dx_m * 1e9;
    for (k, &h) in state.h().iter().enumerate() {
        writeln!(w, "{k},{},,{},,H-node", fmt(layout.x_nm(k) + half), fmt(h))?;
    }
    w.flush()?;
    Ok(())
}

/// `bin,nu,energy_ev,magnitude,phase`; the phase column is left out when
/// `with_phase` is false.
pub fn write_spectrum(path: &Path, spec: &Spectrum, with_phase: bool) -> Result<()> {
    let mut w = create(path)?;
    let energy = photon_energy_axis(spec);
    if with_phase {
        writeln!(w, "bin,nu,energy_ev,magnitude,phase")?;
    } else {
        writeln!(w, "bin,nu,energy_ev,magnitude")?;
    }
    for (i, b) in spec.bins.iter().enumerate() {
        write!(w, "{i},{},{},{}", fmt(spec.nu(i)), fmt(energy[i]), fmt(b.norm()))?;
        if with_phase {
            write!(w, ",{}", fmt(b.arg()))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve(path: &Path, energies_ev: &[f64], t: &[f64]) -> Result<()> {
    write_columns(path, &["energy_ev", "T_analytical"], &[energies_ev, t])
}
