//! File formats: CSV matrices and traces, JSON sidecars and state files.
//! All float output goes through Rust's shortest round-trip formatting, so
//! identical data always produces identical bytes.

use crate::conditioning::{EntangledMultimodeState, MultimodeBranch};
use crate::error::{Error, Result};
use crate::phase_space::WignerGrid;
use crate::sfa::{DipoleSeries, HarmonicShiftSet};
use crate::spectrometer::{PirHistogram, ShotRecord};
use crate::tomography::{DensityMatrix, HomodyneTrace, PhaseSamples};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Quadrature convention recorded in every metadata file.
pub const CONVENTION_TAG: &str = "x=(a+a\u{2020})/\u{221a}2";

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Wigner grid as CSV: header row carries the x values, first column the p
/// values, cells the W values.
pub fn write_wigner_csv(grid: &WignerGrid, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    let xs = grid.x_values();
    let ps = grid.p_values();
    write!(f, "p\\x")?;
    for x in &xs {
        write!(f, ",{x}")?;
    }
    writeln!(f)?;
    for (ip, p) in ps.iter().enumerate() {
        write!(f, "{p}")?;
        for ix in 0..grid.nx {
            write!(f, ",{}", grid.value(ip, ix))?;
        }
        writeln!(f)?;
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WignerMeta {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub nx: usize,
    pub np: usize,
    pub state: String,
    pub convention: String,
    pub integral: f64,
}

/// JSON metadata next to a Wigner CSV.
pub fn write_wigner_json(grid: &WignerGrid, state_descriptor: &str, path: &Path) -> Result<()> {
    let meta = WignerMeta {
        x_range: grid.x_range,
        p_range: grid.p_range,
        nx: grid.nx,
        np: grid.np,
        state: state_descriptor.to_string(),
        convention: CONVENTION_TAG.to_string(),
        integral: grid.integral(),
    };
    let mut f = create(path)?;
    writeln!(f, "{}", serde_json::to_string_pretty(&meta).unwrap())?;
    Ok(())
}

/// Homodyne trace as CSV with columns (phi, x).
pub fn write_trace_csv(trace: &HomodyneTrace, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "phi,x")?;
    for entry in &trace.entries {
        for &x in &entry.samples {
            writeln!(f, "{},{}", entry.phi, x)?;
        }
    }
    Ok(())
}

/// Read a (phi, x) trace CSV, grouping consecutive rows of equal phase.
pub fn read_trace_csv(path: &Path) -> Result<HomodyneTrace> {
    let text = std::fs::read_to_string(path)?;
    let mut entries: Vec<PhaseSamples> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 && line.starts_with("phi") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let phi: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("trace line {}: bad phi", lineno + 1)))?;
        let x: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("trace line {}: bad x", lineno + 1)))?;
        match entries.last_mut() {
            Some(e) if (e.phi - phi).abs() < 1e-15 => e.samples.push(x),
            _ => entries.push(PhaseSamples {
                phi,
                samples: vec![x],
            }),
        }
    }
    if entries.is_empty() {
        return Err(Error::Parse("empty trace file".into()));
    }
    Ok(HomodyneTrace { entries })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TraceMeta {
    pub seed: u64,
    pub shots_per_phase: usize,
    pub phases: Vec<f64>,
    pub state: String,
    pub eta: f64,
    pub convention: String,
}

pub fn write_trace_sidecar(meta: &TraceMeta, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "{}", serde_json::to_string_pretty(meta).unwrap())?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct DensityMatrixJson {
    n_trunc: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

pub fn write_density_matrix_json(rho: &DensityMatrix, path: &Path) -> Result<()> {
    let n = rho.dim();
    let record = DensityMatrixJson {
        n_trunc: n,
        re: (0..n)
            .map(|i| (0..n).map(|j| rho.elements[(i, j)].re).collect())
            .collect(),
        im: (0..n)
            .map(|i| (0..n).map(|j| rho.elements[(i, j)].im).collect())
            .collect(),
    };
    let mut f = create(path)?;
    writeln!(f, "{}", serde_json::to_string(&record).unwrap())?;
    Ok(())
}

pub fn read_density_matrix_json(path: &Path) -> Result<DensityMatrix> {
    let text = std::fs::read_to_string(path)?;
    let record: DensityMatrixJson =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("density matrix: {e}")))?;
    let n = record.n_trunc;
    let elements = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(record.re[i][j], record.im[i][j])
    });
    Ok(DensityMatrix::new(elements))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StateProvenance {
    pub pulse_hash: String,
    pub chain: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct BranchJson {
    coeff: [f64; 2],
    phase: f64,
    alphas: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateJson {
    mode_count: usize,
    mode_frequencies: Vec<f64>,
    branches: Vec<BranchJson>,
    provenance: StateProvenance,
}

/// Multimode branch state as JSON with mode frequencies and provenance.
pub fn write_state_json(
    state: &EntangledMultimodeState,
    mode_frequencies: &[f64],
    provenance: StateProvenance,
    path: &Path,
) -> Result<()> {
    let record = StateJson {
        mode_count: state.mode_count,
        mode_frequencies: mode_frequencies.to_vec(),
        branches: state
            .branches
            .iter()
            .map(|b| BranchJson {
                coeff: [b.coeff.re, b.coeff.im],
                phase: b.phase,
                alphas: b.alphas.iter().map(|a| [a.re, a.im]).collect(),
            })
            .collect(),
        provenance,
    };
    let mut f = create(path)?;
    writeln!(f, "{}", serde_json::to_string_pretty(&record).unwrap())?;
    Ok(())
}

pub fn read_state_json(path: &Path) -> Result<EntangledMultimodeState> {
    let text = std::fs::read_to_string(path)?;
    let record: StateJson =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("state: {e}")))?;
    Ok(EntangledMultimodeState::new(
        record
            .branches
            .into_iter()
            .map(|b| MultimodeBranch {
                coeff: Complex64::new(b.coeff[0], b.coeff[1]),
                alphas: b
                    .alphas
                    .into_iter()
                    .map(|a| Complex64::new(a[0], a[1]))
                    .collect(),
                phase: b.phase,
            })
            .collect(),
    ))
}

pub fn write_dipole_csv(series: &DipoleSeries, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "t_au,dipole_au")?;
    for (t, d) in series.t.iter().zip(&series.d) {
        writeln!(f, "{t},{d}")?;
    }
    Ok(())
}

/// Spectrum CSV with (q, |chi_q|^2, arg chi_q) triples.
pub fn write_spectrum_csv(shifts: &HarmonicShiftSet, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "q,chi_sq,arg_chi")?;
    for q in 1..=shifts.n_modes() {
        let chi = shifts.chi_q(q);
        writeln!(f, "{q},{},{}", chi.norm_sqr(), chi.arg())?;
    }
    Ok(())
}

/// Shot cloud CSV: (s_ir, s_hh, selected). Truth labels stay internal.
pub fn write_shots_csv(shots: &[ShotRecord], selected: &[bool], path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "s_ir,s_hh,selected")?;
    for (shot, sel) in shots.iter().zip(selected) {
        writeln!(f, "{},{},{}", shot.s_ir, shot.s_hh, u8::from(*sel))?;
    }
    Ok(())
}

pub fn write_pir_csv(hist: &PirHistogram, path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "loss_photons,probability")?;
    for (c, p) in hist.centers.iter().zip(&hist.probability) {
        writeln!(f, "{c},{p}")?;
    }
    Ok(())
}

/// Generic two-column sweep CSV.
pub fn write_sweep_csv(header: (&str, &str), rows: &[(f64, f64)], path: &Path) -> Result<()> {
    let mut f = create(path)?;
    writeln!(f, "{},{}", header.0, header.1)?;
    for (a, b) in rows {
        writeln!(f, "{a},{b}")?;
    }
    Ok(())
}
