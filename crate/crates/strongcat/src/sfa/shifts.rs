//! Per-harmonic coherent displacements chi_q: the Fourier transform of the
//! dipole response, scaled by the mode coupling and the number of
//! phase-matched emitters.

use super::dipole::DipoleSeries;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Coupling of the quantized field modes to the dipole. The paper-level
/// normalization of g(omega) is not fixed; the effective scalar here absorbs
/// the quantization volume and is calibrated against a target chi_1 when
/// needed. The per-mode scaling is g(omega_q) = g_eff sqrt(q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCoupling {
    pub g_eff: f64,
}

impl ModeCoupling {
    pub fn new(g_eff: f64) -> Self {
        Self { g_eff }
    }

    pub fn g(&self, q: usize) -> f64 {
        self.g_eff * (q as f64).sqrt()
    }
}

/// Coherent displacement per harmonic mode, q = 1..=n_modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicShiftSet {
    /// chi[q-1] is the displacement of mode q.
    pub chi: Vec<Complex64>,
    pub omega_l: f64,
    pub n_ph: f64,
    pub g_eff: f64,
}

/// chi_q = -N_ph g(omega_q) int dt <d(t)> exp(i omega_q t).
pub fn harmonic_shifts(
    dipole: &DipoleSeries,
    n_modes: usize,
    coupling: ModeCoupling,
    n_ph: f64,
) -> Result<HarmonicShiftSet> {
    if n_modes < 2 {
        return Err(Error::InvalidInput("need at least two modes".into()));
    }
    let dt = dipole.dt();
    let nyquist_q = (std::f64::consts::PI / (dipole.omega_l * dt)).floor() as usize;
    if n_modes > nyquist_q {
        return Err(Error::NyquistViolation { dt, q: n_modes });
    }
    let chi = (1..=n_modes)
        .map(|q| {
            let wq = dipole.omega_l * q as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, (&t, &d)) in dipole.t.iter().zip(&dipole.d).enumerate() {
                let w = if k == 0 || k == dipole.t.len() - 1 {
                    0.5
                } else {
                    1.0
                };
                acc += w * d * Complex64::new(0.0, wq * t).exp();
            }
            -(n_ph * coupling.g(q)) * acc * dt
        })
        .collect();
    Ok(HarmonicShiftSet {
        chi,
        omega_l: dipole.omega_l,
        n_ph,
        g_eff: coupling.g_eff,
    })
}

impl HarmonicShiftSet {
    pub fn n_modes(&self) -> usize {
        self.chi.len()
    }

    /// Displacement of harmonic q (1-based).
    pub fn chi_q(&self, q: usize) -> Complex64 {
        self.chi[q - 1]
    }

    /// |chi_q|^2 spectrum.
    pub fn powers(&self) -> Vec<f64> {
        self.chi.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Rescale every mode by the complex factor that maps chi_1 onto
    /// `target`; relative amplitudes and phases between modes are preserved.
    pub fn calibrated_to_chi1(&self, target: Complex64) -> Result<Self> {
        let chi1 = self.chi[0];
        if chi1.norm() < 1e-300 {
            return Err(Error::InvalidInput(
                "cannot calibrate: chi_1 vanishes".into(),
            ));
        }
        let scale = target / chi1;
        Ok(Self {
            chi: self.chi.iter().map(|c| c * scale).collect(),
            ..self.clone()
        })
    }

    /// Plateau edge of the |chi_q|^2 spectrum: the highest odd harmonic still
    /// within 10 dB of the plateau median. Returns None when no odd
    /// harmonics are available.
    pub fn plateau_edge(&self) -> Option<usize> {
        let powers = self.powers();
        let odd: Vec<(usize, f64)> = (1..=self.n_modes())
            .filter(|q| q % 2 == 1 && *q >= 5)
            .map(|q| (q, 10.0 * powers[q - 1].max(1e-300).log10()))
            .collect();
        if odd.len() < 3 {
            return None;
        }
        let mut levels: Vec<f64> = odd.iter().map(|&(_, db)| db).collect();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = levels[levels.len() / 2];
        odd.iter()
            .rev()
            .find(|&&(_, db)| db >= median - 10.0)
            .map(|&(q, _)| q)
    }
}
