//! Run configuration: one serializable description of a whole pipeline run.
//! Laboratory units (W/cm^2, nm, fs, eV) live here and are converted to
//! atomic units exactly once, when the domain objects are built.

use crate::error::{Error, Result};
use crate::sfa::{units, AtomSpec, Envelope, LaserPulse, ModeCoupling};
use crate::spectrometer::QsModel;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PulseConfig {
    pub intensity_w_cm2: f64,
    pub wavelength_nm: f64,
    pub n_cycles: f64,
    pub cep: f64,
    pub envelope: Envelope,
    pub samples_per_cycle: usize,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self {
            intensity_w_cm2: 8e13,
            wavelength_nm: 800.0,
            n_cycles: 11.0,
            cep: 0.0,
            envelope: Envelope::Sin2,
            samples_per_cycle: 512,
        }
    }
}

impl PulseConfig {
    pub fn build(&self) -> Result<LaserPulse> {
        if self.intensity_w_cm2 < 0.0 {
            return Err(Error::InvalidInput("intensity must be >= 0".into()));
        }
        if self.wavelength_nm <= 0.0 {
            return Err(Error::InvalidInput("wavelength must be > 0".into()));
        }
        if self.n_cycles <= 0.0 {
            return Err(Error::InvalidInput("n_cycles must be > 0".into()));
        }
        if self.samples_per_cycle < 4 {
            return Err(Error::InvalidInput("samples_per_cycle must be >= 4".into()));
        }
        Ok(LaserPulse::from_physical(
            self.intensity_w_cm2,
            self.wavelength_nm,
            self.n_cycles,
            self.cep,
            self.envelope,
            self.samples_per_cycle,
        ))
    }

    pub fn duration_fs(&self) -> f64 {
        let omega = units::omega_from_wavelength_nm(self.wavelength_nm);
        units::au_to_fs(self.n_cycles * 2.0 * std::f64::consts::PI / omega)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AtomConfig {
    pub ip_ev: f64,
}

impl Default for AtomConfig {
    fn default() -> Self {
        // Xenon
        Self { ip_ev: 12.13 }
    }
}

impl AtomConfig {
    pub fn build(&self) -> Result<AtomSpec> {
        if self.ip_ev <= 0.0 {
            return Err(Error::InvalidInput("ip_ev must be > 0".into()));
        }
        Ok(AtomSpec::from_ip_ev(self.ip_ev))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShiftConfig {
    pub n_modes: usize,
    pub g_eff: f64,
    pub n_ph: f64,
    /// When set, rescale the shift set so chi_1 equals this complex target.
    pub calibrate_chi1: Option<[f64; 2]>,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        Self {
            n_modes: 31,
            g_eff: 1e-8,
            n_ph: 1.0,
            calibrate_chi1: None,
        }
    }
}

impl ShiftConfig {
    pub fn coupling(&self) -> ModeCoupling {
        ModeCoupling::new(self.g_eff)
    }

    pub fn chi1_target(&self) -> Option<Complex64> {
        self.calibrate_chi1.map(|[re, im]| Complex64::new(re, im))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TomoConfig {
    pub phases: usize,
    pub shots_per_phase: usize,
    pub n_trunc: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub bin_width: f64,
    pub k_cutoff: f64,
    /// Detector efficiency; 1.0 is an ideal strong local oscillator.
    pub eta: f64,
}

impl Default for TomoConfig {
    fn default() -> Self {
        Self {
            phases: 12,
            shots_per_phase: 10_000,
            n_trunc: 30,
            max_iter: 2000,
            tol: 1e-9,
            bin_width: 0.05,
            k_cutoff: 4.0,
            eta: 1.0,
        }
    }
}

impl TomoConfig {
    pub fn phase_grid(&self) -> Vec<f64> {
        (0..self.phases)
            .map(|k| std::f64::consts::PI * k as f64 / self.phases as f64)
            .collect()
    }
}

/// Full pipeline configuration; re-running from an echoed config with the
/// same seed reproduces every CSV byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: Option<usize>,
    pub pulse: PulseConfig,
    pub atom: AtomConfig,
    pub shifts: ShiftConfig,
    pub tomography: TomoConfig,
    pub qs: QsModel,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML encoding.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_toml().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Hash of a pulse definition, recorded as provenance in state files.
pub fn pulse_hash(pulse: &LaserPulse) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!(
        "{:.17e};{:.17e};{:.17e};{:.17e};{:?};{}",
        pulse.f0,
        pulse.omega_l,
        pulse.n_cycles,
        pulse.cep,
        pulse.envelope,
        pulse.t_grid.len()
    ));
    let digest = hasher.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_roundtrip_is_stable() {
        let config = RunConfig::default();
        let text = config.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(config, back);
        assert_eq!(text, back.to_toml());
        assert_eq!(config.hash(), back.hash());
    }

    #[test]
    fn invalid_fields_rejected() {
        let mut config = RunConfig::default();
        config.pulse.wavelength_nm = -1.0;
        assert!(config.pulse.build().is_err());
        config.pulse.wavelength_nm = 800.0;
        config.atom.ip_ev = 0.0;
        assert!(config.atom.build().is_err());
    }

    #[test]
    fn duration_matches_cycles() {
        let config = PulseConfig::default();
        // 11 cycles at 800 nm is about 29.4 fs
        assert!((config.duration_fs() - 29.4).abs() < 0.2);
    }
}
