//! Driving-pulse definitions: field, vector potential and their integrals.

use super::units;
use crate::math::cumtrapz;
use serde::{Deserialize, Serialize};

/// Pulse envelope shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    /// sin^2 envelope over the full duration; zero DC component for integer
    /// cycle counts.
    Sin2,
    /// Gaussian envelope with sigma = T/8, windowed to [0, T].
    Gaussian,
    /// Flat envelope (CW within the window).
    Flat,
}

/// Linearly polarized driving pulse on a uniform time grid (atomic units).
///
/// The carrier is cos(omega (t - T/2) + cep), so cep = 0 gives a field
/// symmetric about the pulse center. The vector potential A = -int E dt is
/// analytic for sin^2 and flat envelopes and numerically accumulated for the
/// Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaserPulse {
    pub f0: f64,
    pub omega_l: f64,
    pub n_cycles: f64,
    pub cep: f64,
    pub envelope: Envelope,
    pub t_grid: Vec<f64>,
    #[serde(skip)]
    a_cache: Vec<f64>,
}

impl LaserPulse {
    pub fn new(
        f0: f64,
        omega_l: f64,
        n_cycles: f64,
        cep: f64,
        envelope: Envelope,
        samples_per_cycle: usize,
    ) -> Self {
        assert!(omega_l > 0.0 && n_cycles > 0.0 && samples_per_cycle >= 4);
        let duration = n_cycles * 2.0 * std::f64::consts::PI / omega_l;
        let n = ((n_cycles * samples_per_cycle as f64).round() as usize).max(8) + 1;
        let t_grid = crate::math::linspace(0.0, duration, n);
        let mut pulse = Self {
            f0,
            omega_l,
            n_cycles,
            cep,
            envelope,
            t_grid,
            a_cache: Vec::new(),
        };
        if envelope == Envelope::Gaussian {
            let e: Vec<f64> = pulse.t_grid.iter().map(|&t| pulse.e_field(t)).collect();
            let dt = pulse.dt();
            pulse.a_cache = cumtrapz(&e, dt).into_iter().map(|v| -v).collect();
        }
        pulse
    }

    /// Build from laboratory units: W/cm^2, nm, fs handled by the caller.
    pub fn from_physical(
        intensity_wcm2: f64,
        wavelength_nm: f64,
        n_cycles: f64,
        cep: f64,
        envelope: Envelope,
        samples_per_cycle: usize,
    ) -> Self {
        Self::new(
            units::field_amplitude_au(intensity_wcm2),
            units::omega_from_wavelength_nm(wavelength_nm),
            n_cycles,
            cep,
            envelope,
            samples_per_cycle,
        )
    }

    pub fn duration(&self) -> f64 {
        *self.t_grid.last().unwrap()
    }

    pub fn cycle(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_l
    }

    pub fn dt(&self) -> f64 {
        self.t_grid[1] - self.t_grid[0]
    }

    pub fn samples_per_cycle(&self) -> f64 {
        self.cycle() / self.dt()
    }

    /// Ponderomotive energy F0^2/(4 omega^2) in atomic units.
    pub fn up_au(&self) -> f64 {
        self.f0 * self.f0 / (4.0 * self.omega_l * self.omega_l)
    }

    fn carrier_phase(&self, t: f64) -> f64 {
        self.omega_l * (t - 0.5 * self.duration()) + self.cep
    }

    /// Electric field E(t); zero outside the envelope support.
    pub fn e_field(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration() {
            return 0.0;
        }
        let env = match self.envelope {
            Envelope::Sin2 => {
                let s = (std::f64::consts::PI * t / self.duration()).sin();
                s * s
            }
            Envelope::Gaussian => {
                let sigma = self.duration() / 8.0;
                let dt = t - 0.5 * self.duration();
                (-0.5 * dt * dt / (sigma * sigma)).exp()
            }
            Envelope::Flat => 1.0,
        };
        self.f0 * env * self.carrier_phase(t).cos()
    }

    /// Vector potential A(t) = -int_0^t E dt'; for sin^2 envelopes with an
    /// integer number of cycles it vanishes at both ends.
    pub fn vector_potential(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let t = t.min(self.duration());
        match self.envelope {
            Envelope::Flat => {
                let phi0 = self.carrier_phase(0.0);
                -(self.f0 / self.omega_l) * (self.carrier_phase(t).sin() - phi0.sin())
            }
            Envelope::Sin2 => {
                let w = self.omega_l;
                let nu = 2.0 * std::f64::consts::PI / self.duration();
                let b = self.cep - w * 0.5 * self.duration();
                let term = |a: f64| -> f64 {
                    if a.abs() < 1e-12 * w {
                        t * b.cos()
                    } else {
                        ((a * t + b).sin() - b.sin()) / a
                    }
                };
                -(self.f0 / 2.0) * (term(w) - 0.5 * (term(w + nu) + term(w - nu)))
            }
            Envelope::Gaussian => {
                // linear interpolation on the cached cumulative integral
                let dt = self.dt();
                let pos = t / dt;
                let idx = (pos.floor() as usize).min(self.a_cache.len() - 2);
                let frac = pos - idx as f64;
                self.a_cache[idx] * (1.0 - frac) + self.a_cache[idx + 1] * frac
            }
        }
    }

    /// Analytic continuation of the field to complex time; defined for the
    /// sin^2 and flat envelopes (no support windowing applied).
    pub fn e_field_complex(&self, t: num_complex::Complex64) -> Option<num_complex::Complex64> {
        use num_complex::Complex64 as C;
        let w = self.omega_l;
        let b = self.cep - w * 0.5 * self.duration();
        match self.envelope {
            Envelope::Flat => Some(self.f0 * (w * t + C::new(b, 0.0)).cos()),
            Envelope::Sin2 => {
                let nu = 2.0 * std::f64::consts::PI / self.duration();
                let carrier = (w * t + C::new(b, 0.0)).cos();
                let upper = ((w + nu) * t + C::new(b, 0.0)).cos();
                let lower = ((w - nu) * t + C::new(b, 0.0)).cos();
                Some(0.5 * self.f0 * (carrier - 0.5 * (upper + lower)))
            }
            Envelope::Gaussian => None,
        }
    }

    /// Analytic continuation of the vector potential to complex time.
    pub fn vector_potential_complex(
        &self,
        t: num_complex::Complex64,
    ) -> Option<num_complex::Complex64> {
        use num_complex::Complex64 as C;
        let w = self.omega_l;
        let b = self.cep - w * 0.5 * self.duration();
        let term = |a: f64| -> C {
            if a.abs() < 1e-12 * w {
                t * b.cos()
            } else {
                ((a * t + C::new(b, 0.0)).sin() - C::new(b.sin(), 0.0)) / a
            }
        };
        match self.envelope {
            Envelope::Flat => Some(-self.f0 * term(w)),
            Envelope::Sin2 => {
                let nu = 2.0 * std::f64::consts::PI / self.duration();
                Some(-(self.f0 / 2.0) * (term(w) - 0.5 * (term(w + nu) + term(w - nu))))
            }
            Envelope::Gaussian => None,
        }
    }

    /// Sampled field on the pulse grid.
    pub fn e_samples(&self) -> Vec<f64> {
        self.t_grid.iter().map(|&t| self.e_field(t)).collect()
    }

    /// Sampled vector potential on the pulse grid.
    pub fn a_samples(&self) -> Vec<f64> {
        self.t_grid.iter().map(|&t| self.vector_potential(t)).collect()
    }
}

/// Atomic species inside the single-active-electron model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSpec {
    /// Ionization potential in atomic units.
    pub ip: f64,
}

impl AtomSpec {
    pub fn new(ip_au: f64) -> Self {
        assert!(ip_au > 0.0, "ionization potential must be positive");
        Self { ip: ip_au }
    }

    pub fn from_ip_ev(ip_ev: f64) -> Self {
        Self::new(units::ev_to_au(ip_ev))
    }

    /// Hydrogen-like 1s bound-continuum dipole matrix element
    /// d(v) = C v / (v^2 + 2 I_p)^3 along the polarization axis.
    pub fn dipole_element(&self, v: f64) -> f64 {
        let kappa2 = 2.0 * self.ip;
        let c = 2.0_f64.powf(3.5) * kappa2.powf(1.25) / std::f64::consts::PI;
        c * v / (v * v + kappa2).powi(3)
    }
}
