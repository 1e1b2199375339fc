//! Direct-ATI quantum optics: the electron-displacement shifts delta_q, the
//! ionization-time branch superposition conditioned on a final momentum, and
//! the momentum-averaged mixed state of the fundamental mode.

use super::{EntangledMultimodeState, MultimodeBranch};
use crate::error::{Error, Result};
use crate::math::{cumtrapz, linspace};
use crate::phase_space::CoherentSuperposition;
use crate::sfa::{sfa_dipole, AtomSpec, LaserPulse, ModeCoupling, SfaOptions};
use crate::tomography::DensityMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Final-momentum label of a photoelectron (1D, signed, atomic units).
/// Distinct momenta are treated as orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectronTag {
    pub v: f64,
}

impl ElectronTag {
    pub fn new(v: f64) -> Self {
        Self { v }
    }

    /// Kinetic energy in units of U_p.
    pub fn energy_in_up(&self, up_au: f64) -> f64 {
        0.5 * self.v * self.v / up_au
    }
}

/// Light-matter superposition sum_v |v> |Phi(v)>; the field components carry
/// their weights.
#[derive(Debug, Clone)]
pub struct LightMatterState {
    pub components: Vec<(ElectronTag, EntangledMultimodeState)>,
}

/// Weighting of the momentum grid in the mixed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentumWeighting {
    Uniform,
    /// Weight each momentum by the SFA ionization yield, i.e. the squared
    /// norm of the unnormalized conditioned state.
    Yield,
}

/// How the ionization-time integral is turned into branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightModel {
    /// Cell-integrated real-axis quadrature; reliable for momenta inside the
    /// classically allowed direct-ATI range, |v| up to about 2 sqrt(U_p).
    Quadrature,
    /// Complex ionization-time saddle points with Gribakin-Kuchiev pole
    /// regularization of the hydrogenic matrix element; one branch per
    /// tunneling burst. Valid in the deep-tunneling region as well.
    SaddlePoint,
}

/// Controls for the branch discretization of the ionization-time integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtiOptions {
    /// Number of field modes q = 1..=n_modes carried along.
    pub n_modes: usize,
    /// Phase-matched emitter count applied to the chi history.
    pub n_ph: f64,
    /// Initial ionization-time steps per optical cycle (minimum 64).
    pub steps_per_cycle: usize,
    /// Doubling cap for the convergence loop.
    pub max_steps_per_cycle: usize,
    /// Total-variation tolerance on the fundamental-mode photon distribution
    /// between successive doublings.
    pub tv_tolerance: f64,
    /// Carry the chi_q(t') dipole history along each branch. Disabling it
    /// keeps the harmonics at vacuum until the electron shifts them, the
    /// usual approximation for ATI conditioning, and avoids resolving the
    /// full harmonic spectrum on the time grid.
    pub include_chi_history: bool,
    /// Target phase advance per weight-quadrature step, radians.
    pub phase_step: f64,
    /// Branch-weight evaluation scheme.
    pub weight_model: WeightModel,
}

impl Default for AtiOptions {
    fn default() -> Self {
        Self {
            n_modes: 9,
            n_ph: 1.0,
            steps_per_cycle: 64,
            max_steps_per_cycle: 1024,
            tv_tolerance: 1e-4,
            include_chi_history: true,
            phase_step: 0.2,
            weight_model: WeightModel::Quadrature,
        }
    }
}

/// Electron-displacement shift of mode q:
/// delta_q(t, t', v) = -g(w_q) int_{t'}^{t} dtau Dr(tau, v) exp(i w_q tau),
/// with Dr(tau, v) = int_{t'}^{tau} [v + A(tau'')] dtau'' the drift-plus-
/// quiver displacement of an electron whose kinetic momentum at the end of
/// the pulse is v.
pub fn ati_displacement(
    pulse: &LaserPulse,
    coupling: ModeCoupling,
    tag: ElectronTag,
    t_ion: f64,
    t: f64,
    q: usize,
) -> Complex64 {
    if t <= t_ion {
        return Complex64::new(0.0, 0.0);
    }
    let cycles = (t - t_ion) / pulse.cycle();
    let n = ((cycles * 256.0).ceil() as usize).max(128) + 1;
    let taus = linspace(t_ion, t, n);
    let dtau = taus[1] - taus[0];
    let a: Vec<f64> = taus.iter().map(|&tt| pulse.vector_potential(tt)).collect();
    let ia = cumtrapz(&a, dtau);
    let wq = pulse.omega_l * q as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, &tau) in taus.iter().enumerate() {
        let dr = tag.v * (tau - t_ion) + ia[k];
        let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        acc += w * dr * Complex64::new(0.0, wq * tau).exp();
    }
    -coupling.g(q) * acc * dtau
}

/// Precomputed grid data shared by all momenta of one (pulse, atom, coupling)
/// configuration: dipole history, chi(t') integrals and the reverse-time
/// integrals entering delta_q.
pub struct AtiContext<'a> {
    pulse: &'a LaserPulse,
    atom: &'a AtomSpec,
    coupling: ModeCoupling,
    alpha_l: Complex64,
    options: AtiOptions,
    e: Vec<f64>,
    a: Vec<f64>,
    ia: Vec<f64>,
    ia2: Vec<f64>,
    /// chi_q(t_k) per mode (outer index q-1).
    chi_history: Vec<Vec<Complex64>>,
    /// Reverse integrals per mode: C0 = int_t^T e^(iwq tau) dtau,
    /// C1 = int_t^T tau e^(iwq), CA = int_t^T IA(tau) e^(iwq tau).
    c0: Vec<Vec<Complex64>>,
    c1: Vec<Vec<Complex64>>,
    ca: Vec<Vec<Complex64>>,
}

impl<'a> AtiContext<'a> {
    pub fn new(
        pulse: &'a LaserPulse,
        atom: &'a AtomSpec,
        coupling: ModeCoupling,
        alpha_l: Complex64,
        options: AtiOptions,
    ) -> Result<Self> {
        if options.n_modes < 1 {
            return Err(Error::InvalidInput("need at least one mode".into()));
        }
        let e = pulse.e_samples();
        let a = pulse.a_samples();
        let dt = pulse.dt();
        let ia = cumtrapz(&a, dt);
        let a2: Vec<f64> = a.iter().map(|x| x * x).collect();
        let ia2 = cumtrapz(&a2, dt);

        let n = pulse.t_grid.len();
        let mut chi_history = Vec::with_capacity(options.n_modes);
        if options.include_chi_history && coupling.g_eff != 0.0 && pulse.f0 != 0.0 {
            let dipole = sfa_dipole(pulse, atom, SfaOptions::default())?;
            for q in 1..=options.n_modes {
                let wq = pulse.omega_l * q as f64;
                let integrand: Vec<Complex64> = dipole
                    .t
                    .iter()
                    .zip(&dipole.d)
                    .map(|(&t, &d)| d * Complex64::new(0.0, wq * t).exp())
                    .collect();
                let cum = cumtrapz_complex(&integrand, dt);
                chi_history.push(
                    cum.into_iter()
                        .map(|f| -options.n_ph * coupling.g(q) * f)
                        .collect(),
                );
            }
        } else {
            for _ in 0..options.n_modes {
                chi_history.push(vec![Complex64::new(0.0, 0.0); n]);
            }
        }

        let mut c0 = Vec::with_capacity(options.n_modes);
        let mut c1 = Vec::with_capacity(options.n_modes);
        let mut ca = Vec::with_capacity(options.n_modes);
        for q in 1..=options.n_modes {
            let wq = pulse.omega_l * q as f64;
            let phases: Vec<Complex64> = pulse
                .t_grid
                .iter()
                .map(|&t| Complex64::new(0.0, wq * t).exp())
                .collect();
            let f0 = cumtrapz_complex(&phases, dt);
            let f1 = cumtrapz_complex(
                &pulse
                    .t_grid
                    .iter()
                    .zip(&phases)
                    .map(|(&t, &p)| t * p)
                    .collect::<Vec<_>>(),
                dt,
            );
            let fa = cumtrapz_complex(
                &ia.iter()
                    .zip(&phases)
                    .map(|(&x, &p)| x * p)
                    .collect::<Vec<_>>(),
                dt,
            );
            let last0 = *f0.last().unwrap();
            let last1 = *f1.last().unwrap();
            let lasta = *fa.last().unwrap();
            c0.push(f0.into_iter().map(|v| last0 - v).collect());
            c1.push(f1.into_iter().map(|v| last1 - v).collect());
            ca.push(fa.into_iter().map(|v| lasta - v).collect());
        }

        Ok(Self {
            pulse,
            atom,
            coupling,
            alpha_l,
            options,
            e,
            a,
            ia,
            ia2,
            chi_history,
            c0,
            c1,
            ca,
        })
    }

    fn interp(&self, values: &[f64], t: f64) -> f64 {
        let dt = self.pulse.dt();
        let pos = (t / dt).clamp(0.0, (values.len() - 1) as f64);
        let idx = (pos.floor() as usize).min(values.len() - 2);
        let frac = pos - idx as f64;
        values[idx] * (1.0 - frac) + values[idx + 1] * frac
    }

    fn interp_c(&self, values: &[Complex64], t: f64) -> Complex64 {
        let dt = self.pulse.dt();
        let pos = (t / dt).clamp(0.0, (values.len() - 1) as f64);
        let idx = (pos.floor() as usize).min(values.len() - 2);
        let frac = pos - idx as f64;
        values[idx] * (1.0 - frac) + values[idx + 1] * frac
    }

    /// delta_q at the end of the pulse for ionization time t', via the
    /// precomputed reverse integrals.
    pub fn delta_q(&self, tag: ElectronTag, t_ion: f64, q: usize) -> Complex64 {
        let c0 = self.interp_c(&self.c0[q - 1], t_ion);
        let c1 = self.interp_c(&self.c1[q - 1], t_ion);
        let ca = self.interp_c(&self.ca[q - 1], t_ion);
        let ia_ion = self.interp(&self.ia, t_ion);
        -self.coupling.g(q) * (tag.v * (c1 - t_ion * c0) + ca - ia_ion * c0)
    }

    /// chi_q accumulated up to t'.
    pub fn chi_q_at(&self, t_ion: f64, q: usize) -> Complex64 {
        self.interp_c(&self.chi_history[q - 1], t_ion)
    }

    /// Ionization amplitude density at time s: the bound-continuum matrix
    /// element times the field, carrying the Volkov phase of the outgoing
    /// electron and the bound-state phase.
    fn weight_density(&self, tag: ElectronTag, s: f64) -> Complex64 {
        let a_s = self.interp(&self.a, s);
        let e_s = self.interp(&self.e, s);
        let ia_s = self.interp(&self.ia, s);
        let ia2_s = self.interp(&self.ia2, s);
        let s_volkov =
            0.5 * (tag.v * tag.v * s + 2.0 * tag.v * ia_s + ia2_s) + self.atom.ip * s;
        self.atom.dipole_element(tag.v + a_s) * e_s * Complex64::new(0.0, s_volkov).exp()
    }

    fn branch_at(&self, tag: ElectronTag, t_ion: f64, dt_branch: f64) -> MultimodeBranch {
        // The Volkov phase oscillates much faster than the mode amplitudes
        // drift, so the scalar weight is integrated over the cell on a fine
        // Simpson subgrid while the amplitudes stay at the cell center. The
        // subgrid resolves the peak phase rate at ~0.2 rad per step.
        let a_max = self.a.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        let rate = 0.5 * (tag.v.abs() + a_max).powi(2) + self.atom.ip;
        let mut subdivisions = ((dt_branch * rate / self.options.phase_step).ceil() as usize).clamp(16, 65536);
        if subdivisions % 2 == 1 {
            subdivisions += 1;
        }
        let h = dt_branch / subdivisions as f64;
        let lo = t_ion - 0.5 * dt_branch;
        let mut integral = Complex64::new(0.0, 0.0);
        for k in 0..=subdivisions {
            let s = (lo + k as f64 * h).clamp(0.0, self.pulse.duration());
            let simpson = if k == 0 || k == subdivisions {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            integral += simpson * self.weight_density(tag, s);
        }
        let weight = Complex64::new(0.0, -1.0) * integral * (h / 3.0);
        self.branch_with_weight(tag, t_ion, weight)
    }

    /// Branch state at a fixed ionization-time resolution, unnormalized.
    pub fn state_at_resolution(&self, tag: ElectronTag, steps_per_cycle: usize) -> EntangledMultimodeState {
        let n_branches =
            ((self.pulse.n_cycles * steps_per_cycle as f64).round() as usize).max(steps_per_cycle);
        let span = self.pulse.duration();
        let dt_branch = span / n_branches as f64;
        let branches: Vec<MultimodeBranch> = (0..n_branches)
            .map(|b| {
                let t_ion = (b as f64 + 0.5) * dt_branch;
                self.branch_at(tag, t_ion, dt_branch)
            })
            .collect();
        EntangledMultimodeState::new(branches)
    }

    /// Build the conditioned state for one final momentum. The quadrature
    /// model doubles the ionization-time resolution until the fundamental-
    /// mode photon distribution is stable in total variation; the saddle
    /// model produces one branch per tunneling burst directly.
    pub fn conditioned_state(&self, tag: ElectronTag) -> Result<EntangledMultimodeState> {
        if self.options.weight_model == WeightModel::SaddlePoint {
            return self.saddle_state(tag)?.normalized();
        }
        let mut steps = self.options.steps_per_cycle.max(64);
        let mut state = self.state_at_resolution(tag, steps);
        let mut pn = fundamental_photon_distribution(&state)?;
        loop {
            let next_steps = steps * 2;
            if next_steps > self.options.max_steps_per_cycle {
                return Err(Error::ConvergenceFailure {
                    n_tsteps: steps,
                    change: f64::NAN,
                });
            }
            let next = self.state_at_resolution(tag, next_steps);
            let next_pn = fundamental_photon_distribution(&next)?;
            let tv = total_variation(&pn, &next_pn);
            state = next;
            pn = next_pn;
            steps = next_steps;
            if tv < self.options.tv_tolerance {
                break;
            }
        }
        state.normalized()
    }

    /// Squared norm of the unnormalized conditioned state: the SFA yield for
    /// this momentum, used as a mixing weight.
    pub fn ionization_yield(&self, tag: ElectronTag) -> Result<f64> {
        Ok(match self.options.weight_model {
            WeightModel::Quadrature => self
                .state_at_resolution(tag, self.options.steps_per_cycle.max(64))
                .norm_sqr(),
            WeightModel::SaddlePoint => self.saddle_state(tag)?.norm_sqr(),
        })
    }

    /// Complex ionization-time saddles: roots of (v + A(t_s))^2 = -2 I_p in
    /// the upper half plane with decaying exp(i Phi). Each saddle carries the
    /// pole-regularized weight ~ exp(i Phi(t_s)) / E(t_s); mode amplitudes
    /// are evaluated at the real tunnel-exit time Re(t_s).
    pub fn saddle_state(&self, tag: ElectronTag) -> Result<EntangledMultimodeState> {
        let kappa = (2.0 * self.atom.ip).sqrt();
        let saddles = self.find_saddles(tag.v, kappa)?;
        if saddles.is_empty() {
            return Err(Error::InvalidInput(
                "no ionization saddle points found in the pulse window".into(),
            ));
        }
        let c_d = 2.0_f64.powf(3.5) * kappa.powf(2.5) / std::f64::consts::PI;
        let prefactor = c_d * std::f64::consts::PI / (16.0 * kappa);
        let phis: Vec<Complex64> = saddles
            .iter()
            .map(|&t_s| self.complex_action(tag.v, t_s))
            .collect();
        // Deep tunneling makes exp(-Im Phi) underflow; the common scale is
        // irrelevant for the normalized conditional state, so the smallest
        // imaginary action is factored out before exponentiating.
        let im_floor = phis.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
        let branches = saddles
            .into_iter()
            .zip(phis)
            .map(|(t_s, phi)| {
                let e_s = self.pulse.e_field_complex(t_s).expect("analytic envelope");
                let scaled = Complex64::new(0.0, 1.0) * Complex64::new(phi.re, phi.im - im_floor);
                let weight = Complex64::new(0.0, -1.0) * prefactor * scaled.exp() / e_s;
                let t_exit = t_s.re.clamp(0.0, self.pulse.duration());
                self.branch_with_weight(tag, t_exit, weight)
            })
            .collect();
        Ok(EntangledMultimodeState::new(branches))
    }

    /// Natural log of the saddle-model ionization yield (squared norm of the
    /// unscaled conditioned state); finite even when the linear-domain value
    /// underflows.
    pub fn saddle_log_yield(&self, tag: ElectronTag) -> Result<f64> {
        let kappa = (2.0 * self.atom.ip).sqrt();
        let saddles = self.find_saddles(tag.v, kappa)?;
        if saddles.is_empty() {
            return Err(Error::InvalidInput(
                "no ionization saddle points found in the pulse window".into(),
            ));
        }
        let phis: Vec<Complex64> = saddles
            .iter()
            .map(|&t_s| self.complex_action(tag.v, t_s))
            .collect();
        let im_floor = phis.iter().map(|p| p.im).fold(f64::INFINITY, f64::min);
        let state = self.saddle_state(tag)?;
        Ok(state.norm_sqr().max(1e-300).ln() - 2.0 * im_floor)
    }

    fn branch_with_weight(
        &self,
        tag: ElectronTag,
        t_ion: f64,
        weight: Complex64,
    ) -> MultimodeBranch {
        let mut alphas = Vec::with_capacity(self.options.n_modes);
        let mut phase = 0.0;
        for q in 1..=self.options.n_modes {
            let chi = self.chi_q_at(t_ion, q);
            let delta = self.delta_q(tag, t_ion, q);
            phase += (delta * chi.conj()).im;
            let mut alpha = chi + delta;
            if q == 1 {
                phase += (self.alpha_l * alpha.conj()).im;
                alpha += self.alpha_l;
            }
            alphas.push(alpha);
        }
        MultimodeBranch {
            coeff: weight,
            alphas,
            phase,
        }
    }

    /// Quasiclassical action Phi(t) = int_0^t [(v + A)^2/2 + I_p] dtau
    /// continued to complex t: the real-axis part comes from the cumulative
    /// grids, the vertical leg from Simpson quadrature of the analytic
    /// integrand.
    fn complex_action(&self, v: f64, t_s: Complex64) -> Complex64 {
        let t_r = t_s.re.clamp(0.0, self.pulse.duration());
        let real_part = 0.5
            * (v * v * t_r + 2.0 * v * self.interp(&self.ia, t_r) + self.interp(&self.ia2, t_r))
            + self.atom.ip * t_r;
        let n = 48usize;
        let h = t_s.im / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..=n {
            let t = Complex64::new(t_r, k as f64 * h);
            let a = self.pulse.vector_potential_complex(t).expect("analytic envelope");
            let integrand = 0.5 * (v + a) * (v + a) + self.atom.ip;
            let simpson = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += simpson * integrand;
        }
        real_part + acc * Complex64::new(0.0, h / 3.0)
    }

    fn find_saddles(&self, v: f64, kappa: f64) -> Result<Vec<Complex64>> {
        if self.pulse.e_field_complex(Complex64::new(0.0, 0.0)).is_none() {
            return Err(Error::InvalidInput(
                "saddle-point weights need an analytic envelope (sin2 or flat)".into(),
            ));
        }
        let duration = self.pulse.duration();
        let im_guess = kappa / self.pulse.f0.max(1e-12);
        let mut roots: Vec<Complex64> = Vec::new();
        let starts_per_cycle = 8usize;
        let n_starts = (self.pulse.n_cycles * starts_per_cycle as f64).ceil() as usize;
        for target_sign in [1.0, -1.0] {
            let target = Complex64::new(-v, target_sign * kappa);
            for k in 0..n_starts {
                let t0 = Complex64::new(
                    (k as f64 + 0.5) * duration / n_starts as f64,
                    im_guess.min(0.45 * self.pulse.cycle()),
                );
                if let Some(root) = self.newton_saddle(t0, target) {
                    if root.re > 1e-6 * duration
                        && root.re < duration * (1.0 - 1e-6)
                        && root.im > 0.0
                        && self.complex_action(v, root).im > 0.0
                        && !roots.iter().any(|r| (r - root).norm() < 1e-6 * duration)
                    {
                        roots.push(root);
                    }
                }
            }
        }
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        Ok(roots)
    }

    fn newton_saddle(&self, start: Complex64, target: Complex64) -> Option<Complex64> {
        let mut t = start;
        for _ in 0..80 {
            let a = self.pulse.vector_potential_complex(t)?;
            let f = a - target;
            if f.norm() < 1e-12 * (1.0 + target.norm()) {
                return Some(t);
            }
            let e = self.pulse.e_field_complex(t)?;
            if e.norm() < 1e-300 {
                return None;
            }
            // A' = -E
            let step = f / e;
            let clipped = if step.norm() > 0.5 * self.pulse.cycle() {
                step * (0.5 * self.pulse.cycle() / step.norm())
            } else {
                step
            };
            t += clipped;
        }
        None
    }
}

fn cumtrapz_complex(values: &[Complex64], dx: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for w in values.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Photon distribution of the fundamental mode with all harmonics projected
/// onto vacuum, normalized over the retained Fock space.
pub fn fundamental_photon_distribution(state: &EntangledMultimodeState) -> Result<Vec<f64>> {
    let reduced = state.fundamental_after_vacuum_harmonics();
    let max_amp = reduced
        .branches
        .iter()
        .map(|(_, a)| a.norm_sqr().sqrt())
        .fold(0.0, f64::max);
    let n_trunc = crate::phase_space::required_truncation(crate::phase_space::CoherentAmplitude::new(
        max_amp, 0.0,
    ));
    reduced.photon_distribution(n_trunc)
}

fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|i| (get(p, i) - get(q, i)).abs()).sum::<f64>()
}

/// Conditioned state for one final momentum; convenience wrapper that builds
/// the context, runs the doubling loop and returns the normalized state.
pub fn ati_conditioned_state(
    pulse: &LaserPulse,
    atom: &AtomSpec,
    coupling: ModeCoupling,
    alpha_l: Complex64,
    tag: ElectronTag,
    options: AtiOptions,
) -> Result<EntangledMultimodeState> {
    AtiContext::new(pulse, atom, coupling, alpha_l, options)?.conditioned_state(tag)
}

/// Momentum-averaged mixed state of the fundamental mode,
/// rho = sum_v w_v |Phi_IR(v)><Phi_IR(v)| with harmonics projected onto
/// vacuum ("no harmonics emitted") and weights renormalized.
pub fn ati_mixed_state(
    components: &[(f64, EntangledMultimodeState)],
    n_trunc: usize,
) -> Result<DensityMatrix> {
    if components.is_empty() {
        return Err(Error::InvalidInput("empty momentum grid".into()));
    }
    let mut parts = Vec::with_capacity(components.len());
    for (w, state) in components {
        let reduced: CoherentSuperposition = state
            .fundamental_after_vacuum_harmonics()
            .normalized()
            .map_err(|_| Error::NullConditioning)?;
        parts.push((*w, DensityMatrix::from_superposition(&reduced, n_trunc)?));
    }
    DensityMatrix::mixture(&parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfa::Envelope;
    use approx::assert_relative_eq;

    fn test_pulse(cep: f64) -> LaserPulse {
        LaserPulse::new(0.05, 0.057, 4.0, cep, Envelope::Sin2, 256)
    }

    #[test]
    fn displacement_vanishes_without_propagation() {
        let pulse = test_pulse(0.0);
        let d = ati_displacement(
            &pulse,
            ModeCoupling::new(1e-4),
            ElectronTag::new(0.4),
            10.0,
            10.0,
            1,
        );
        assert_eq!(d, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn displacement_imaginary_part_is_momentum_odd() {
        // full-pulse window, CEP = 0, symmetric envelope:
        // Im delta_q(v) = -Im delta_q(-v)
        let pulse = test_pulse(0.0);
        let coupling = ModeCoupling::new(1e-4);
        for q in [1usize, 2, 3] {
            for v in [0.2, 0.5, 0.9] {
                let plus = ati_displacement(
                    &pulse,
                    coupling,
                    ElectronTag::new(v),
                    0.0,
                    pulse.duration(),
                    q,
                );
                let minus = ati_displacement(
                    &pulse,
                    coupling,
                    ElectronTag::new(-v),
                    0.0,
                    pulse.duration(),
                    q,
                );
                let scale = plus.im.abs().max(1e-30);
                assert!(
                    (plus.im + minus.im).abs() / scale < 1e-6,
                    "q={q} v={v}: {} vs {}",
                    plus.im,
                    minus.im
                );
            }
        }
    }

    #[test]
    fn context_delta_matches_direct_integral() {
        let pulse = test_pulse(0.3);
        let atom = AtomSpec::from_ip_ev(12.13);
        let coupling = ModeCoupling::new(2e-4);
        let ctx = AtiContext::new(
            &pulse,
            &atom,
            coupling,
            Complex64::new(0.0, 3.0),
            AtiOptions {
                n_modes: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let tag = ElectronTag::new(0.6);
        for t_ion in [0.0, 30.0, 100.0] {
            for q in [1usize, 3] {
                let fast = ctx.delta_q(tag, t_ion, q);
                let direct =
                    ati_displacement(&pulse, coupling, tag, t_ion, pulse.duration(), q);
                assert!(
                    (fast - direct).norm() < 1e-4 * direct.norm().max(1e-12),
                    "t'={t_ion} q={q}: {fast} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn zero_coupling_gives_poissonian() {
        let pulse = test_pulse(0.0);
        let atom = AtomSpec::from_ip_ev(12.13);
        let alpha = Complex64::new(0.0, 3.0);
        let state = ati_conditioned_state(
            &pulse,
            &atom,
            ModeCoupling::new(0.0),
            alpha,
            ElectronTag::new(0.5),
            AtiOptions {
                n_modes: 4,
                ..Default::default()
            },
        )
        .unwrap();
        let pn = fundamental_photon_distribution(&state).unwrap();
        let mean: f64 = pn.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        assert_relative_eq!(mean, alpha.norm_sqr(), epsilon = 1e-6);
        // Poissonian check at the mode
        let n9 = alpha.norm_sqr() as usize;
        let expect = {
            let mut logp = -(alpha.norm_sqr());
            for k in 1..=n9 {
                logp += alpha.norm_sqr().ln() - (k as f64).ln();
            }
            logp.exp()
        };
        assert_relative_eq!(pn[n9], expect, epsilon = 1e-8);
    }

    #[test]
    fn mixed_state_single_momentum_is_pure() {
        let pulse = test_pulse(0.0);
        let atom = AtomSpec::from_ip_ev(12.13);
        let state = ati_conditioned_state(
            &pulse,
            &atom,
            ModeCoupling::new(5e-5),
            Complex64::new(0.0, 2.0),
            ElectronTag::new(0.5),
            AtiOptions {
                n_modes: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let rho = ati_mixed_state(&[(1.0, state)], 40).unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-9);
        assert!(rho.purity() > 1.0 - 1e-9, "purity {}", rho.purity());
        rho.check_invariants().unwrap();
    }

    #[test]
    fn mixed_state_trace_one_any_weights() {
        let pulse = test_pulse(0.0);
        let atom = AtomSpec::from_ip_ev(12.13);
        let mk = |v: f64| {
            ati_conditioned_state(
                &pulse,
                &atom,
                ModeCoupling::new(5e-5),
                Complex64::new(0.0, 2.0),
                ElectronTag::new(v),
                AtiOptions {
                    n_modes: 3,
                    ..Default::default()
                },
            )
            .unwrap()
        };
        let rho = ati_mixed_state(&[(0.3, mk(0.5)), (1.7, mk(-0.5))], 40).unwrap();
        assert_relative_eq!(rho.trace(), 1.0, epsilon = 1e-9);
        rho.check_invariants().unwrap();
    }
}
