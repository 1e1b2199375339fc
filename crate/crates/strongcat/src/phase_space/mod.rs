//! Single-mode quantum-optics kernel: coherent states and their overlaps,
//! Fock expansions, coherent-state superpositions and photon statistics.
//!
//! Conventions used throughout the crate:
//! * quadratures x = (a + a^dag)/sqrt(2), p = (a - a^dag)/(i sqrt(2)), so the
//!   vacuum has Delta x = Delta p = 1/sqrt(2);
//! * a coherent amplitude alpha maps to phase space as x0 = sqrt(2) Re alpha,
//!   p0 = sqrt(2) Im alpha.

mod wigner;

pub use wigner::{wigner_coherent, wigner_css, wigner_fock, wigner_squeezed, WignerGrid};

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex amplitude of a coherent state; |alpha|^2 is its mean photon number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentAmplitude {
    pub re: f64,
    pub im: f64,
}

impl CoherentAmplitude {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn from_polar(magnitude: f64, phase: f64) -> Self {
        Self::new(magnitude * phase.cos(), magnitude * phase.sin())
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Mean quadrature position x0 = sqrt(2) Re alpha.
    pub fn x0(self) -> f64 {
        std::f64::consts::SQRT_2 * self.re
    }

    /// Mean quadrature momentum p0 = sqrt(2) Im alpha.
    pub fn p0(self) -> f64 {
        std::f64::consts::SQRT_2 * self.im
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

impl From<Complex64> for CoherentAmplitude {
    fn from(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl From<f64> for CoherentAmplitude {
    fn from(x: f64) -> Self {
        Self::new(x, 0.0)
    }
}

/// Overlap <alpha1|alpha2> = exp(-(|a1|^2 + |a2|^2 - 2 a1* a2)/2).
///
/// |result| <= 1 with equality iff the amplitudes coincide.
pub fn coherent_overlap(a1: CoherentAmplitude, a2: CoherentAmplitude) -> Complex64 {
    let z1 = a1.as_complex();
    let z2 = a2.as_complex();
    let exponent = -0.5 * (z1.norm_sqr() + z2.norm_sqr()) + z1.conj() * z2;
    exponent.exp()
}

/// Leakage limit for states admitted to tomography.
pub const LEAKAGE_LIMIT: f64 = 1e-8;

/// Default Fock truncation for coherent-dominated states of amplitude alpha;
/// keeps the Poissonian tail leakage below 1e-10 up to |alpha| ~ 4.
pub fn required_truncation(alpha: CoherentAmplitude) -> usize {
    let a = alpha.norm_sqr().sqrt();
    (a * a + 8.0 * a + 20.0).ceil() as usize
}

/// State vector in the truncated Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    pub coeffs: Vec<Complex64>,
}

impl FockVector {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn vacuum(n_trunc: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_trunc];
        coeffs[0] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn fock(n: usize, n_trunc: usize) -> Self {
        assert!(n < n_trunc, "Fock index beyond truncation");
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_trunc];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn n_trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rescale to unit norm.
    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for c in &mut self.coeffs {
                *c /= norm;
            }
        }
    }

    /// Population of the top retained Fock level.
    pub fn leakage(&self) -> f64 {
        self.coeffs.last().map(|c| c.norm_sqr()).unwrap_or(0.0)
    }

    /// Photon number distribution P_n = |<n|psi>|^2.
    pub fn photon_distribution(&self) -> Vec<f64> {
        let norm = self.norm_sqr();
        self.coeffs.iter().map(|c| c.norm_sqr() / norm).collect()
    }

    /// Mean photon number sum n P_n.
    pub fn mean_photon(&self) -> f64 {
        self.photon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Second-order correlation g2(0) = (<n^2> - <n>)/<n>^2.
    pub fn g2_zero(&self) -> Result<f64> {
        g2_from_distribution(&self.photon_distribution())
    }
}

/// g2(0) from a photon-number distribution.
pub fn g2_from_distribution(probs: &[f64]) -> Result<f64> {
    let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    if mean <= 0.0 {
        return Err(Error::ZeroMeanPhoton);
    }
    let mean_sq: f64 = probs
        .iter()
        .enumerate()
        .map(|(n, p)| (n as f64) * (n as f64) * p)
        .sum();
    Ok((mean_sq - mean) / (mean * mean))
}

/// Fock expansion of |alpha>: c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!).
pub fn coherent_fock_coeffs(alpha: CoherentAmplitude, n_trunc: usize) -> Result<FockVector> {
    if n_trunc == 0 {
        return Err(Error::InvalidInput("n_trunc must be positive".into()));
    }
    let state = FockVector::new(coherent_coeffs_raw(alpha.as_complex(), n_trunc));
    let leakage = state.leakage();
    if leakage >= LEAKAGE_LIMIT {
        return Err(Error::TruncationTooSmall {
            n_trunc,
            leakage,
            limit: LEAKAGE_LIMIT,
        });
    }
    Ok(state)
}

/// Unchecked coherent coefficients; used internally where branch amplitudes
/// have already been vetted against the truncation.
pub(crate) fn coherent_coeffs_raw(alpha: Complex64, n_trunc: usize) -> Vec<Complex64> {
    let mut coeffs = Vec::with_capacity(n_trunc);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    coeffs.push(c);
    for n in 1..n_trunc {
        c *= alpha / (n as f64).sqrt();
        coeffs.push(c);
    }
    coeffs
}

/// Squeezing parameters of a displaced squeezed-vacuum state.
///
/// Positive k squeezes the x quadrature: the variances are exp(-2k)/2 along x
/// and exp(+2k)/2 along p, so their product stays at the minimum 1/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub k: f64,
    pub alpha: CoherentAmplitude,
}

impl SqueezeParams {
    pub fn new(k: f64, alpha: CoherentAmplitude) -> Self {
        Self { k, alpha }
    }

    /// Fock coefficients of D(alpha) S(k) |0>.
    ///
    /// The squeezed vacuum obeys (a cosh k + a^dag sinh k)|SV> = 0, giving the
    /// two-step recurrence c_(n+1) = -tanh(k) sqrt(n/(n+1)) c_(n-1); the
    /// displacement is applied as a Fock-basis matrix built from
    /// [`crate::math::displacement_element`].
    pub fn fock_coeffs(&self, n_trunc: usize) -> Result<FockVector> {
        if n_trunc == 0 {
            return Err(Error::InvalidInput("n_trunc must be positive".into()));
        }
        let th = self.k.tanh();
        let mut sv = vec![Complex64::new(0.0, 0.0); n_trunc];
        sv[0] = Complex64::new(1.0 / self.k.cosh().sqrt(), 0.0);
        for n in (2..n_trunc).step_by(2) {
            sv[n] = -th * ((n - 1) as f64 / n as f64).sqrt() * sv[n - 2];
        }
        let gamma = self.alpha.as_complex();
        let mut out = vec![Complex64::new(0.0, 0.0); n_trunc];
        for m in 0..n_trunc {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &c) in sv.iter().enumerate() {
                if c.norm_sqr() > 0.0 {
                    acc += crate::math::displacement_element(m, n, gamma) * c;
                }
            }
            out[m] = acc;
        }
        let mut state = FockVector::new(out);
        let leakage = state.leakage();
        if leakage >= LEAKAGE_LIMIT {
            return Err(Error::TruncationTooSmall {
                n_trunc,
                leakage,
                limit: LEAKAGE_LIMIT,
            });
        }
        state.normalize();
        Ok(state)
    }
}

/// Finite superposition of single-mode coherent states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentSuperposition {
    /// (coefficient, amplitude) pairs; coefficients are unnormalized.
    pub branches: Vec<(Complex64, CoherentAmplitude)>,
}

/// Amplitudes closer than this are merged before Gram assembly to avoid
/// ill-conditioned overlap matrices.
const MERGE_TOLERANCE: f64 = 1e-8;

impl CoherentSuperposition {
    pub fn new(branches: Vec<(Complex64, CoherentAmplitude)>) -> Self {
        let mut s = Self { branches };
        s.merge_close_branches();
        s
    }

    /// Single coherent state.
    pub fn coherent(alpha: CoherentAmplitude) -> Self {
        Self::new(vec![(Complex64::new(1.0, 0.0), alpha)])
    }

    /// Shifted cat |alpha + chi> - xi |alpha> with xi = <alpha|alpha + chi>.
    ///
    /// Its squared norm is 1 - exp(-|chi|^2).
    pub fn shifted_cat(alpha: CoherentAmplitude, chi: CoherentAmplitude) -> Self {
        let displaced = CoherentAmplitude::from(alpha.as_complex() + chi.as_complex());
        let xi = coherent_overlap(alpha, displaced);
        Self::new(vec![
            (Complex64::new(1.0, 0.0), displaced),
            (-xi, alpha),
        ])
    }

    /// Even (+) or odd (-) cat (|alpha> +/- |-alpha>), unnormalized.
    pub fn parity_cat(alpha: CoherentAmplitude, even: bool) -> Self {
        let sign = if even { 1.0 } else { -1.0 };
        let neg = CoherentAmplitude::new(-alpha.re, -alpha.im);
        Self::new(vec![
            (Complex64::new(1.0, 0.0), alpha),
            (Complex64::new(sign, 0.0), neg),
        ])
    }

    fn merge_close_branches(&mut self) {
        let mut merged: Vec<(Complex64, CoherentAmplitude)> = Vec::new();
        for &(c, a) in &self.branches {
            if let Some(slot) = merged.iter_mut().find(|(_, b)| {
                (a.as_complex() - b.as_complex()).norm() < MERGE_TOLERANCE
            }) {
                slot.0 += c;
            } else {
                merged.push((c, a));
            }
        }
        self.branches = merged;
    }

    /// Gram matrix G_ij = <alpha_i|alpha_j>.
    pub fn gram(&self) -> nalgebra::DMatrix<Complex64> {
        let n = self.branches.len();
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            coherent_overlap(self.branches[i].1, self.branches[j].1)
        })
    }

    /// Squared norm from the Gram matrix; strictly positive for
    /// non-degenerate superpositions.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ci, ai) in &self.branches {
            for (cj, aj) in &self.branches {
                acc += ci.conj() * cj * coherent_overlap(*ai, *aj);
            }
        }
        acc.re
    }

    /// Sum of squared coefficient magnitudes; sets the scale against which
    /// cancellation-driven degeneracy is judged.
    pub fn coeff_scale(&self) -> f64 {
        self.branches.iter().map(|(c, _)| c.norm_sqr()).sum()
    }

    /// Rescale coefficients to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 <= 1e-12 * self.coeff_scale() {
            return Err(Error::DegenerateSuperposition { norm_sq: n2 });
        }
        let scale = 1.0 / n2.sqrt();
        Ok(Self {
            branches: self
                .branches
                .iter()
                .map(|&(c, a)| (c * scale, a))
                .collect(),
        })
    }

    /// Mean amplitude <a> of the normalized state.
    pub fn mean_amplitude(&self) -> Complex64 {
        // <a> = sum_ij ci* cj alpha_j <alpha_i|alpha_j> / norm^2
        let mut acc = Complex64::new(0.0, 0.0);
        for (ci, ai) in &self.branches {
            for (cj, aj) in &self.branches {
                acc += ci.conj() * cj * aj.as_complex() * coherent_overlap(*ai, *aj);
            }
        }
        acc / self.norm_sqr()
    }

    /// Fock expansion with the leakage check applied.
    pub fn fock_coeffs(&self, n_trunc: usize) -> Result<FockVector> {
        let n2 = self.norm_sqr();
        if n2 <= 1e-12 * self.coeff_scale() {
            return Err(Error::DegenerateSuperposition { norm_sq: n2 });
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_trunc];
        for (c, a) in &self.branches {
            for (n, amp) in coherent_coeffs_raw(a.as_complex(), n_trunc)
                .into_iter()
                .enumerate()
            {
                coeffs[n] += c * amp;
            }
        }
        let mut state = FockVector::new(coeffs);
        state.normalize();
        let leakage = state.leakage();
        if leakage >= LEAKAGE_LIMIT {
            return Err(Error::TruncationTooSmall {
                n_trunc,
                leakage,
                limit: LEAKAGE_LIMIT,
            });
        }
        Ok(state)
    }

    /// Photon number distribution of the normalized superposition.
    pub fn photon_distribution(&self, n_trunc: usize) -> Result<Vec<f64>> {
        Ok(self.fock_coeffs(n_trunc)?.photon_distribution())
    }
}
