//! Closed-form Wigner functions and phase-space grids.
//!
//! All pointwise functions return W(beta) normalized against the complex
//! measure d^2 beta, so a coherent state peaks at 2/pi. A [`WignerGrid`] is
//! sampled over the quadratures (x, p) with beta = (x + i p)/sqrt(2); its
//! Riemann integral therefore carries the Jacobian dx dp / 2.

use super::{coherent_overlap, CoherentAmplitude, CoherentSuperposition, SqueezeParams};
use crate::error::{Error, Result};
use crate::math::laguerre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_2_PI;

/// Wigner function of a coherent state: W(beta) = (2/pi) exp(-2|beta - alpha|^2).
pub fn wigner_coherent(alpha: CoherentAmplitude, beta: CoherentAmplitude) -> f64 {
    let d2 = (beta.as_complex() - alpha.as_complex()).norm_sqr();
    FRAC_2_PI * (-2.0 * d2).exp()
}

/// Wigner function of the Fock state |n>:
/// W_n(beta) = (2/pi) (-1)^n exp(-2|beta|^2) L_n(4|beta|^2).
pub fn wigner_fock(n: usize, beta: CoherentAmplitude) -> f64 {
    let b2 = beta.norm_sqr();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    FRAC_2_PI * sign * (-2.0 * b2).exp() * laguerre(n, 4.0 * b2)
}

/// Wigner function of a displaced squeezed-vacuum state: an anisotropic
/// Gaussian with variances exp(-2k)/2 along x and exp(+2k)/2 along p,
/// centered at alpha. Reduces to [`wigner_coherent`] at k = 0.
pub fn wigner_squeezed(params: SqueezeParams, beta: CoherentAmplitude) -> f64 {
    let d = beta.as_complex() - params.alpha.as_complex();
    let (sx, sp) = ((2.0 * params.k).exp(), (-2.0 * params.k).exp());
    // (x - x0)^2 = 2 Re(beta - alpha)^2, likewise for p
    FRAC_2_PI * (-2.0 * (sx * d.re * d.re + sp * d.im * d.im)).exp()
}

/// Wigner function of a coherent-state superposition, from the Gram-weighted
/// sum of Gaussian and interference kernels
/// W = (2/pi N) sum_ij ci cj* exp(-2i Im(beta ai*)) <aj|2 beta - ai>.
pub fn wigner_css(state: &CoherentSuperposition, beta: CoherentAmplitude) -> Result<f64> {
    let norm_sq = state.norm_sqr();
    if norm_sq <= 1e-12 * state.coeff_scale() {
        return Err(Error::DegenerateSuperposition { norm_sq });
    }
    let b = beta.as_complex();
    let mut acc = Complex64::new(0.0, 0.0);
    for (ci, ai) in &state.branches {
        let za = ai.as_complex();
        let shifted = CoherentAmplitude::from(2.0 * b - za);
        let phase = Complex64::new(0.0, -2.0 * (b * za.conj()).im).exp();
        for (cj, aj) in &state.branches {
            acc += ci * cj.conj() * phase * coherent_overlap(*aj, shifted);
        }
    }
    Ok(FRAC_2_PI * acc.re / norm_sq)
}

/// Wigner function sampled on a rectangular (x, p) grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WignerGrid {
    pub x_range: (f64, f64),
    pub p_range: (f64, f64),
    pub nx: usize,
    pub np: usize,
    /// Row-major values, rows indexed by p, columns by x.
    pub values: Vec<f64>,
}

impl WignerGrid {
    /// Evaluate a pointwise Wigner function on the grid. Rows are filled in
    /// parallel and joined in index order, so the result is deterministic.
    pub fn evaluate<F>(
        x_range: (f64, f64),
        p_range: (f64, f64),
        nx: usize,
        np: usize,
        f: F,
    ) -> Self
    where
        F: Fn(CoherentAmplitude) -> f64 + Sync,
    {
        assert!(nx >= 2 && np >= 2, "grid needs at least 2x2 points");
        let xs = crate::math::linspace(x_range.0, x_range.1, nx);
        let ps = crate::math::linspace(p_range.0, p_range.1, np);
        let values: Vec<f64> = ps
            .par_iter()
            .flat_map_iter(|&p| {
                let xs = &xs;
                let f = &f;
                xs.iter().map(move |&x| {
                    f(CoherentAmplitude::new(
                        x / std::f64::consts::SQRT_2,
                        p / std::f64::consts::SQRT_2,
                    ))
                })
            })
            .collect();
        Self {
            x_range,
            p_range,
            nx,
            np,
            values,
        }
    }

    pub fn x_values(&self) -> Vec<f64> {
        crate::math::linspace(self.x_range.0, self.x_range.1, self.nx)
    }

    pub fn p_values(&self) -> Vec<f64> {
        crate::math::linspace(self.p_range.0, self.p_range.1, self.np)
    }

    pub fn value(&self, ip: usize, ix: usize) -> f64 {
        self.values[ip * self.nx + ix]
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_range.1 - self.p_range.0) / (self.np - 1) as f64
    }

    /// Riemann integral over d^2 beta = dx dp / 2; equals 1 on grids that
    /// capture the state's support.
    pub fn integral(&self) -> f64 {
        let sum: f64 = self.values.iter().sum();
        sum * self.dx() * self.dp() * 0.5
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Marginal along p (phase-0 quadrature distribution over x), carrying
    /// the d^2 beta measure so it matches the quadrature pdf.
    pub fn marginal_x(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nx];
        for ip in 0..self.np {
            for ix in 0..self.nx {
                out[ix] += self.value(ip, ix);
            }
        }
        for v in &mut out {
            *v *= self.dp() * 0.5;
        }
        out
    }
}
