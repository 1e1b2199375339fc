//! Balanced-homodyne quadrature statistics and seeded sampling.

use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::math::{cumtrapz, linspace, oscillator_eigenfunctions};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Quadrature samples recorded at one local-oscillator phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSamples {
    pub phi: f64,
    pub samples: Vec<f64>,
}

/// Phase-tagged homodyne record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct HomodyneTrace {
    pub entries: Vec<PhaseSamples>,
}

impl HomodyneTrace {
    pub fn total_samples(&self) -> usize {
        self.entries.iter().map(|e| e.samples.len()).sum()
    }

    /// Number of distinct phases modulo pi.
    pub fn distinct_phases(&self) -> usize {
        let mut phases: Vec<f64> = self
            .entries
            .iter()
            .map(|e| e.phi.rem_euclid(std::f64::consts::PI))
            .collect();
        phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
        phases.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        phases.len()
    }
}

/// Probability density P_phi(x) = <x_phi| rho |x_phi>, evaluated by rotating
/// the state and expanding |x> over oscillator eigenfunctions.
pub fn quadrature_pdf(rho: &DensityMatrix, phi: f64, x: f64) -> f64 {
    let n = rho.dim();
    let fns = oscillator_eigenfunctions(n, x);
    // u_n = exp(i phi n) psi_n(x); P = u^dag rho u
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let ui = Complex64::new(0.0, phi * i as f64).exp() * fns[i];
        for j in 0..n {
            let uj = Complex64::new(0.0, phi * j as f64).exp() * fns[j];
            acc += ui.conj() * rho.elements[(i, j)] * uj;
        }
    }
    acc.re.max(0.0)
}

/// Vectorized pdf over a grid of x values (one phase); avoids re-deriving the
/// rotated matrix per point.
pub fn quadrature_pdf_grid(rho: &DensityMatrix, phi: f64, xs: &[f64]) -> Vec<f64> {
    let rotated = rho.rotated(phi);
    let n = rho.dim();
    xs.par_iter()
        .map(|&x| {
            let fns = oscillator_eigenfunctions(n, x);
            let mut acc = 0.0;
            for i in 0..n {
                // diagonal
                acc += rotated.elements[(i, i)].re * fns[i] * fns[i];
                for j in (i + 1)..n {
                    acc += 2.0 * rotated.elements[(i, j)].re * fns[i] * fns[j];
                }
            }
            acc.max(0.0)
        })
        .collect()
}

/// Half-width of an x grid that captures the support of a state truncated at
/// n levels.
pub fn support_radius(n_trunc: usize) -> f64 {
    (2.0 * n_trunc as f64).sqrt() + 3.0
}

/// Draw quadrature samples by inverse-CDF lookup on an adaptive grid.
///
/// Determinism contract: the stream for phase index k is ChaCha8 seeded by
/// `seed` on stream k, so traces are byte-identical across runs and thread
/// counts. Optional detector efficiency `eta` acts as a pre-measurement
/// beam splitter, implemented as sampling from the smoothed distribution
/// x -> sqrt(eta) x + sqrt((1-eta)/2) g with g standard normal.
pub fn sample_homodyne(
    rho: &DensityMatrix,
    phases: &[f64],
    shots_per_phase: usize,
    seed: u64,
    eta: f64,
) -> Result<HomodyneTrace> {
    if shots_per_phase == 0 {
        return Err(Error::InvalidInput("shots_per_phase must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&eta) || eta == 0.0 {
        return Err(Error::InvalidInput("eta must lie in (0, 1]".into()));
    }
    let radius = support_radius(rho.dim());
    let grid_n = (radius / 0.002).ceil() as usize | 1;
    let xs = linspace(-radius, radius, grid_n);
    let dx = xs[1] - xs[0];

    let entries: Vec<PhaseSamples> = phases
        .iter()
        .enumerate()
        .map(|(k, &phi)| {
            let pdf = quadrature_pdf_grid(rho, phi, &xs);
            let mut cdf = cumtrapz(&pdf, dx);
            let total = *cdf.last().unwrap();
            for v in &mut cdf {
                *v /= total;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let samples = (0..shots_per_phase)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let x = invert_cdf(&xs, &cdf, u);
                    if eta < 1.0 {
                        let g: f64 = sample_standard_normal(&mut rng);
                        eta.sqrt() * x + ((1.0 - eta) / 2.0).sqrt() * g
                    } else {
                        x
                    }
                })
                .collect();
            PhaseSamples { phi, samples }
        })
        .collect();
    Ok(HomodyneTrace { entries })
}

fn invert_cdf(xs: &[f64], cdf: &[f64], u: f64) -> f64 {
    let idx = cdf.partition_point(|&c| c < u);
    if idx == 0 {
        return xs[0];
    }
    if idx >= cdf.len() {
        return *xs.last().unwrap();
    }
    let (c0, c1) = (cdf[idx - 1], cdf[idx]);
    let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
    xs[idx - 1] + frac * (xs[idx] - xs[idx - 1])
}

fn sample_standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; two uniforms per draw keeps the stream layout simple
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{CoherentAmplitude, CoherentSuperposition, FockVector};
    use approx::assert_relative_eq;

    #[test]
    fn vacuum_pdf_is_gaussian_with_variance_half() {
        let rho = DensityMatrix::from_pure(&FockVector::vacuum(10));
        for x in [-1.0_f64, 0.0, 0.4, 1.3] {
            let expect = (-(x * x)).exp() / std::f64::consts::PI.sqrt();
            assert_relative_eq!(quadrature_pdf(&rho, 0.3, x), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn coherent_mean_traces_sinusoid() {
        // mean of x_phi is sqrt(2)|alpha| cos(phi - theta)
        let alpha = CoherentAmplitude::from_polar(2.0, 0.7);
        let rho = DensityMatrix::coherent(alpha, 40).unwrap();
        let xs = linspace(-8.0, 8.0, 2001);
        let dx = xs[1] - xs[0];
        for phi in [0.0, 0.7, 1.4, 2.5] {
            let pdf = quadrature_pdf_grid(&rho, phi, &xs);
            let mean: f64 = xs.iter().zip(&pdf).map(|(&x, &p)| x * p * dx).sum();
            let expect = std::f64::consts::SQRT_2 * 2.0 * (phi - 0.7).cos();
            assert_relative_eq!(mean, expect, epsilon = 1e-6);
        }
        // phi = 0 on a real alpha = 2 gives mean 2 sqrt(2)
        let rho2 = DensityMatrix::coherent(CoherentAmplitude::new(2.0, 0.0), 40).unwrap();
        let pdf = quadrature_pdf_grid(&rho2, 0.0, &xs);
        let mean: f64 = xs.iter().zip(&pdf).map(|(&x, &p)| x * p * dx).sum();
        assert_relative_eq!(mean, 2.0 * std::f64::consts::SQRT_2, epsilon = 1e-6);
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let rho = DensityMatrix::from_pure(&FockVector::vacuum(6));
        let phases = [0.0, 0.5, 1.0];
        let t1 = sample_homodyne(&rho, &phases, 4000, 99, 1.0).unwrap();
        let t2 = sample_homodyne(&rho, &phases, 4000, 99, 1.0).unwrap();
        assert_eq!(t1, t2);
        for entry in &t1.entries {
            let n = entry.samples.len() as f64;
            let mean = entry.samples.iter().sum::<f64>() / n;
            let var = entry.samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            // vacuum variance 1/2; 3 sigma of the variance estimator
            let sigma = 0.5 * (2.0 / n).sqrt();
            assert!((var - 0.5).abs() < 3.0 * sigma, "var = {var}");
            assert!(mean.abs() < 3.0 * (0.5 / n).sqrt() + 1e-3);
        }
    }

    #[test]
    fn even_cat_fringes_only_in_conjugate_quadrature() {
        let alpha = CoherentAmplitude::new(1.8, 0.0);
        let cat = CoherentSuperposition::parity_cat(alpha, true);
        let rho = DensityMatrix::from_superposition(&cat, 40).unwrap();
        let xs = linspace(-5.0, 5.0, 1001);
        let count_modes = |phi: f64| {
            let pdf = quadrature_pdf_grid(&rho, phi, &xs);
            let max = pdf.iter().fold(0.0_f64, |m, &v| m.max(v));
            // local maxima above a tenth of the global peak
            pdf.windows(3)
                .filter(|w| w[1] > w[0] && w[1] > w[2] && w[1] > 0.1 * max)
                .count()
        };
        let peaks_x = count_modes(0.0);
        let peaks_p = count_modes(std::f64::consts::FRAC_PI_2);
        assert!(peaks_x == 2, "expected two lobes along x, got {peaks_x}");
        assert!(peaks_p >= 3, "expected fringes along p, got {peaks_p}");
    }
}
