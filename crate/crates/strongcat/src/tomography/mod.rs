//! Measurement loop: density matrices in the Fock basis, homodyne sampling,
//! maximum-likelihood reconstruction, filtered back-projection and fidelity
//! scoring.

mod homodyne;
mod maxlik;
mod radon;

pub use homodyne::{quadrature_pdf, quadrature_pdf_grid, sample_homodyne, HomodyneTrace, PhaseSamples};
pub use maxlik::{maxlik_reconstruct, MaxLikOptions, Reconstruction};
pub use radon::inverse_radon;

use crate::error::{Error, Result};
use crate::math::displacement_element;
use crate::phase_space::{
    g2_from_distribution, CoherentAmplitude, CoherentSuperposition, FockVector, WignerGrid,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::FRAC_2_PI;

/// Fock-truncated density operator: Hermitian, trace one, positive.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub elements: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Build from raw elements; symmetrizes and renormalizes the trace.
    pub fn new(elements: DMatrix<Complex64>) -> Self {
        let mut rho = Self { elements };
        rho.enforce_hermitian();
        rho.normalize_trace();
        rho
    }

    pub fn from_pure(state: &FockVector) -> Self {
        let v = DVector::from_column_slice(&state.coeffs);
        let norm = state.norm_sqr();
        Self {
            elements: &v * v.adjoint() / Complex64::new(norm, 0.0),
        }
    }

    pub fn coherent(alpha: CoherentAmplitude, n_trunc: usize) -> Result<Self> {
        Ok(Self::from_pure(&crate::phase_space::coherent_fock_coeffs(
            alpha, n_trunc,
        )?))
    }

    pub fn from_superposition(state: &CoherentSuperposition, n_trunc: usize) -> Result<Self> {
        Ok(Self::from_pure(&state.fock_coeffs(n_trunc)?))
    }

    /// Convex mixture sum_i w_i rho_i; weights are renormalized.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("empty mixture".into()));
        }
        let n = parts[0].1.dim();
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if total <= 0.0 {
            return Err(Error::InvalidInput("mixture weights must sum > 0".into()));
        }
        let mut acc = DMatrix::zeros(n, n);
        for (w, rho) in parts {
            if rho.dim() != n {
                return Err(Error::InvalidInput("mixture truncations differ".into()));
            }
            acc += &rho.elements * Complex64::new(w / total, 0.0);
        }
        Ok(Self { elements: acc })
    }

    /// Thermal state with mean photon number n_bar (geometric populations).
    pub fn thermal(n_bar: f64, n_trunc: usize) -> Self {
        let ratio = n_bar / (1.0 + n_bar);
        let mut elements = DMatrix::zeros(n_trunc, n_trunc);
        let mut p = 1.0 / (1.0 + n_bar);
        for n in 0..n_trunc {
            elements[(n, n)] = Complex64::new(p, 0.0);
            p *= ratio;
        }
        Self::new(elements)
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.elements[(i, i)].re).sum()
    }

    pub fn purity(&self) -> f64 {
        let sq = &self.elements * &self.elements;
        (0..self.dim()).map(|i| sq[(i, i)].re).sum()
    }

    fn enforce_hermitian(&mut self) {
        let adj = self.elements.adjoint();
        self.elements = (&self.elements + adj) * Complex64::new(0.5, 0.0);
    }

    fn normalize_trace(&mut self) {
        let tr = self.trace();
        if tr != 0.0 {
            self.elements /= Complex64::new(tr, 0.0);
        }
    }

    /// Populations rho_nn.
    pub fn photon_distribution(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.elements[(i, i)].re).collect()
    }

    /// Mean photon number sum n rho_nn.
    pub fn mean_photon(&self) -> f64 {
        self.photon_distribution()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    pub fn g2_zero(&self) -> Result<f64> {
        g2_from_distribution(&self.photon_distribution())
    }

    /// Phase-space rotation rho -> exp(-i phi n) rho exp(i phi n).
    pub fn rotated(&self, phi: f64) -> Self {
        let n = self.dim();
        let mut elements = self.elements.clone();
        for i in 0..n {
            for j in 0..n {
                let phase = Complex64::new(0.0, -phi * (i as f64 - j as f64)).exp();
                elements[(i, j)] *= phase;
            }
        }
        Self { elements }
    }

    /// Eigenvalues (ascending is not guaranteed; Hermitian solver output).
    pub fn eigenvalues(&self) -> Vec<f64> {
        nalgebra::SymmetricEigen::new(self.elements.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    }

    /// Validate the Hermiticity / trace / positivity invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let adj = self.elements.adjoint();
        let herm_dev = (&self.elements - adj).norm();
        if herm_dev > 1e-12 * self.dim() as f64 {
            return Err(Error::InvalidInput(format!(
                "density matrix not Hermitian: deviation {herm_dev:.3e}"
            )));
        }
        if (self.trace() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput(format!(
                "density matrix trace {} != 1",
                self.trace()
            )));
        }
        if let Some(min) = self
            .eigenvalues()
            .iter()
            .copied()
            .reduce(f64::min)
        {
            if min < -1e-10 {
                return Err(Error::InvalidInput(format!(
                    "density matrix has negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }

    /// Population of the top retained Fock level.
    pub fn leakage(&self) -> f64 {
        let n = self.dim();
        self.elements[(n - 1, n - 1)].re
    }
}

/// Universal Fock-basis Wigner oracle:
/// W(beta) = (2/pi) Tr[rho D(2 beta) P], with P the parity operator, evaluated
/// through Laguerre-based displacement matrix elements.
pub fn wigner_from_rho_point(rho: &DensityMatrix, beta: CoherentAmplitude) -> f64 {
    let n = rho.dim();
    let gamma = 2.0 * beta.as_complex();
    // kernel K_mn = (2/pi) (-1)^n <m|D(gamma)|n>; W = sum_nm rho_nm K_mn
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..n {
        for nn in 0..n {
            let sign = if nn % 2 == 0 { 1.0 } else { -1.0 };
            acc += rho.elements[(nn, m)] * sign * displacement_element(m, nn, gamma);
        }
    }
    FRAC_2_PI * acc.re
}

/// Evaluate the Fock-basis Wigner oracle on a grid.
pub fn wigner_from_rho(
    rho: &DensityMatrix,
    x_range: (f64, f64),
    p_range: (f64, f64),
    nx: usize,
    np: usize,
) -> WignerGrid {
    WignerGrid::evaluate(x_range, p_range, nx, np, |beta| {
        wigner_from_rho_point(rho, beta)
    })
}

/// Uhlmann fidelity (Tr sqrt(sqrt(r1) r2 sqrt(r1)))^2.
pub fn fidelity(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dim() != r2.dim() {
        return Err(Error::InvalidInput(
            "fidelity requires equal truncations".into(),
        ));
    }
    let sqrt1 = psd_sqrt(&r1.elements);
    let inner = &sqrt1 * &r2.elements * &sqrt1;
    let eig = nalgebra::SymmetricEigen::new(inner);
    let tr: f64 = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

fn psd_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut diag = DMatrix::zeros(n, n);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        diag[(i, i)] = Complex64::new(l.max(0.0).sqrt(), 0.0);
    }
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}
