//! Entanglement measures for branch superpositions. Reduced density
//! operators of nonorthogonal coherent branches are diagonalized in the
//! branch subspace via Gram matrices; Fock-space truncation never enters.

use super::ati::LightMatterState;
use super::EntangledMultimodeState;
use crate::error::{Error, Result};
use crate::math::entropy_base2;
use crate::phase_space::coherent_overlap;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn partition_gram(
    state: &EntangledMultimodeState,
    modes: &[usize],
) -> DMatrix<Complex64> {
    let n = state.branches.len();
    DMatrix::from_fn(n, n, |i, j| {
        modes
            .iter()
            .map(|&q| {
                coherent_overlap(
                    state.branches[i].alphas[q].into(),
                    state.branches[j].alphas[q].into(),
                )
            })
            .product()
    })
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

/// Eigenvalues of the reduced state of `partition` (0-based mode indices).
///
/// For branches |a_i>|b_i> with weights w_i the reduced operator is
/// rho_A = sum_ij W_ij |a_i><a_j| with W_ij = w_i w_j* B_ji / norm^2; its
/// spectrum equals that of the Hermitian matrix A^(1/2) W A^(1/2) built from
/// the partition Gram A and complement Gram B.
pub fn reduced_eigenvalues(
    state: &EntangledMultimodeState,
    partition: &[usize],
) -> Result<Vec<f64>> {
    let n_modes = state.mode_count;
    if partition.is_empty() || partition.len() >= n_modes {
        return Err(Error::InvalidInput(
            "partition must be a nonempty proper subset of the modes".into(),
        ));
    }
    if partition.iter().any(|&q| q >= n_modes) {
        return Err(Error::InvalidInput("partition index out of range".into()));
    }
    let complement: Vec<usize> = (0..n_modes).filter(|q| !partition.contains(q)).collect();
    let a = partition_gram(state, partition);
    let b = partition_gram(state, &complement);
    let n = state.branches.len();
    let weights: Vec<Complex64> = state.branches.iter().map(|br| br.weight()).collect();
    let mut norm_sq = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            norm_sq += weights[i].conj() * weights[j] * a[(i, j)] * b[(i, j)];
        }
    }
    if norm_sq.re < 1e-14 {
        return Err(Error::NullConditioning);
    }
    let w = DMatrix::from_fn(n, n, |i, j| {
        weights[i] * weights[j].conj() * b[(j, i)] / norm_sq.re
    });
    let sqrt_a = psd_sqrt(&a);
    let h = &sqrt_a * w * &sqrt_a;
    let mut eigs: Vec<f64> = nalgebra::SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .collect();
    let total: f64 = eigs.iter().sum();
    if total > 0.0 {
        for l in &mut eigs {
            *l /= total;
        }
    }
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(eigs)
}

/// Linear entropy S_lin = 1 - Tr(rho^2) of the reduced state of `partition`.
/// Bounded by 1 - 1/n for an n-branch state, exactly zero for products.
pub fn linear_entropy(state: &EntangledMultimodeState, partition: &[usize]) -> Result<f64> {
    let eigs = reduced_eigenvalues(state, partition)?;
    Ok(1.0 - eigs.iter().map(|l| l * l).sum::<f64>())
}

/// Entropy of entanglement S = -Tr(rho log2 rho) of a light-matter state
/// whose electron tags are mutually orthogonal. The reduced-field spectrum
/// is read off the Gram matrix G_ij = <Phi_j|Phi_i> of the (weighted) field
/// components.
pub fn entropy_of_entanglement(state: &LightMatterState) -> Result<f64> {
    let n = state.components.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "need at least two electron branches".into(),
        ));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (state.components[i].0.v - state.components[j].0.v).abs() < 1e-12 {
                return Err(Error::InvalidInput(
                    "electron tags must carry distinct momenta".into(),
                ));
            }
        }
    }
    let gram = DMatrix::from_fn(n, n, |i, j| {
        state.components[j].1.state_overlap(&state.components[i].1)
    });
    let trace: f64 = (0..n).map(|i| gram[(i, i)].re).sum();
    if trace <= 0.0 {
        return Err(Error::NullConditioning);
    }
    let rho = gram / Complex64::new(trace, 0.0);
    let eigs: Vec<f64> = nalgebra::SymmetricEigen::new(rho)
        .eigenvalues
        .iter()
        .map(|&l| l.max(0.0))
        .collect();
    Ok(entropy_base2(&eigs))
}
