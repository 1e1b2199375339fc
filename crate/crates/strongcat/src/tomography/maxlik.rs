//! Iterative maximum-likelihood density-matrix reconstruction from binned
//! homodyne quadrature samples (the R rho R fixed-point iteration).

use super::{DensityMatrix, HomodyneTrace};
use crate::error::{Error, Result};
use crate::math::oscillator_eigenfunctions;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Tuning knobs for the fixed-point iteration.
#[derive(Debug, Clone, Copy)]
pub struct MaxLikOptions {
    pub max_iter: usize,
    /// Relative log-likelihood change below which iteration stops.
    pub tol: f64,
    /// Quadrature bin width for the measurement projectors; well below the
    /// vacuum sigma of ~0.707.
    pub bin_width: f64,
}

impl Default for MaxLikOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-9,
            bin_width: 0.05,
        }
    }
}

/// Reconstruction output: estimate plus the log-likelihood trace.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub rho: DensityMatrix,
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

struct Bin {
    phi: f64,
    center: f64,
    count: f64,
}

fn bin_trace(trace: &HomodyneTrace, width: f64) -> Vec<Bin> {
    let mut bins: Vec<Bin> = Vec::new();
    for entry in &trace.entries {
        let mut counts: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
        for &x in &entry.samples {
            *counts.entry((x / width).floor() as i64) /* deterministic keying */
                .or_insert(0) += 1;
        }
        for (k, c) in counts {
            bins.push(Bin {
                phi: entry.phi,
                center: (k as f64 + 0.5) * width,
                count: c as f64,
            });
        }
    }
    bins
}

/// Projector vector u with components exp(i phi n) psi_n(x); the bin
/// projector is bin_width * |u><u|.
fn projector_vector(n: usize, phi: f64, x: f64) -> DVector<Complex64> {
    let fns = oscillator_eigenfunctions(n, x);
    DVector::from_iterator(
        n,
        fns.iter()
            .enumerate()
            .map(|(k, &f)| Complex64::new(0.0, phi * k as f64).exp() * f),
    )
}

/// Reconstruct a density matrix from a homodyne trace.
///
/// The iteration is rho <- N[R(rho) rho R(rho)] with
/// R = sum_j (f_j / p_j) Pi_j over occupied quadrature bins; the
/// log-likelihood is non-decreasing along the way. Underflowing bin
/// probabilities trigger one merge-and-restart pass before giving up.
pub fn maxlik_reconstruct(
    trace: &HomodyneTrace,
    n_trunc: usize,
    options: MaxLikOptions,
) -> Result<Reconstruction> {
    let distinct = trace.distinct_phases();
    if distinct < 12 {
        return Err(Error::InsufficientPhases {
            found: distinct,
            needed: 12,
        });
    }
    let total = trace.total_samples();
    if total < 10 * n_trunc * n_trunc {
        return Err(Error::InvalidInput(format!(
            "need at least {} samples for n_trunc = {}, got {}",
            10 * n_trunc * n_trunc,
            n_trunc,
            total
        )));
    }

    let mut bins = bin_trace(trace, options.bin_width);
    for attempt in 0..2 {
        match run_iteration(&bins, n_trunc, &options) {
            IterationOutcome::Done(rec) => {
                return if rec.converged {
                    Ok(rec)
                } else {
                    Err(Error::NonConvergence {
                        iterations: rec.iterations,
                    })
                };
            }
            IterationOutcome::Underflow(j) if attempt == 0 => {
                bins = merge_bin(bins, j, options.bin_width);
            }
            IterationOutcome::Underflow(_) => return Err(Error::IllConditioned),
        }
    }
    unreachable!()
}

enum IterationOutcome {
    Done(Reconstruction),
    Underflow(usize),
}

fn run_iteration(bins: &[Bin], n: usize, options: &MaxLikOptions) -> IterationOutcome {
    let j = bins.len();
    // columns of U are the projector vectors
    let mut u = DMatrix::zeros(n, j);
    for (col, bin) in bins.iter().enumerate() {
        u.set_column(col, &projector_vector(n, bin.phi, bin.center));
    }
    let counts: Vec<f64> = bins.iter().map(|b| b.count).collect();
    let ln_width = options.bin_width.ln();

    let mut rho = DMatrix::from_diagonal_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
    let mut log_likelihood = Vec::with_capacity(options.max_iter);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..options.max_iter {
        iterations = iter + 1;
        let y = &rho * &u; // n x j
        let mut ll = 0.0;
        let mut ratios = Vec::with_capacity(j);
        for col in 0..j {
            let q: f64 = u
                .column(col)
                .iter()
                .zip(y.column(col).iter())
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            if q < 1e-14 {
                return IterationOutcome::Underflow(col);
            }
            ll += counts[col] * (q.ln() + ln_width);
            ratios.push(counts[col] / q);
        }
        log_likelihood.push(ll);

        if iter > 0 {
            let prev = log_likelihood[iter - 1];
            if (ll - prev).abs() < options.tol * ll.abs() {
                converged = true;
                break;
            }
        }

        // R = U diag(f/q) U^H, assembled column by column
        let mut scaled = u.clone();
        for (col, &r) in ratios.iter().enumerate() {
            scaled.column_mut(col).scale_mut(r);
        }
        let r_op = &scaled * u.adjoint();
        rho = &r_op * rho * &r_op;
        // restore Hermiticity lost to roundoff and renormalize
        rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let tr: f64 = (0..n).map(|i| rho[(i, i)].re).sum();
        rho /= Complex64::new(tr, 0.0);
    }

    IterationOutcome::Done(Reconstruction {
        rho: DensityMatrix::new(rho),
        log_likelihood,
        iterations,
        converged,
    })
}

fn merge_bin(mut bins: Vec<Bin>, j: usize, width: f64) -> Vec<Bin> {
    let Bin { phi, center, count } = bins.remove(j);
    // fold the offending bin into the nearest neighbor at the same phase
    if let Some(nearest) = bins
        .iter_mut()
        .filter(|b| (b.phi - phi).abs() < 1e-12)
        .min_by(|a, b| {
            ((a.center - center).abs())
                .partial_cmp(&(b.center - center).abs())
                .unwrap()
        })
    {
        nearest.count += count;
        nearest.center = 0.5 * (nearest.center + center);
    } else {
        bins.push(Bin {
            phi,
            center: center + 0.5 * width,
            count,
        });
    }
    bins
}
