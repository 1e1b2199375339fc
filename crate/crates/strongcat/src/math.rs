//! Small numerical helpers: stable orthogonal-polynomial recurrences,
//! quadrature weights and basic statistics.
//!
//! Everything here uses three-term recurrences; factorial ratios are never
//! formed explicitly so the routines stay stable up to n of a few hundred.

use num_complex::Complex64;

/// Laguerre polynomial L_n(x) by upward recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0; // L_0
    let mut l = 1.0 - x; // L_1
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * l - kf * lm1) / (kf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// Associated Laguerre polynomials L_0^(a)(x) .. L_n^(a)(x).
pub fn assoc_laguerre_all(n: usize, a: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(1.0 + a - x);
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + a + 1.0 - x) * out[k] - (kf + a) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// Normalized harmonic-oscillator eigenfunctions psi_0(x) .. psi_(n-1)(x)
/// in the dimensionless quadrature convention x = (a + a^dag)/sqrt(2), so the
/// vacuum has variance 1/2.
///
/// Uses the normalized Hermite-function recurrence
/// psi_(k+1) = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_(k-1).
pub fn oscillator_eigenfunctions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n == 1 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * psi0);
    for k in 1..n - 1 {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Matrix element <m|D(gamma)|n> of the displacement operator in the Fock
/// basis, evaluated through associated Laguerre polynomials.
pub fn displacement_element(m: usize, n: usize, gamma: Complex64) -> Complex64 {
    let g2 = gamma.norm_sqr();
    let envelope = (-0.5 * g2).exp();
    if m >= n {
        let d = m - n;
        // sqrt(n!/m!) gamma^d accumulated as a product to avoid overflow
        let mut pref = Complex64::new(envelope, 0.0);
        for j in (n + 1)..=m {
            pref *= gamma / (j as f64).sqrt();
        }
        let lag = assoc_laguerre_all(n, d as f64, g2)[n];
        pref * lag
    } else {
        let d = n - m;
        let mut pref = Complex64::new(envelope, 0.0);
        for j in (m + 1)..=n {
            pref *= -gamma.conj() / (j as f64).sqrt();
        }
        let lag = assoc_laguerre_all(m, d as f64, g2)[m];
        pref * lag
    }
}

/// Uniform linspace with n >= 2 points, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + step * i as f64).collect()
}

/// Trapezoid rule on a uniform grid.
pub fn trapz(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dx * (0.5 * (values[0] + values[values.len() - 1]) + interior)
}

/// Cumulative trapezoid integral on a uniform grid; out[0] = 0.
pub fn cumtrapz(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Shannon entropy -sum p log2 p of a probability vector, ignoring zeros.
pub fn entropy_base2(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| -p * p.log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_low_orders() {
        assert_relative_eq!(laguerre(0, 0.7), 1.0);
        assert_relative_eq!(laguerre(1, 0.7), 0.3);
        // L_2(x) = 1 - 2x + x^2/2
        assert_relative_eq!(laguerre(2, 0.7), 1.0 - 1.4 + 0.245, epsilon = 1e-14);
        assert_relative_eq!(laguerre(3, 0.0), 1.0);
    }

    #[test]
    fn oscillator_functions_orthonormal() {
        // Riemann quadrature of psi_m psi_n on a wide grid
        let xs = linspace(-12.0, 12.0, 4801);
        let dx = xs[1] - xs[0];
        let vals: Vec<Vec<f64>> = xs.iter().map(|&x| oscillator_eigenfunctions(8, x)).collect();
        for m in 0..8 {
            for n in 0..8 {
                let prod: Vec<f64> = vals.iter().map(|v| v[m] * v[n]).collect();
                let overlap = trapz(&prod, dx);
                let expect = if m == n { 1.0 } else { 0.0 };
                assert!((overlap - expect).abs() < 1e-9, "({m},{n}) -> {overlap}");
            }
        }
    }

    #[test]
    fn displacement_diagonal_matches_laguerre() {
        let gamma = Complex64::new(0.8, -0.3);
        let g2 = gamma.norm_sqr();
        for n in 0..10 {
            let elem = displacement_element(n, n, gamma);
            let expect = (-0.5 * g2).exp() * laguerre(n, g2);
            assert_relative_eq!(elem.re, expect, epsilon = 1e-12);
            assert_relative_eq!(elem.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn displacement_column_is_coherent_state() {
        // D(gamma)|0> must reproduce the coherent expansion coefficients
        let gamma = Complex64::new(1.1, 0.4);
        let mut coeff = Complex64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0);
        for m in 0..20 {
            let elem = displacement_element(m, 0, gamma);
            assert!((elem - coeff).norm() < 1e-12, "m = {m}");
            coeff *= gamma / ((m + 1) as f64).sqrt();
        }
    }

    #[test]
    fn cumtrapz_linear_exact() {
        let xs = linspace(0.0, 1.0, 101);
        let vals: Vec<f64> = xs.iter().map(|&x| 3.0 * x).collect();
        let cum = cumtrapz(&vals, 0.01);
        assert_relative_eq!(cum[100], 1.5, epsilon = 1e-12);
        assert_relative_eq!(cum[50], 1.5 * 0.25, epsilon = 1e-12);
    }
}
