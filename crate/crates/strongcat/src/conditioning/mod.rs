//! Multimode state synthesis and conditioning: the post-interaction product
//! state, conditioning on HHG (single- and two-color), projections onto IR
//! and XUV cat states, and the branch bookkeeping shared with the ATI layer.
//!
//! Every synthesized state is a finite superposition of multimode coherent
//! products. Relative branch phases always come from the exact displacement
//! composition rule D(a)D(b) = exp(i Im(a b*)) D(a+b).

pub mod ati;
mod entropy;

pub use ati::{
    ati_conditioned_state, ati_displacement, ati_mixed_state, fundamental_photon_distribution,
    AtiContext, AtiOptions, ElectronTag, LightMatterState, MomentumWeighting, WeightModel,
};
pub use entropy::{entropy_of_entanglement, linear_entropy, reduced_eigenvalues};

use crate::error::{Error, Result};
use crate::phase_space::{coherent_overlap, CoherentAmplitude, CoherentSuperposition};
use crate::sfa::HarmonicShiftSet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One multimode coherent product |alpha_1> ⊗ ... ⊗ |alpha_Nc> with a complex
/// coefficient and the composition phase accumulated along its history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultimodeBranch {
    pub coeff: Complex64,
    pub alphas: Vec<Complex64>,
    pub phase: f64,
}

impl MultimodeBranch {
    pub fn new(coeff: Complex64, alphas: Vec<Complex64>) -> Self {
        Self {
            coeff,
            alphas,
            phase: 0.0,
        }
    }

    /// Effective complex weight including the accumulated phase.
    pub fn weight(&self) -> Complex64 {
        self.coeff * Complex64::new(0.0, self.phase).exp()
    }

    /// Product of single-mode overlaps ⟨self|other⟩ (weights excluded).
    /// Exponents are summed across modes before a single exp call.
    pub fn product_overlap(&self, other: &Self) -> Complex64 {
        let mut exponent = Complex64::new(0.0, 0.0);
        for (&a, &b) in self.alphas.iter().zip(&other.alphas) {
            exponent += -0.5 * (a.norm_sqr() + b.norm_sqr()) + a.conj() * b;
        }
        exponent.exp()
    }
}

/// Finite superposition of multimode coherent products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntangledMultimodeState {
    pub branches: Vec<MultimodeBranch>,
    pub mode_count: usize,
}

impl EntangledMultimodeState {
    pub fn new(branches: Vec<MultimodeBranch>) -> Self {
        let mode_count = branches.first().map(|b| b.alphas.len()).unwrap_or(0);
        assert!(
            branches.iter().all(|b| b.alphas.len() == mode_count),
            "all branches must span the same modes"
        );
        Self {
            branches,
            mode_count,
        }
    }

    /// Squared norm from the multimode Gram matrix.
    pub fn norm_sqr(&self) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for bi in &self.branches {
            for bj in &self.branches {
                acc += bi.weight().conj() * bj.weight() * bi.product_overlap(bj);
            }
        }
        acc.re
    }

    /// Sum of squared branch-weight magnitudes.
    pub fn coeff_scale(&self) -> f64 {
        self.branches.iter().map(|b| b.coeff.norm_sqr()).sum()
    }

    /// Rescaled to unit norm.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 < 1e-14 * self.coeff_scale().max(1e-30) {
            return Err(Error::NullConditioning);
        }
        let scale = 1.0 / n2.sqrt();
        let mut out = self.clone();
        for b in &mut out.branches {
            b.coeff *= scale;
        }
        Ok(out)
    }

    /// Overlap ⟨self|other⟩ including branch weights.
    pub fn state_overlap(&self, other: &Self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for bi in &self.branches {
            for bj in &other.branches {
                acc += bi.weight().conj() * bj.weight() * bi.product_overlap(bj);
            }
        }
        acc
    }

    /// Project the listed modes onto coherent targets, returning the state of
    /// the remaining modes. Branch coefficients pick up the overlap factors;
    /// unnormalized output so probability bookkeeping stays available.
    pub fn project_modes(&self, projections: &[(usize, Complex64)]) -> Self {
        let projected: std::collections::BTreeMap<usize, Complex64> =
            projections.iter().copied().collect();
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let mut coeff = b.coeff;
                let mut alphas = Vec::with_capacity(self.mode_count - projected.len());
                for (q, &alpha) in b.alphas.iter().enumerate() {
                    if let Some(&target) = projected.get(&q) {
                        coeff *= coherent_overlap(target.into(), alpha.into());
                    } else {
                        alphas.push(alpha);
                    }
                }
                MultimodeBranch {
                    coeff,
                    alphas,
                    phase: b.phase,
                }
            })
            .collect();
        Self {
            branches,
            mode_count: self.mode_count - projected.len(),
        }
    }

    /// Reduce a single-mode state to a [`CoherentSuperposition`].
    pub fn to_single_mode(&self) -> Result<CoherentSuperposition> {
        if self.mode_count != 1 {
            return Err(Error::InvalidInput(format!(
                "state spans {} modes, expected 1",
                self.mode_count
            )));
        }
        Ok(CoherentSuperposition::new(
            self.branches
                .iter()
                .map(|b| (b.weight(), CoherentAmplitude::from(b.alphas[0])))
                .collect(),
        ))
    }

    /// Project all harmonic modes (q >= 2) onto vacuum and return the
    /// fundamental-mode superposition, unnormalized.
    pub fn fundamental_after_vacuum_harmonics(&self) -> CoherentSuperposition {
        CoherentSuperposition::new(
            self.branches
                .iter()
                .map(|b| {
                    let mut coeff = b.weight();
                    for &alpha in &b.alphas[1..] {
                        coeff *= (-0.5 * alpha.norm_sqr()).exp();
                    }
                    (coeff, CoherentAmplitude::from(b.alphas[0]))
                })
                .collect(),
        )
    }
}

/// Post-interaction product state of Eq.-of-motion solution: fundamental
/// displaced to alpha_L + chi_1 (the D(alpha_L) frame is undone here) and
/// harmonics in |chi_q>. A single branch, hence zero entanglement.
pub fn post_hhg_product(
    alpha_l: CoherentAmplitude,
    shifts: &HarmonicShiftSet,
) -> MultimodeBranch {
    let al = alpha_l.as_complex();
    let chi1 = shifts.chi_q(1);
    let mut alphas = Vec::with_capacity(shifts.n_modes());
    alphas.push(al + chi1);
    for q in 2..=shifts.n_modes() {
        alphas.push(shifts.chi_q(q));
    }
    MultimodeBranch {
        coeff: Complex64::new(1.0, 0.0),
        alphas,
        // undoing D(alpha_L) on D(chi_1)|0> leaves the composition phase
        phase: (al * chi1.conj()).im,
    }
}

/// Probability that no harmonic excitation is found in the product state,
/// |<initial|product>|^2 with the initial state |alpha_L> ⊗ |0...>.
pub fn vacuum_projection_probability(
    product: &MultimodeBranch,
    alpha_l: CoherentAmplitude,
) -> f64 {
    let mut ovl = coherent_overlap(alpha_l, product.alphas[0].into());
    for &alpha in &product.alphas[1..] {
        ovl *= coherent_overlap(CoherentAmplitude::new(0.0, 0.0), alpha.into());
    }
    (ovl * product.weight()).norm_sqr()
}

/// Conditioning on HHG: apply 1 - |0~><0~| to the product state, where |0~>
/// is the unexcited configuration |alpha_L> ⊗ |0...>. The result is the
/// normalized two-branch entangled state.
pub fn condition_on_hhg(
    product: &MultimodeBranch,
    alpha_l: CoherentAmplitude,
) -> Result<EntangledMultimodeState> {
    let al = alpha_l.as_complex();
    // <0~|product> = xi_1 prod_q xi_q
    let mut xi_tot = coherent_overlap(alpha_l, product.alphas[0].into());
    for &alpha in &product.alphas[1..] {
        xi_tot *= coherent_overlap(CoherentAmplitude::new(0.0, 0.0), alpha.into());
    }
    let mut vacuum_alphas = vec![Complex64::new(0.0, 0.0); product.alphas.len()];
    vacuum_alphas[0] = al;
    let conditioned = EntangledMultimodeState::new(vec![
        product.clone(),
        MultimodeBranch {
            coeff: -xi_tot * product.weight(),
            alphas: vacuum_alphas,
            phase: 0.0,
        },
    ]);
    conditioned.normalized()
}

/// IR cat: project the harmonic modes of an HHG-conditioned state onto their
/// excited coherent amplitudes, leaving |alpha_L + chi_1> - xi_1 |xi_HH|^2 |alpha_L>.
pub fn ir_cat(state: &EntangledMultimodeState) -> Result<CoherentSuperposition> {
    let excited = &state.branches[0];
    let projections: Vec<(usize, Complex64)> = (1..state.mode_count)
        .map(|q| (q, excited.alphas[q]))
        .collect();
    state
        .project_modes(&projections)
        .to_single_mode()?
        .normalized()
}

/// XUV cat for harmonic q (2-based physical index): project every other mode
/// onto its excited amplitude, leaving |chi_q> - xi_q |xi_bar(q)|^2 |0>.
pub fn xuv_cat(state: &EntangledMultimodeState, q: usize) -> Result<CoherentSuperposition> {
    if q < 2 || q > state.mode_count {
        return Err(Error::InvalidInput(format!(
            "harmonic index q = {q} outside 2..={}",
            state.mode_count
        )));
    }
    let excited = &state.branches[0];
    if excited.alphas[q - 1].norm() < 1e-8 {
        // no excitation in this mode: the projected superposition collapses
        return Err(Error::DegenerateSuperposition { norm_sq: 0.0 });
    }
    let projections: Vec<(usize, Complex64)> = (0..state.mode_count)
        .filter(|&m| m != q - 1)
        .map(|m| (m, excited.alphas[m]))
        .collect();
    state
        .project_modes(&projections)
        .to_single_mode()?
        .normalized()
}

/// Shifts entering the two-color conditioning operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoColorShifts {
    pub chi_w1: Complex64,
    pub chi_w2: Complex64,
    /// Harmonic shifts whose overlap factors |xi_q|^2 enter the conditioning
    /// coefficient after the harmonics are traced onto their coherent branch.
    pub chi_harmonics: Vec<Complex64>,
}

/// Two-color conditioning, Driver modes omega_1 and omega_2:
/// |a1 + chi_w1>|a2 + chi_w2> - xi_(w1,w2) |a1>|a2>, with the coefficient
/// taken as the product of the two driver overlaps times prod_q |xi_q|^2.
pub fn two_color_condition(
    a1: CoherentAmplitude,
    a2: CoherentAmplitude,
    shifts: &TwoColorShifts,
) -> Result<EntangledMultimodeState> {
    let z1 = a1.as_complex();
    let z2 = a2.as_complex();
    let mut xi = coherent_overlap(a1, (z1 + shifts.chi_w1).into())
        * coherent_overlap(a2, (z2 + shifts.chi_w2).into());
    for &chi_q in &shifts.chi_harmonics {
        xi *= Complex64::new((-chi_q.norm_sqr()).exp(), 0.0);
    }
    let state = EntangledMultimodeState::new(vec![
        MultimodeBranch::new(
            Complex64::new(1.0, 0.0),
            vec![z1 + shifts.chi_w1, z2 + shifts.chi_w2],
        ),
        MultimodeBranch::new(-xi, vec![z1, z2]),
    ]);
    state.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfa::HarmonicShiftSet;
    use approx::assert_relative_eq;

    fn shift_set(chis: &[Complex64]) -> HarmonicShiftSet {
        HarmonicShiftSet {
            chi: chis.to_vec(),
            omega_l: 0.057,
            n_ph: 1.0,
            g_eff: 1.0,
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_state_with_zero_shifts_is_initial() {
        let shifts = shift_set(&[c(0.0, 0.0); 5]);
        let alpha = CoherentAmplitude::new(2.0, 0.0);
        let b = post_hhg_product(alpha, &shifts);
        assert_eq!(b.alphas[0], c(2.0, 0.0));
        assert!(b.alphas[1..].iter().all(|a| a.norm() == 0.0));
        assert_eq!(b.phase, 0.0);
    }

    #[test]
    fn fundamental_shift_is_additive() {
        let mut chis = vec![c(0.0, 0.0); 5];
        chis[0] = c(-0.2, 0.0);
        let b = post_hhg_product(CoherentAmplitude::new(2.0, 0.0), &shift_set(&chis));
        assert_relative_eq!(b.alphas[0].re, 1.8);
        // single branch -> product state, no entanglement
        let state = EntangledMultimodeState::new(vec![b]);
        let s = linear_entropy(&state, &[0]).unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn conditioning_probabilities_are_complete() {
        let chis = vec![c(-0.2, 0.05), c(0.01, 0.02), c(0.03, -0.01), c(0.02, 0.0)];
        let alpha = CoherentAmplitude::new(1.5, 0.3);
        let product = post_hhg_product(alpha, &shift_set(&chis));
        let p_vacuum = vacuum_projection_probability(&product, alpha);
        // unnormalized conditioned norm^2 = 1 - p_vacuum
        let al = alpha.as_complex();
        let mut xi_tot = coherent_overlap(alpha, product.alphas[0].into());
        for &a in &product.alphas[1..] {
            xi_tot *= coherent_overlap(CoherentAmplitude::new(0.0, 0.0), a.into());
        }
        let mut vac = vec![c(0.0, 0.0); 4];
        vac[0] = al;
        let unnormalized = EntangledMultimodeState::new(vec![
            product.clone(),
            MultimodeBranch {
                coeff: -xi_tot * product.weight(),
                alphas: vac,
                phase: 0.0,
            },
        ]);
        assert_relative_eq!(unnormalized.norm_sqr() + p_vacuum, 1.0, epsilon = 1e-10);
        // norm computed from the Gram agrees with the closed formula
        assert_relative_eq!(
            unnormalized.norm_sqr(),
            1.0 - xi_tot.norm_sqr(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn null_conditioning_for_zero_shifts() {
        let shifts = shift_set(&[c(0.0, 0.0); 4]);
        let alpha = CoherentAmplitude::new(1.0, 0.0);
        let product = post_hhg_product(alpha, &shifts);
        match condition_on_hhg(&product, alpha) {
            Err(Error::NullConditioning) => {}
            other => panic!("expected NullConditioning, got {other:?}"),
        }
    }

    #[test]
    fn single_mode_conditioning_reduces_to_shifted_cat() {
        // chi_1 only: the conditioned state is the two-branch shifted cat
        let mut chis = vec![c(0.0, 0.0); 3];
        chis[0] = c(0.4, 0.1);
        let alpha = CoherentAmplitude::new(1.2, -0.3);
        let product = post_hhg_product(alpha, &shift_set(&chis));
        let state = condition_on_hhg(&product, alpha).unwrap();
        assert_eq!(state.branches.len(), 2);
        let cat = ir_cat(&state).unwrap();
        let reference = CoherentSuperposition::shifted_cat(alpha, CoherentAmplitude::from(chis[0]))
            .normalized()
            .unwrap();
        // same two amplitudes, same |coefficients| up to a global phase
        assert_relative_eq!(cat.norm_sqr(), 1.0, epsilon = 1e-12);
        for ((c1, a1), (c2, a2)) in cat.branches.iter().zip(&reference.branches) {
            assert!((a1.as_complex() - a2.as_complex()).norm() < 1e-12);
            assert_relative_eq!(c1.norm(), c2.norm(), epsilon = 1e-10);
        }
    }

    #[test]
    fn large_shifts_leave_separable_state() {
        // all xi_q -> 0: linear entropy of every bipartition under 1e-6
        let chis = vec![c(4.0, 0.0), c(3.5, 1.5), c(0.0, 4.0)];
        let alpha = CoherentAmplitude::new(2.0, 0.0);
        let product = post_hhg_product(alpha, &shift_set(&chis));
        let state = condition_on_hhg(&product, alpha).unwrap();
        for partition in [vec![0], vec![1], vec![2], vec![0, 1]] {
            let s = linear_entropy(&state, &partition).unwrap();
            assert!(s < 1e-6, "partition {partition:?} entropy {s}");
        }
    }

    #[test]
    fn ir_cat_limits() {
        // tiny chi_1 -> kitten-like: branch weights comparable; huge chi_1 ->
        // second branch dies
        let alpha = CoherentAmplitude::new(2.0, 0.0);
        let make = |chi1: f64| {
            let mut chis = vec![c(0.0, 0.0); 4];
            chis[0] = c(chi1, 0.0);
            chis[1] = c(0.02, 0.0);
            chis[2] = c(0.015, 0.0);
            chis[3] = c(0.01, 0.0);
            let product = post_hhg_product(alpha, &shift_set(&chis));
            ir_cat(&condition_on_hhg(&product, alpha).unwrap()).unwrap()
        };
        let large = make(6.0);
        // dominant branch is the displaced coherent state
        let weight_ratio = large.branches[1].0.norm() / large.branches[0].0.norm();
        assert!(weight_ratio < 1e-6, "ratio {weight_ratio}");
        let kitten = make(0.01);
        let mean = kitten.mean_amplitude();
        assert!((mean - alpha.as_complex()).norm() < 0.2);
    }

    #[test]
    fn xuv_cat_structure() {
        let chis = vec![c(-0.2, 0.0), c(0.03, 0.01), c(0.025, -0.02)];
        let alpha = CoherentAmplitude::new(2.0, 0.0);
        let product = post_hhg_product(alpha, &shift_set(&chis));
        let state = condition_on_hhg(&product, alpha).unwrap();
        let cat = xuv_cat(&state, 2).unwrap();
        // branches are |chi_2> and |0> with the Eq.-level coefficient
        let amp_excited = cat.branches[0].1.as_complex();
        assert!((amp_excited - chis[1]).norm() < 1e-12);
        let xi_q = (-0.5 * chis[1].norm_sqr()).exp();
        let xi1 = coherent_overlap(alpha, (alpha.as_complex() + chis[0]).into());
        let xi3 = (-0.5 * chis[2].norm_sqr()).exp();
        let expect_ratio = xi_q * (xi1.norm() * xi3).powi(2);
        let got_ratio = cat.branches[1].0.norm() / cat.branches[0].0.norm();
        assert_relative_eq!(got_ratio, expect_ratio, epsilon = 1e-10);
        // zero harmonic shift cannot be conditioned
        let mut zero2 = chis.clone();
        zero2[1] = c(0.0, 0.0);
        let product = post_hhg_product(alpha, &shift_set(&zero2));
        let state = condition_on_hhg(&product, alpha).unwrap();
        assert!(xuv_cat(&state, 2).is_err());
        // large chi_q -> nearly pure |chi_q>
        let mut big = chis;
        big[1] = c(6.0, 0.0);
        let product = post_hhg_product(alpha, &shift_set(&big));
        let state = condition_on_hhg(&product, alpha).unwrap();
        let cat = xuv_cat(&state, 2).unwrap();
        assert!(cat.branches[1].0.norm() / cat.branches[0].0.norm() < 1e-6);
    }

    #[test]
    fn two_color_cases() {
        let a1 = CoherentAmplitude::new(1.5, 0.0);
        let a2 = CoherentAmplitude::new(1.0, 0.5);
        // symmetric shifts entangle the two driver modes
        let sym = TwoColorShifts {
            chi_w1: c(0.4, 0.0),
            chi_w2: c(0.4, 0.0),
            chi_harmonics: vec![c(0.05, 0.0)],
        };
        let state = two_color_condition(a1, a2, &sym).unwrap();
        let s = linear_entropy(&state, &[0]).unwrap();
        assert!(s > 0.0, "expected driver-driver entanglement, got {s}");
        // both shifts large -> separable
        let big = TwoColorShifts {
            chi_w1: c(5.0, 0.0),
            chi_w2: c(5.0, 0.0),
            chi_harmonics: vec![],
        };
        let state = two_color_condition(a1, a2, &big).unwrap();
        assert!(linear_entropy(&state, &[0]).unwrap() < 1e-6);
        // chi_w2 = 0 reduces to the single-color structure on mode 1
        let single = TwoColorShifts {
            chi_w1: c(0.4, 0.0),
            chi_w2: c(0.0, 0.0),
            chi_harmonics: vec![],
        };
        let state = two_color_condition(a1, a2, &single).unwrap();
        // mode 2 amplitudes coincide across branches -> spectator
        assert!((state.branches[0].alphas[1] - state.branches[1].alphas[1]).norm() < 1e-12);
    }

    #[test]
    fn normalization_is_idempotent() {
        let chis = vec![c(0.3, 0.1), c(0.05, 0.0)];
        let alpha = CoherentAmplitude::new(1.0, 0.2);
        let product = post_hhg_product(alpha, &shift_set(&chis));
        let state = condition_on_hhg(&product, alpha).unwrap();
        assert_relative_eq!(state.norm_sqr(), 1.0, epsilon = 1e-12);
        let again = state.normalized().unwrap();
        assert_relative_eq!(again.norm_sqr(), 1.0, epsilon = 1e-12);
    }
}
