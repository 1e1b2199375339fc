//! Cross-module consistency: strong-field chain against the classical
//! oracle, conditioned-cat phenomenology, and measurement-loop invariants.

use num_complex::Complex64;
use strongcat::conditioning::{
    ati_conditioned_state, ati_mixed_state, condition_on_hhg, ir_cat, linear_entropy,
    post_hhg_product, xuv_cat, AtiOptions, ElectronTag,
};
use strongcat::phase_space::{wigner_css, CoherentAmplitude, WignerGrid};
use strongcat::sfa::{
    classical, harmonic_shifts, sfa_dipole, units, AtomSpec, Envelope, HarmonicShiftSet,
    LaserPulse, ModeCoupling, SfaOptions,
};
use strongcat::tomography::{quadrature_pdf_grid, wigner_from_rho, DensityMatrix};

fn xe_shifts(
    n_cycles: f64,
    samples: usize,
    n_modes: usize,
    options: SfaOptions,
) -> (LaserPulse, HarmonicShiftSet) {
    let pulse = LaserPulse::from_physical(8e13, 800.0, n_cycles, 0.0, Envelope::Sin2, samples);
    let atom = AtomSpec::from_ip_ev(12.13);
    let dipole = sfa_dipole(&pulse, &atom, options).unwrap();
    let shifts = harmonic_shifts(&dipole, n_modes, ModeCoupling::new(1.0), 1.0).unwrap();
    (pulse, shifts)
}

/// The 11th-harmonic-cutoff configuration used for the IR/XUV cat pair:
/// a gamma ~ 1.4 system whose plateau shifts land near 0.03 once the
/// fundamental is calibrated to 0.2.
fn h11_shifts() -> HarmonicShiftSet {
    let ip_ev = 8.0;
    let target_ev = 11.0 * units::photon_energy_ev(800.0);
    let up_needed = (target_ev - 1.32 * ip_ev) / 3.17;
    let intensity = up_needed / (9.33e-14 * 0.64);
    let pulse = LaserPulse::from_physical(intensity, 800.0, 11.0, 0.0, Envelope::Sin2, 512);
    let atom = AtomSpec::from_ip_ev(ip_ev);
    let dipole = sfa_dipole(&pulse, &atom, SfaOptions::default()).unwrap();
    let shifts = harmonic_shifts(&dipole, 17, ModeCoupling::new(1.0), 1.0).unwrap();
    // magnitude-only calibration keeps the SFA phase structure
    let target = Complex64::from_polar(0.2, shifts.chi_q(1).arg());
    shifts.calibrated_to_chi1(target).unwrap()
}

#[test]
fn classical_returns_match_plateau_extent() {
    let (pulse, shifts) = xe_shifts(6.0, 256, 25, SfaOptions::default());
    let max_return = classical::classical_return_spectrum(&pulse, 200)
        .iter()
        .map(|ev| ev.energy)
        .fold(0.0, f64::max);
    let ip = units::ev_to_au(12.13);
    let emission_order = (max_return + ip) / pulse.omega_l;
    let edge = shifts.plateau_edge().unwrap() as f64;
    assert!(
        (edge - emission_order).abs() <= 2.0,
        "plateau edge H{edge} vs classical emission H{emission_order:.1}"
    );
}

#[test]
fn long_pulse_suppresses_even_harmonics() {
    // 24-cycle sin^2, CEP 0, first-return trajectories: even-harmonic power
    // under 1e-4 of neighbors
    let options = SfaOptions {
        excursion_cycles: 1.0,
        ..Default::default()
    };
    let (_, shifts) = xe_shifts(24.0, 512, 25, options);
    let p = shifts.powers();
    for q in (6..=20).step_by(2) {
        let neighbors = p[q - 2].max(p[q]);
        assert!(
            p[q - 1] < 1e-4 * neighbors,
            "H{q} at {:.2e} of neighboring odd",
            p[q - 1] / neighbors
        );
    }
}

#[test]
fn h11_plateau_shifts_near_paper_scale() {
    let shifts = h11_shifts();
    assert_eq!(shifts.plateau_edge(), Some(11));
    for q in [5usize, 7, 9] {
        let mag = shifts.chi_q(q).norm();
        assert!(
            (0.015..=0.065).contains(&mag),
            "|chi_{q}| = {mag}, expected near 0.03"
        );
    }
}

#[test]
fn ir_and_xuv_cats_shift_oppositely_in_p() {
    let shifts = h11_shifts();
    let alpha = CoherentAmplitude::new(2.0, 0.0);
    let product = post_hhg_product(alpha, &shifts);
    let state = condition_on_hhg(&product, alpha).unwrap();
    let ir = ir_cat(&state).unwrap();
    let ir_shift = ir.mean_amplitude() - alpha.as_complex();
    let xuv = xuv_cat(&state, 9).unwrap();
    let xuv_mean = xuv.mean_amplitude();
    assert!(
        ir_shift.im * xuv_mean.im < 0.0,
        "imaginary shifts not opposite: IR {:.4}, XUV {:.4}",
        ir_shift.im,
        xuv_mean.im
    );
    // the XUV cat points along its mode shift
    let chi9 = shifts.chi_q(9);
    let alignment = (xuv_mean / xuv_mean.norm() * (chi9 / chi9.norm()).conj()).re;
    assert!(alignment > 0.9, "XUV mean misaligned with chi_9: {alignment}");
}

#[test]
fn ir_cat_kitten_versus_cat_wigner() {
    let alpha = CoherentAmplitude::new(2.0, 0.0);
    let make = |chi1: f64| {
        let mut shifts = h11_shifts();
        shifts.chi[0] = Complex64::new(-chi1, 0.0);
        let product = post_hhg_product(alpha, &shifts);
        ir_cat(&condition_on_hhg(&product, alpha).unwrap()).unwrap()
    };
    let grid_min = |cat: &strongcat::phase_space::CoherentSuperposition| {
        let mean = cat.mean_amplitude();
        let cx = std::f64::consts::SQRT_2 * mean.re;
        let cp = std::f64::consts::SQRT_2 * mean.im;
        WignerGrid::evaluate((cx - 5.0, cx + 5.0), (cp - 5.0, cp + 5.0), 101, 101, |b| {
            wigner_css(cat, b).unwrap()
        })
        .min()
    };
    // |chi_1| = 0.01: kitten, a single near-Gaussian lobe
    let kitten_min = grid_min(&make(0.01));
    assert!(kitten_min > -0.02, "kitten shows deep negativity: {kitten_min}");
    // |chi_1| = 0.5: cat-like interference with clear negativity
    let cat_min = grid_min(&make(0.5));
    assert!(cat_min < -0.05, "cat lacks interference: {cat_min}");
}

#[test]
fn separability_limit_on_shift_ladder() {
    // geometric growth of all shifts drives every bipartition separable
    let alpha = CoherentAmplitude::new(1.5, 0.0);
    let base = vec![
        Complex64::new(-0.4, 0.1),
        Complex64::new(0.25, 0.1),
        Complex64::new(0.2, -0.15),
        Complex64::new(0.15, 0.05),
    ];
    let mut last = f64::INFINITY;
    for scale in [1.0, 2.0, 4.0, 8.0] {
        let shifts = HarmonicShiftSet {
            chi: base.iter().map(|c| c * scale).collect(),
            omega_l: 0.057,
            n_ph: 1.0,
            g_eff: 1.0,
        };
        let product = post_hhg_product(alpha, &shifts);
        let state = condition_on_hhg(&product, alpha).unwrap();
        let s = linear_entropy(&state, &[0]).unwrap();
        assert!(s <= last + 1e-12, "entropy increased along the ladder");
        last = s;
    }
    assert!(last < 1e-6, "tail entropy {last}");
}

#[test]
fn ati_mixed_pair_resembles_cat() {
    // symmetric +-v mixture of the fundamental mode: non-Gaussian, with the
    // interference negativity of an optical cat
    let pulse = LaserPulse::from_physical(8e13, 800.0, 5.0, 0.0, Envelope::Sin2, 512);
    let atom = AtomSpec::from_ip_ev(12.13);
    let coupling = ModeCoupling::new(2e-3);
    let alpha = Complex64::new(0.0, 2.0);
    let up = pulse.up_au();
    let v = 0.32 * up.sqrt();
    let options = AtiOptions {
        n_modes: 5,
        ..Default::default()
    };
    let plus = ati_conditioned_state(&pulse, &atom, coupling, alpha, ElectronTag::new(v), options)
        .unwrap();
    let minus =
        ati_conditioned_state(&pulse, &atom, coupling, alpha, ElectronTag::new(-v), options)
            .unwrap();
    let rho = ati_mixed_state(&[(0.5, plus), (0.5, minus)], 60).unwrap();
    rho.check_invariants().unwrap();
    let center = (alpha.re * std::f64::consts::SQRT_2, alpha.im * std::f64::consts::SQRT_2);
    let grid = wigner_from_rho(
        &rho,
        (center.0 - 8.0, center.0 + 8.0),
        (center.1 - 8.0, center.1 + 8.0),
        61,
        61,
    );
    assert!(grid.min() < -0.02, "no interference negativity: {}", grid.min());
    assert!((grid.integral() - 1.0).abs() < 2e-2, "integral {}", grid.integral());
}

#[test]
fn wigner_marginals_match_quadrature_pdf() {
    // integrate the oracle Wigner grid along p and compare with the
    // quadrature distribution, at phase 0 and at a rotated phase
    let cat = strongcat::phase_space::CoherentSuperposition::shifted_cat(
        CoherentAmplitude::new(1.2, 0.3),
        CoherentAmplitude::new(0.8, -0.4),
    );
    let rho = DensityMatrix::from_superposition(&cat, 35).unwrap();
    for phi in [0.0, 0.7] {
        let rotated = rho.rotated(phi);
        let grid = wigner_from_rho(&rotated, (-8.0, 8.0), (-8.0, 8.0), 161, 161);
        let marginal = grid.marginal_x();
        let xs = grid.x_values();
        let pdf = quadrature_pdf_grid(&rotated, 0.0, &xs);
        let l1: f64 = marginal
            .iter()
            .zip(&pdf)
            .map(|(m, p)| (m - p).abs() * grid.dx())
            .sum();
        assert!(l1 <= 1e-3, "phi = {phi}: L1 distance {l1}");
    }
}

#[test]
fn continuous_loss_gives_single_peak_pir() {
    // IR noise far above the absorption quantum washes the comb into a
    // single hump
    use strongcat::spectrometer::*;
    let model = QsModel {
        noise_ir: 14.0,
        shots: 50_000,
        ..Default::default()
    };
    let shots = simulate_shots(&model).unwrap();
    let (_, selected) = select_diagonal(&shots, default_selection_width(&model)).unwrap();
    let hist = conditioned_pir(&model, &selected, 1.0).unwrap();
    let n = hist.probability.len();
    let smooth: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(n);
            hist.probability[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    let max = smooth.iter().cloned().fold(0.0_f64, f64::max);
    let mut peaks = 0;
    let mut last_peak: isize = -10;
    for i in 1..n - 1 {
        if smooth[i] > smooth[i - 1]
            && smooth[i] >= smooth[i + 1]
            && smooth[i] > 0.2 * max
            && i as isize > last_peak + 8
        {
            peaks += 1;
            last_peak = i as isize;
        }
    }
    assert_eq!(peaks, 1, "expected a single-peak P_IR");
}
