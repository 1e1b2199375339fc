//! Quantum-spectrometer simulation: shot-to-shot (S_IR, S_HH) photon
//! correlations with an energy-conservation anticorrelation diagonal,
//! total-least-squares diagonal selection and the conditioned P_IR histogram.

use crate::error::{Error, Result};
use crate::math::pearson;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Hidden generator label, kept for validation only; never exported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShotClass {
    Hhg,
    Background,
}

/// One laser shot: mean-normalized IR and harmonic photon signals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub s_ir: f64,
    pub s_hh: f64,
    pub truth: ShotClass,
}

/// Generative model: a correlated HHG population on the anticorrelation
/// diagonal (q_eff IR photons absorbed per emitted harmonic photon) plus an
/// uncorrelated background population. All signals are normalized so both
/// population means sit at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QsModel {
    /// IR photons absorbed per harmonic photon.
    pub q_eff: f64,
    /// Optional mixture of harmonic orders; empty means single q_eff.
    pub q_mixture: Vec<f64>,
    /// Fraction of shots carrying correlated HHG emission.
    pub hhg_fraction: f64,
    /// IR detector noise, photons rms.
    pub noise_ir: f64,
    /// Harmonic detector noise, photon-count rms.
    pub noise_hh: f64,
    /// Isotropic background spread in mean-normalized units; the background
    /// population shares both signal means with the correlated one, so the
    /// fitted diagonal stays unbiased.
    pub background_sigma: f64,
    /// Mean harmonic-photon events per correlated shot (>= 1 after the
    /// one-event floor).
    pub hh_event_mean: f64,
    /// IR photon scale of one shot before normalization.
    pub ir_photons: f64,
    pub shots: usize,
    pub seed: u64,
}

impl Default for QsModel {
    fn default() -> Self {
        Self {
            q_eff: 13.0,
            q_mixture: Vec::new(),
            hhg_fraction: 0.4,
            noise_ir: 1.5,
            noise_hh: 0.12,
            background_sigma: 0.3,
            hh_event_mean: 2.2,
            ir_photons: 220.0,
            shots: 100_000,
            seed: 7,
        }
    }
}

impl QsModel {
    fn mean_events(&self) -> f64 {
        self.hh_event_mean.max(1.0)
    }

    fn mean_q(&self) -> f64 {
        if self.q_mixture.is_empty() {
            self.q_eff
        } else {
            self.q_mixture.iter().sum::<f64>() / self.q_mixture.len() as f64
        }
    }

    /// Analytic population mean of the raw IR signal in photons; the
    /// background is centered on the same level.
    fn mean_ir_raw(&self) -> f64 {
        self.ir_photons - self.mean_q() * self.mean_events()
    }

    /// Analytic population mean of the raw harmonic signal.
    fn mean_hh_raw(&self) -> f64 {
        self.mean_events()
    }

    /// Slope magnitude |d s_ir / d s_hh| of the anticorrelation line in
    /// mean-normalized units.
    pub fn normalized_slope(&self) -> f64 {
        self.mean_q() * self.mean_hh_raw() / self.mean_ir_raw()
    }
}

fn sample_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn sample_poisson(rng: &mut impl Rng, lambda: f64) -> usize {
    // inversion by sequential search; lambda stays small here
    let l = (-lambda).exp();
    let mut k = 0usize;
    let mut p = 1.0;
    loop {
        p *= rng.gen::<f64>();
        if p <= l || k > 1000 {
            return k;
        }
        k += 1;
    }
}

/// Generate the shot cloud. Chunks of 1024 shots draw from independent
/// ChaCha substreams, so the output is deterministic for a given seed
/// regardless of scheduling.
pub fn simulate_shots(model: &QsModel) -> Result<Vec<ShotRecord>> {
    if model.shots < 1000 {
        return Err(Error::InvalidInput("need at least 1000 shots".into()));
    }
    if !(0.0..=1.0).contains(&model.hhg_fraction) {
        return Err(Error::InvalidInput("hhg_fraction must lie in [0,1]".into()));
    }
    let mean_ir = model.mean_ir_raw();
    let mean_hh = model.mean_hh_raw();
    let mut shots = Vec::with_capacity(model.shots);
    let chunks = model.shots.div_ceil(1024);
    for chunk in 0..chunks {
        let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
        rng.set_stream(chunk as u64 + 1);
        let count = 1024.min(model.shots - chunk * 1024);
        for _ in 0..count {
            let correlated = rng.gen::<f64>() < model.hhg_fraction;
            let (ir_raw, hh_raw, truth) = if correlated {
                let events = 1 + sample_poisson(&mut rng, model.mean_events() - 1.0);
                let q = if model.q_mixture.is_empty() {
                    model.q_eff
                } else {
                    model.q_mixture[rng.gen_range(0..model.q_mixture.len())]
                };
                let loss = q * events as f64;
                (
                    model.ir_photons - loss + model.noise_ir * sample_normal(&mut rng),
                    events as f64 + model.noise_hh * sample_normal(&mut rng),
                    ShotClass::Hhg,
                )
            } else {
                (
                    mean_ir * (1.0 + model.background_sigma * sample_normal(&mut rng)),
                    (mean_hh * (1.0 + model.background_sigma * sample_normal(&mut rng))).abs(),
                    ShotClass::Background,
                )
            };
            shots.push(ShotRecord {
                s_ir: (ir_raw / mean_ir).max(0.0),
                s_hh: (hh_raw / mean_hh).max(0.0),
                truth,
            });
        }
    }
    Ok(shots)
}

/// Anticorrelation diagonal fitted by total least squares: the principal
/// axis of the shot covariance through the centroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalFit {
    pub center_hh: f64,
    pub center_ir: f64,
    /// Unit direction (d_hh, d_ir) of the diagonal.
    pub dir_hh: f64,
    pub dir_ir: f64,
}

impl DiagonalFit {
    pub fn slope(&self) -> f64 {
        self.dir_ir / self.dir_hh
    }

    /// Perpendicular distance of a shot from the line.
    pub fn distance(&self, shot: &ShotRecord) -> f64 {
        let dx = shot.s_hh - self.center_hh;
        let dy = shot.s_ir - self.center_ir;
        (dx * self.dir_ir - dy * self.dir_hh).abs()
    }
}

/// Fit the diagonal on all shots, truth labels unused.
pub fn fit_diagonal(shots: &[ShotRecord]) -> DiagonalFit {
    let n = shots.len() as f64;
    let mx = shots.iter().map(|s| s.s_hh).sum::<f64>() / n;
    let my = shots.iter().map(|s| s.s_ir).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for s in shots {
        let dx = s.s_hh - mx;
        let dy = s.s_ir - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    // principal eigenvector of [[sxx, sxy], [sxy, syy]]
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let lambda = 0.5 * tr + (0.25 * tr * tr - det).max(0.0).sqrt();
    let (mut dx, mut dy) = if sxy.abs() > 1e-300 {
        (lambda - syy, sxy)
    } else if sxx >= syy {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let norm = (dx * dx + dy * dy).sqrt();
    dx /= norm;
    dy /= norm;
    DiagonalFit {
        center_hh: mx,
        center_ir: my,
        dir_hh: dx,
        dir_ir: dy,
    }
}

/// Keep the shots within perpendicular distance `width` of the fitted
/// anticorrelation diagonal.
pub fn select_diagonal(shots: &[ShotRecord], width: f64) -> Result<(DiagonalFit, Vec<ShotRecord>)> {
    if width <= 0.0 {
        return Err(Error::InvalidInput("selection width must be positive".into()));
    }
    let fit = fit_diagonal(shots);
    let selected: Vec<ShotRecord> = shots
        .iter()
        .filter(|s| fit.distance(s) <= width)
        .copied()
        .collect();
    if selected.is_empty() {
        return Err(Error::EmptySelection { width });
    }
    Ok((fit, selected))
}

/// One-sigma perpendicular spread of the correlated population around the
/// anticorrelation line; the default selection width.
pub fn default_selection_width(model: &QsModel) -> f64 {
    let mean_ir = model.mean_ir_raw();
    let mean_hh = model.mean_hh_raw();
    let slope = model.normalized_slope();
    let s_ir = model.noise_ir / mean_ir;
    let s_hh = slope * model.noise_hh / mean_hh;
    (s_ir * s_ir + s_hh * s_hh).sqrt() / (1.0 + slope * slope).sqrt()
}

/// Pearson correlation of a shot list.
pub fn shot_correlation(shots: &[ShotRecord]) -> f64 {
    let xs: Vec<f64> = shots.iter().map(|s| s.s_hh).collect();
    let ys: Vec<f64> = shots.iter().map(|s| s.s_ir).collect();
    pearson(&xs, &ys)
}

/// Fraction of selected shots that truly carry HHG emission.
pub fn selection_precision(selected: &[ShotRecord]) -> f64 {
    let hits = selected
        .iter()
        .filter(|s| s.truth == ShotClass::Hhg)
        .count();
    hits as f64 / selected.len() as f64
}

/// Conditioned P_IR: histogram of IR photon losses of the selected shots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PirHistogram {
    /// Loss in IR photons at each bin center.
    pub centers: Vec<f64>,
    pub probability: Vec<f64>,
    pub bin_width: f64,
}

/// Histogram the IR photon loss (relative to the no-loss level) of the
/// selected shots. Losses come in quanta of q_eff when absorption is
/// discrete, producing the multi-peak structure.
pub fn conditioned_pir(
    model: &QsModel,
    selected: &[ShotRecord],
    bin_width: f64,
) -> Result<PirHistogram> {
    if selected.len() < 1000 {
        return Err(Error::InvalidInput(
            "need at least 1000 selected shots".into(),
        ));
    }
    let mean_ir = model.mean_ir_raw();
    let losses: Vec<f64> = selected
        .iter()
        .map(|s| model.ir_photons - s.s_ir * mean_ir)
        .collect();
    let lo = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n_bins = (((hi - lo) / bin_width).ceil() as usize).max(1);
    let mut counts = vec![0usize; n_bins];
    for &l in &losses {
        let idx = (((l - lo) / bin_width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let total = losses.len() as f64;
    Ok(PirHistogram {
        centers: (0..n_bins)
            .map(|i| lo + (i as f64 + 0.5) * bin_width)
            .collect(),
        probability: counts.iter().map(|&c| c as f64 / total).collect(),
        bin_width,
    })
}

/// Estimate the dominant peak spacing of a histogram from the first local
/// maximum of its autocorrelation within the lag window (photons).
pub fn estimate_peak_spacing(hist: &PirHistogram, lag_window: (f64, f64)) -> Option<f64> {
    let n = hist.probability.len();
    let mean = hist.probability.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = hist.probability.iter().map(|p| p - mean).collect();
    let lag_lo = (lag_window.0 / hist.bin_width).floor() as usize;
    let lag_hi = ((lag_window.1 / hist.bin_width).ceil() as usize).min(n - 1);
    let mut best: Option<(usize, f64)> = None;
    for lag in lag_lo.max(1)..=lag_hi {
        let c: f64 = (0..n - lag).map(|i| centered[i] * centered[i + lag]).sum();
        match best {
            Some((_, v)) if v >= c => {}
            _ => best = Some((lag, c)),
        }
    }
    best.map(|(lag, _)| lag as f64 * hist.bin_width)
}
