//! strongcat: simulate conditioned quantum-optical states of strongly driven
//! atoms and close the loop with homodyne tomography and photon-correlation
//! shot selection.

mod state_desc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use state_desc::StateDesc;
use std::path::{Path, PathBuf};
use std::time::Instant;
use strongcat::conditioning::{
    ati_mixed_state, condition_on_hhg, entropy_of_entanglement, fundamental_photon_distribution,
    ir_cat, linear_entropy, post_hhg_product, two_color_condition, xuv_cat, AtiContext,
    AtiOptions, ElectronTag, EntangledMultimodeState, LightMatterState, MultimodeBranch,
    TwoColorShifts, WeightModel,
};
use strongcat::config::{pulse_hash, RunConfig};
use strongcat::io;
use strongcat::phase_space::{
    wigner_coherent, wigner_css, wigner_fock, wigner_squeezed, CoherentAmplitude,
    CoherentSuperposition, WignerGrid,
};
use strongcat::sfa::{
    classical, harmonic_shifts, sfa_dipole, units, HarmonicShiftSet, LaserPulse, SfaOptions,
};
use strongcat::spectrometer as qs;
use strongcat::tomography::{
    fidelity, inverse_radon, maxlik_reconstruct, sample_homodyne, wigner_from_rho, DensityMatrix,
    MaxLikOptions,
};

#[derive(Parser)]
#[command(
    name = "strongcat",
    version,
    about = "Quantum-optical simulator for intense laser-atom interaction"
)]
struct Cli {
    /// TOML run configuration; flags override individual fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads (falls back to STRONGCAT_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a Wigner function and a simulated homodyne trace.
    Wigner(WignerArgs),
    /// Run the strong-field chain: dipole, harmonic shifts, diagnostics.
    Hhg(HhgArgs),
    /// Synthesize conditioned states (IR/XUV cats, two-color, ATI).
    Condition(ConditionArgs),
    /// Reconstruct a density matrix from a homodyne trace.
    Tomo(TomoArgs),
    /// Quantum-spectrometer shot simulation and diagonal selection.
    Qs(QsArgs),
    /// Parameter sweeps (entropy curves).
    Sweep(SweepArgs),
}

#[derive(Args)]
struct WignerArgs {
    /// State descriptor: coherent:RE[,IM] | fock:N | squeezed:RE,IM,K |
    /// cat:RE,IM,CHI[,CHI_IM]
    #[arg(long, conflicts_with = "file")]
    state: Option<String>,
    /// Load a branch-state JSON instead (harmonics projected onto vacuum).
    #[arg(long)]
    file: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
    /// Homodyne shots per phase for the emitted trace.
    #[arg(long, default_value_t = 2000)]
    trace_shots: usize,
    /// Number of homodyne phases over [0, pi).
    #[arg(long, default_value_t = 12)]
    trace_phases: usize,
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    #[arg(long)]
    xmin: Option<f64>,
    #[arg(long)]
    xmax: Option<f64>,
    #[arg(long)]
    pmin: Option<f64>,
    #[arg(long)]
    pmax: Option<f64>,
    #[arg(long, default_value_t = 121)]
    nx: usize,
    #[arg(long, default_value_t = 121)]
    np: usize,
}

impl GridArgs {
    fn ranges(&self, center: (f64, f64)) -> ((f64, f64), (f64, f64)) {
        let x = (
            self.xmin.unwrap_or(center.0 - 6.0),
            self.xmax.unwrap_or(center.0 + 6.0),
        );
        let p = (
            self.pmin.unwrap_or(center.1 - 6.0),
            self.pmax.unwrap_or(center.1 + 6.0),
        );
        (x, p)
    }
}

#[derive(Args)]
struct HhgArgs {
    /// Peak intensity in W/cm^2.
    #[arg(long)]
    intensity: Option<f64>,
    /// Carrier wavelength in nm.
    #[arg(long)]
    wavelength_nm: Option<f64>,
    /// Pulse length in optical cycles.
    #[arg(long)]
    n_cycles: Option<f64>,
    /// Carrier-envelope phase in radians.
    #[arg(long)]
    cep: Option<f64>,
    /// Ionization potential in eV.
    #[arg(long)]
    ip_ev: Option<f64>,
    /// Number of harmonic modes.
    #[arg(long)]
    n_modes: Option<usize>,
    /// Phase-matched emitter count.
    #[arg(long)]
    n_ph: Option<f64>,
}

#[derive(Args)]
struct ConditionArgs {
    /// ir-cat | xuv-cat | two-color | ati-momentum | ati-mixed
    #[arg(long)]
    mode: String,
    /// Harmonic order for xuv-cat.
    #[arg(long)]
    q: Option<usize>,
    /// Calibrate the fundamental shift to this complex value (RE[,IM]).
    #[arg(long, allow_hyphen_values = true)]
    chi1: Option<String>,
    /// Second-color shift for two-color mode (RE[,IM]).
    #[arg(long, allow_hyphen_values = true)]
    chi2: Option<String>,
    /// Driving-mode coherent amplitude magnitude.
    #[arg(long, default_value_t = 2.0)]
    alpha_mag: f64,
    /// Electron momentum in units of sqrt(U_p) (ATI modes).
    #[arg(long, default_value_t = 0.32, allow_negative_numbers = true)]
    momentum: f64,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct TomoArgs {
    /// Homodyne trace CSV (phi, x).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    n_trunc: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Known truth descriptor for a fidelity report.
    #[arg(long)]
    truth: Option<String>,
    /// Also reconstruct the Wigner function by filtered back-projection.
    #[arg(long)]
    radon: bool,
    /// Radon frequency cutoff.
    #[arg(long)]
    kc: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct QsArgs {
    #[arg(long)]
    shots: Option<usize>,
    /// Selection half-width in units of the correlated 1-sigma spread.
    #[arg(long, default_value_t = 1.0)]
    width_sigmas: f64,
    /// P_IR histogram bin width in photons.
    #[arg(long, default_value_t = 1.0)]
    pir_bin: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// chi1-entropy | ati-entropy
    #[arg(long)]
    kind: String,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            // usage/config problems exit 2, numerical failures exit 1
            let code = if err.downcast_ref::<UsageError>().is_some() {
                2
            } else {
                1
            };
            std::process::exit(code);
        }
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let nums: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("bad complex `{text}`"))))
        .collect::<Result<_>>()?;
    match nums.as_slice() {
        [re] => Ok(Complex64::new(*re, 0.0)),
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(usage(format!("bad complex `{text}`"))),
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            RunConfig::from_toml(&text).map_err(|e| usage(e.to_string()))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(threads) = cli.threads {
        config.threads = Some(threads);
    }
    let threads = config
        .threads
        .or_else(|| {
            std::env::var("STRONGCAT_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }

    std::fs::create_dir_all(&cli.out)?;
    let started = Instant::now();
    let command_name = match &cli.command {
        Command::Wigner(_) => "wigner",
        Command::Hhg(_) => "hhg",
        Command::Condition(_) => "condition",
        Command::Tomo(_) => "tomo",
        Command::Qs(_) => "qs",
        Command::Sweep(_) => "sweep",
    };

    match &cli.command {
        Command::Wigner(args) => cmd_wigner(&config, args, &cli.out)?,
        Command::Hhg(args) => cmd_hhg(&mut config, args, &cli.out)?,
        Command::Condition(args) => cmd_condition(&config, args, &cli.out)?,
        Command::Tomo(args) => cmd_tomo(&config, args, &cli.out)?,
        Command::Qs(args) => cmd_qs(&mut config, args, &cli.out)?,
        Command::Sweep(args) => cmd_sweep(&config, args, &cli.out)?,
    }

    // echo the effective config and the run manifest
    std::fs::write(cli.out.join("config.toml"), config.to_toml())?;
    let manifest = serde_json::json!({
        "command": command_name,
        "config_sha256": config.hash(),
        "seed": config.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_clock_ms": started.elapsed().as_millis() as u64,
    });
    std::fs::write(
        cli.out.join("run.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

fn cmd_wigner(config: &RunConfig, args: &WignerArgs, out: &Path) -> Result<()> {
    let (grid, rho, label): (WignerGrid, DensityMatrix, String) = if let Some(path) = &args.file {
        let state = io::read_state_json(path)?;
        let reduced = state
            .fundamental_after_vacuum_harmonics()
            .normalized()
            .context("state file reduces to a degenerate superposition")?;
        let mean = reduced.mean_amplitude();
        let center = (
            std::f64::consts::SQRT_2 * mean.re,
            std::f64::consts::SQRT_2 * mean.im,
        );
        let (xr, pr) = args.grid.ranges(center);
        let grid = WignerGrid::evaluate(xr, pr, args.grid.nx, args.grid.np, |beta| {
            wigner_css(&reduced, beta).unwrap_or(0.0)
        });
        let n_trunc = reduced
            .branches
            .iter()
            .map(|(_, a)| strongcat::phase_space::required_truncation(*a))
            .max()
            .unwrap_or(20);
        let rho = DensityMatrix::from_superposition(&reduced, n_trunc)?;
        (grid, rho, format!("state-file {}", path.display()))
    } else {
        let desc = StateDesc::parse(
            args.state
                .as_deref()
                .ok_or_else(|| usage("wigner needs --state or --file"))?,
        )
        .map_err(|e| usage(e.to_string()))?;
        let center = match &desc {
            StateDesc::Coherent(a) => (a.x0(), a.p0()),
            StateDesc::Fock(_) => (0.0, 0.0),
            StateDesc::Squeezed(p) => (p.alpha.x0(), p.alpha.p0()),
            StateDesc::Cat { alpha, chi } => (
                alpha.x0() + 0.5 * chi.x0(),
                alpha.p0() + 0.5 * chi.p0(),
            ),
        };
        let (xr, pr) = args.grid.ranges(center);
        let grid = match &desc {
            StateDesc::Coherent(a) => {
                let a = *a;
                WignerGrid::evaluate(xr, pr, args.grid.nx, args.grid.np, move |b| {
                    wigner_coherent(a, b)
                })
            }
            StateDesc::Fock(n) => {
                let n = *n;
                WignerGrid::evaluate(xr, pr, args.grid.nx, args.grid.np, move |b| {
                    wigner_fock(n, b)
                })
            }
            StateDesc::Squeezed(p) => {
                let p = *p;
                WignerGrid::evaluate(xr, pr, args.grid.nx, args.grid.np, move |b| {
                    wigner_squeezed(p, b)
                })
            }
            StateDesc::Cat { alpha, chi } => {
                let cat = CoherentSuperposition::shifted_cat(*alpha, *chi);
                WignerGrid::evaluate(xr, pr, args.grid.nx, args.grid.np, move |b| {
                    wigner_css(&cat, b).unwrap_or(0.0)
                })
            }
        };
        let rho = desc.density_matrix(desc.default_truncation())?;
        (grid, rho, desc.label())
    };

    io::write_wigner_csv(&grid, &out.join("wigner.csv"))?;
    io::write_wigner_json(&grid, &label, &out.join("wigner.json"))?;

    let phases: Vec<f64> = (0..args.trace_phases)
        .map(|k| std::f64::consts::PI * k as f64 / args.trace_phases as f64)
        .collect();
    let trace = sample_homodyne(
        &rho,
        &phases,
        args.trace_shots,
        config.seed,
        config.tomography.eta,
    )?;
    io::write_trace_csv(&trace, &out.join("trace.csv"))?;
    io::write_trace_sidecar(
        &io::TraceMeta {
            seed: config.seed,
            shots_per_phase: args.trace_shots,
            phases,
            state: label,
            eta: config.tomography.eta,
            convention: io::CONVENTION_TAG.to_string(),
        },
        &out.join("trace.json"),
    )?;
    Ok(())
}

fn apply_hhg_overrides(config: &mut RunConfig, args: &HhgArgs) {
    if let Some(v) = args.intensity {
        config.pulse.intensity_w_cm2 = v;
    }
    if let Some(v) = args.wavelength_nm {
        config.pulse.wavelength_nm = v;
    }
    if let Some(v) = args.n_cycles {
        config.pulse.n_cycles = v;
    }
    if let Some(v) = args.cep {
        config.pulse.cep = v;
    }
    if let Some(v) = args.ip_ev {
        config.atom.ip_ev = v;
    }
    if let Some(v) = args.n_modes {
        config.shifts.n_modes = v;
    }
    if let Some(v) = args.n_ph {
        config.shifts.n_ph = v;
    }
}

fn run_hhg_chain(config: &RunConfig) -> Result<(LaserPulse, HarmonicShiftSet)> {
    let pulse = config.pulse.build().map_err(|e| usage(e.to_string()))?;
    let atom = config.atom.build().map_err(|e| usage(e.to_string()))?;
    let dipole = sfa_dipole(&pulse, &atom, SfaOptions::default())?;
    let mut shifts = harmonic_shifts(
        &dipole,
        config.shifts.n_modes,
        config.shifts.coupling(),
        config.shifts.n_ph,
    )?;
    if let Some(target) = config.shifts.chi1_target() {
        shifts = shifts.calibrated_to_chi1(target)?;
    }
    Ok((pulse, shifts))
}

fn cmd_hhg(config: &mut RunConfig, args: &HhgArgs, out: &Path) -> Result<()> {
    apply_hhg_overrides(config, args);
    let pulse = config.pulse.build().map_err(|e| usage(e.to_string()))?;
    let atom = config.atom.build().map_err(|e| usage(e.to_string()))?;
    let dipole = sfa_dipole(&pulse, &atom, SfaOptions::default())?;
    let mut shifts = harmonic_shifts(
        &dipole,
        config.shifts.n_modes,
        config.shifts.coupling(),
        config.shifts.n_ph,
    )?;
    if let Some(target) = config.shifts.chi1_target() {
        shifts = shifts.calibrated_to_chi1(target)?;
    }
    io::write_dipole_csv(&dipole, &out.join("dipole.csv"))?;
    io::write_spectrum_csv(&shifts, &out.join("spectrum.csv"))?;

    let up_ev = units::ponderomotive_energy(
        config.pulse.intensity_w_cm2,
        config.pulse.wavelength_nm / 1000.0,
    );
    let photon_ev = units::photon_energy_ev(config.pulse.wavelength_nm);
    let mut diagnostics = serde_json::json!({
        "up_ev": up_ev,
        "photon_ev": photon_ev,
        "duration_fs": config.pulse.duration_fs(),
        "pulse_hash": pulse_hash(&pulse),
    });
    if up_ev > 0.0 {
        let gamma = units::keldysh_gamma(config.atom.ip_ev, up_ev)?;
        let cutoff_ev = units::cutoff_energy(up_ev, config.atom.ip_ev);
        diagnostics["gamma"] = gamma.into();
        diagnostics["cutoff_ev"] = cutoff_ev.into();
        diagnostics["cutoff_order"] = (cutoff_ev / photon_ev).into();
        diagnostics["plateau_edge"] = shifts.plateau_edge().into();
        // classical three-step oracle on a long flat pulse
        let flat = LaserPulse::new(
            pulse.f0,
            pulse.omega_l,
            10.0,
            0.0,
            strongcat::sfa::Envelope::Flat,
            1024,
        );
        diagnostics["classical_max_return_up"] =
            classical::max_return_energy_ratio(&flat, 400).into();
    } else {
        diagnostics["note"] = "zero field: no harmonic emission".into();
    }
    std::fs::write(
        out.join("diagnostics.json"),
        serde_json::to_string_pretty(&diagnostics)?,
    )?;
    Ok(())
}

/// Carrier-locked coherent amplitude of the driving mode: alpha_L such that
/// a CEP-0 cosine pulse corresponds to alpha on the +i axis; a pi CEP shift
/// flips it.
fn locked_alpha(magnitude: f64, cep: f64) -> Complex64 {
    Complex64::new(0.0, magnitude) * Complex64::new(0.0, -cep).exp()
}

fn cmd_condition(config: &RunConfig, args: &ConditionArgs, out: &Path) -> Result<()> {
    let mode_freqs = |pulse: &LaserPulse, n: usize| -> Vec<f64> {
        (1..=n).map(|q| pulse.omega_l * q as f64).collect()
    };
    match args.mode.as_str() {
        "ir-cat" | "xuv-cat" => {
            let mut cfg = config.clone();
            if let Some(chi1) = &args.chi1 {
                cfg.shifts.calibrate_chi1 = Some({
                    let z = parse_complex(chi1)?;
                    [z.re, z.im]
                });
            }
            let (pulse, shifts) = run_hhg_chain(&cfg)?;
            let alpha = CoherentAmplitude::new(args.alpha_mag, 0.0);
            let product = post_hhg_product(alpha, &shifts);
            let state = condition_on_hhg(&product, alpha)?;
            let cat = if args.mode == "ir-cat" {
                ir_cat(&state)?
            } else {
                let q = args.q.ok_or_else(|| usage("xuv-cat needs --q"))?;
                xuv_cat(&state, q)?
            };
            let s_lin = linear_entropy(&state, &[0])?;
            write_cat_outputs(&cat, args.grid, &args.mode, out)?;
            io::write_state_json(
                &state,
                &mode_freqs(&pulse, shifts.n_modes()),
                io::StateProvenance {
                    pulse_hash: pulse_hash(&pulse),
                    chain: vec!["sfa-dipole".into(), "harmonic-shifts".into(), "condition-on-hhg".into()],
                },
                &out.join("state.json"),
            )?;
            let report = serde_json::json!({
                "mode": args.mode,
                "s_lin_fundamental": s_lin,
                "cat_norm_check": cat.norm_sqr(),
                "mean_re": cat.mean_amplitude().re,
                "mean_im": cat.mean_amplitude().im,
            });
            std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        }
        "two-color" => {
            let chi1 = parse_complex(
                args.chi1
                    .as_deref()
                    .ok_or_else(|| usage("two-color needs --chi1"))?,
            )?;
            let chi2 = parse_complex(
                args.chi2
                    .as_deref()
                    .ok_or_else(|| usage("two-color needs --chi2"))?,
            )?;
            let (pulse, shifts) = run_hhg_chain(config)?;
            let harmonics: Vec<Complex64> = (2..=shifts.n_modes()).map(|q| shifts.chi_q(q)).collect();
            let a1 = CoherentAmplitude::new(args.alpha_mag, 0.0);
            let a2 = CoherentAmplitude::new(args.alpha_mag, 0.0);
            let state = two_color_condition(
                a1,
                a2,
                &TwoColorShifts {
                    chi_w1: chi1,
                    chi_w2: chi2,
                    chi_harmonics: harmonics,
                },
            )?;
            let s_lin = linear_entropy(&state, &[0])?;
            io::write_state_json(
                &state,
                &[pulse.omega_l, 2.0 * pulse.omega_l],
                io::StateProvenance {
                    pulse_hash: pulse_hash(&pulse),
                    chain: vec!["two-color-condition".into()],
                },
                &out.join("state.json"),
            )?;
            let report = serde_json::json!({ "mode": "two-color", "s_lin_driver1": s_lin });
            std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
        }
        "ati-momentum" | "ati-mixed" => {
            let pulse = config.pulse.build().map_err(|e| usage(e.to_string()))?;
            let atom = config.atom.build().map_err(|e| usage(e.to_string()))?;
            let alpha = locked_alpha(args.alpha_mag, config.pulse.cep);
            let options = AtiOptions {
                n_modes: config.shifts.n_modes.min(9),
                n_ph: config.shifts.n_ph,
                ..Default::default()
            };
            let ctx = AtiContext::new(&pulse, &atom, config.shifts.coupling(), alpha, options)?;
            let v = args.momentum * pulse.up_au().sqrt();
            let plus = ctx.conditioned_state(ElectronTag::new(v))?;
            if args.mode == "ati-momentum" {
                let pn = fundamental_photon_distribution(&plus)?;
                let mean: f64 = pn.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
                io::write_sweep_csv(
                    ("n", "probability"),
                    &pn.iter().enumerate().map(|(n, &p)| (n as f64, p)).collect::<Vec<_>>(),
                    &out.join("pn.csv"),
                )?;
                io::write_state_json(
                    &plus,
                    &(1..=options.n_modes).map(|q| pulse.omega_l * q as f64).collect::<Vec<_>>(),
                    io::StateProvenance {
                        pulse_hash: pulse_hash(&pulse),
                        chain: vec!["ati-conditioned".into()],
                    },
                    &out.join("state.json"),
                )?;
                let report = serde_json::json!({
                    "mode": "ati-momentum",
                    "momentum_sqrt_up": args.momentum,
                    "mean_photon": mean,
                    "alpha_sq": args.alpha_mag * args.alpha_mag,
                });
                std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
            } else {
                let minus = ctx.conditioned_state(ElectronTag::new(-v))?;
                let n_trunc = 60.min(
                    strongcat::phase_space::required_truncation(CoherentAmplitude::new(
                        args.alpha_mag + 2.0,
                        0.0,
                    )),
                );
                let rho = ati_mixed_state(&[(0.5, plus), (0.5, minus)], n_trunc)?;
                io::write_density_matrix_json(&rho, &out.join("rho.json"))?;
                let center = (
                    std::f64::consts::SQRT_2 * alpha.re,
                    std::f64::consts::SQRT_2 * alpha.im,
                );
                let (xr, pr) = args.grid.ranges(center);
                let grid = wigner_from_rho(&rho, xr, pr, args.grid.nx, args.grid.np);
                io::write_wigner_csv(&grid, &out.join("wigner.csv"))?;
                io::write_wigner_json(&grid, "ati-mixed fundamental", &out.join("wigner.json"))?;
                let report = serde_json::json!({
                    "mode": "ati-mixed",
                    "purity": rho.purity(),
                    "mean_photon": rho.mean_photon(),
                    "wigner_min": grid.min(),
                });
                std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
            }
        }
        other => return Err(usage(format!("unknown condition mode `{other}`"))),
    }
    Ok(())
}

fn write_cat_outputs(
    cat: &CoherentSuperposition,
    grid_args: GridArgs,
    label: &str,
    out: &Path,
) -> Result<()> {
    let mean = cat.mean_amplitude();
    let center = (
        std::f64::consts::SQRT_2 * mean.re,
        std::f64::consts::SQRT_2 * mean.im,
    );
    let (xr, pr) = grid_args.ranges(center);
    let grid = WignerGrid::evaluate(xr, pr, grid_args.nx, grid_args.np, |b| {
        wigner_css(cat, b).unwrap_or(0.0)
    });
    io::write_wigner_csv(&grid, &out.join("wigner.csv"))?;
    io::write_wigner_json(&grid, label, &out.join("wigner.json"))?;
    // the cat itself as a single-mode branch state
    let state = EntangledMultimodeState::new(
        cat.branches
            .iter()
            .map(|&(c, a)| MultimodeBranch::new(c, vec![a.as_complex()]))
            .collect(),
    );
    io::write_state_json(
        &state,
        &[1.0],
        io::StateProvenance {
            pulse_hash: String::new(),
            chain: vec![label.to_string()],
        },
        &out.join("cat.json"),
    )?;
    Ok(())
}

fn cmd_tomo(config: &RunConfig, args: &TomoArgs, out: &Path) -> Result<()> {
    let trace = io::read_trace_csv(&args.input)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let n_trunc = args.n_trunc.unwrap_or(config.tomography.n_trunc);
    let options = MaxLikOptions {
        max_iter: args.max_iter.unwrap_or(config.tomography.max_iter),
        tol: args.tol.unwrap_or(config.tomography.tol),
        bin_width: config.tomography.bin_width,
    };
    let rec = maxlik_reconstruct(&trace, n_trunc, options)?;
    io::write_density_matrix_json(&rec.rho, &out.join("rho.json"))?;

    let mut report = serde_json::json!({
        "iterations": rec.iterations,
        "converged": rec.converged,
        "final_log_likelihood": rec.log_likelihood.last(),
        "mean_photon": rec.rho.mean_photon(),
        "n_trunc": n_trunc,
        "samples": trace.total_samples(),
    });
    if let Some(truth_desc) = &args.truth {
        let desc = StateDesc::parse(truth_desc).map_err(|e| usage(e.to_string()))?;
        let truth = desc.density_matrix(n_trunc)?;
        report["fidelity"] = fidelity(&rec.rho, &truth)?.into();
        report["truth"] = desc.label().into();
    }
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;

    if args.radon {
        let kc = args.kc.unwrap_or(config.tomography.k_cutoff);
        // center the default grid on the mean quadratures of the estimate
        let mean_x: f64 = {
            let pn = &rec.rho;
            let xs = strongcat::math::linspace(-8.0, 8.0, 801);
            let pdf = strongcat::tomography::quadrature_pdf_grid(pn, 0.0, &xs);
            xs.iter().zip(&pdf).map(|(&x, &p)| x * p * 0.02).sum()
        };
        let (xr, pr) = args.grid.ranges((mean_x, 0.0));
        let grid = inverse_radon(&trace, xr, pr, args.grid.nx, args.grid.np, kc)?;
        io::write_wigner_csv(&grid, &out.join("radon.csv"))?;
        io::write_wigner_json(&grid, "inverse-radon", &out.join("radon.json"))?;
    }
    Ok(())
}

fn cmd_qs(config: &mut RunConfig, args: &QsArgs, out: &Path) -> Result<()> {
    if let Some(shots) = args.shots {
        config.qs.shots = shots;
    }
    config.qs.seed = config.seed;
    let model = config.qs.clone();
    let shots = qs::simulate_shots(&model)?;
    let width = args.width_sigmas * qs::default_selection_width(&model);
    let (fit, selected) = qs::select_diagonal(&shots, width)?;
    let selected_flags: Vec<bool> = shots.iter().map(|s| fit.distance(s) <= width).collect();
    io::write_shots_csv(&shots, &selected_flags, &out.join("shots.csv"))?;
    let hist = qs::conditioned_pir(&model, &selected, args.pir_bin)?;
    io::write_pir_csv(&hist, &out.join("pir.csv"))?;
    let report = serde_json::json!({
        "shots": shots.len(),
        "selected": selected.len(),
        "width": width,
        "slope": fit.slope(),
        "pearson_selected": qs::shot_correlation(&selected),
        "precision": qs::selection_precision(&selected),
        "pir_peak_spacing": qs::estimate_peak_spacing(&hist, (5.0, 25.0)),
    });
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn cmd_sweep(config: &RunConfig, args: &SweepArgs, out: &Path) -> Result<()> {
    match args.kind.as_str() {
        "chi1-entropy" => {
            let (_, mut shifts) = run_hhg_chain(config)?;
            if config.shifts.chi1_target().is_none() {
                // give the harmonic ladder a physical scale before sweeping
                shifts = shifts.calibrated_to_chi1(Complex64::new(-0.2, 0.0))?;
            }
            let alpha = CoherentAmplitude::new(2.0, 0.0);
            let mut rows = Vec::new();
            for k in 0..=60 {
                let chi1 = 0.002 * (k as f64).powi(2) / 3.6;
                let mut set = shifts.clone();
                set.chi[0] = Complex64::new(-chi1, 0.0);
                let product = post_hhg_product(alpha, &set);
                let s = match condition_on_hhg(&product, alpha) {
                    Ok(state) => linear_entropy(&state, &[0])?,
                    Err(_) => 0.0,
                };
                rows.push((chi1, s));
            }
            io::write_sweep_csv(("chi1", "s_lin"), &rows, &out.join("chi1_entropy.csv"))?;
        }
        "ati-entropy" => {
            let atom = config.atom.build().map_err(|e| usage(e.to_string()))?;
            let f0 = units::field_amplitude_au(config.pulse.intensity_w_cm2);
            let mut rows: Vec<(f64, f64, f64)> = Vec::new();
            for omega in [0.009, 0.010, 0.011] {
                let pulse = LaserPulse::new(
                    f0,
                    omega,
                    5.0,
                    0.0,
                    strongcat::sfa::Envelope::Sin2,
                    config.pulse.samples_per_cycle,
                );
                let up = pulse.up_au();
                let ctx = AtiContext::new(
                    &pulse,
                    &atom,
                    config.shifts.coupling(),
                    locked_alpha(7.0, 0.0),
                    AtiOptions {
                        n_modes: 3,
                        include_chi_history: false,
                        weight_model: WeightModel::SaddlePoint,
                        ..Default::default()
                    },
                )?;
                for k in 0..=14 {
                    let e_up = 1.0 + 0.5 * k as f64;
                    let v = (2.0 * e_up * up).sqrt();
                    let plus = ctx.conditioned_state(ElectronTag::new(v))?;
                    let minus = ctx.conditioned_state(ElectronTag::new(-v))?;
                    let lm = LightMatterState {
                        components: vec![
                            (ElectronTag::new(v), scale_branches(&plus, 0.5_f64.sqrt())),
                            (ElectronTag::new(-v), scale_branches(&minus, 0.5_f64.sqrt())),
                        ],
                    };
                    rows.push((omega, e_up, entropy_of_entanglement(&lm)?));
                }
            }
            let mut f = std::fs::File::create(out.join("ati_entropy.csv"))?;
            use std::io::Write;
            writeln!(f, "omega_au,energy_up,entropy")?;
            for (w, e, s) in rows {
                writeln!(f, "{w},{e},{s}")?;
            }
        }
        other => return Err(usage(format!("unknown sweep kind `{other}`"))),
    }
    Ok(())
}

fn scale_branches(state: &EntangledMultimodeState, factor: f64) -> EntangledMultimodeState {
    let mut out = state.clone();
    for b in &mut out.branches {
        b.coeff *= factor;
    }
    out
}
