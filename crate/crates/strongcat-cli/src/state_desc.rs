//! Textual state descriptors shared by the wigner and tomo subcommands:
//! `coherent:RE[,IM]`, `fock:N`, `squeezed:RE,IM,K`, `cat:RE,IM,CHI_RE[,CHI_IM]`.

use anyhow::{anyhow, bail, Context, Result};
use strongcat::phase_space::{
    required_truncation, CoherentAmplitude, CoherentSuperposition, SqueezeParams,
};
use strongcat::tomography::DensityMatrix;

#[derive(Debug, Clone)]
pub enum StateDesc {
    Coherent(CoherentAmplitude),
    Fock(usize),
    Squeezed(SqueezeParams),
    Cat {
        alpha: CoherentAmplitude,
        chi: CoherentAmplitude,
    },
}

fn parse_floats(body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{s}` in state descriptor"))
        })
        .collect()
}

impl StateDesc {
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, body) = text
            .split_once(':')
            .ok_or_else(|| anyhow!("state descriptor needs the form kind:args, got `{text}`"))?;
        let nums = parse_floats(body)?;
        match (kind, nums.as_slice()) {
            ("coherent", [re]) => Ok(Self::Coherent(CoherentAmplitude::new(*re, 0.0))),
            ("coherent", [re, im]) => Ok(Self::Coherent(CoherentAmplitude::new(*re, *im))),
            ("fock", [n]) if *n >= 0.0 && n.fract() == 0.0 => Ok(Self::Fock(*n as usize)),
            ("squeezed", [re, im, k]) => Ok(Self::Squeezed(SqueezeParams::new(
                *k,
                CoherentAmplitude::new(*re, *im),
            ))),
            ("cat", [re, im, chi]) => Ok(Self::Cat {
                alpha: CoherentAmplitude::new(*re, *im),
                chi: CoherentAmplitude::new(*chi, 0.0),
            }),
            ("cat", [re, im, chi_re, chi_im]) => Ok(Self::Cat {
                alpha: CoherentAmplitude::new(*re, *im),
                chi: CoherentAmplitude::new(*chi_re, *chi_im),
            }),
            _ => bail!("unrecognized state descriptor `{text}`"),
        }
    }

    /// Truncation that keeps the leakage invariant for this state.
    pub fn default_truncation(&self) -> usize {
        match self {
            Self::Coherent(a) => required_truncation(*a),
            Self::Fock(n) => n + 8,
            Self::Squeezed(p) => {
                let spread = CoherentAmplitude::new(
                    p.alpha.norm_sqr().sqrt() + p.k.abs().exp(),
                    0.0,
                );
                required_truncation(spread)
            }
            Self::Cat { alpha, chi } => {
                let reach = CoherentAmplitude::new(
                    alpha.norm_sqr().sqrt() + chi.norm_sqr().sqrt(),
                    0.0,
                );
                required_truncation(reach)
            }
        }
    }

    pub fn density_matrix(&self, n_trunc: usize) -> Result<DensityMatrix> {
        Ok(match self {
            Self::Coherent(a) => DensityMatrix::coherent(*a, n_trunc)?,
            Self::Fock(n) => DensityMatrix::from_pure(
                &strongcat::phase_space::FockVector::fock(*n, n_trunc),
            ),
            Self::Squeezed(p) => DensityMatrix::from_pure(&p.fock_coeffs(n_trunc)?),
            Self::Cat { alpha, chi } => DensityMatrix::from_superposition(
                &CoherentSuperposition::shifted_cat(*alpha, *chi),
                n_trunc,
            )?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Coherent(a) => format!("coherent alpha=({},{})", a.re, a.im),
            Self::Fock(n) => format!("fock n={n}"),
            Self::Squeezed(p) => format!(
                "squeezed alpha=({},{}) k={}",
                p.alpha.re, p.alpha.im, p.k
            ),
            Self::Cat { alpha, chi } => format!(
                "cat alpha=({},{}) chi=({},{})",
                alpha.re, alpha.im, chi.re, chi.im
            ),
        }
    }
}
