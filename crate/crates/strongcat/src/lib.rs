//! Quantum-optical simulator for intense laser-atom interaction.
//!
//! The crate covers the full loop from a semiclassical driving pulse to
//! measured non-classical light:
//!
//! * [`phase_space`] — single-mode states, overlaps, photon statistics and
//!   closed-form Wigner functions;
//! * [`sfa`] — pulses, strong-field diagnostics, the SFA dipole and the
//!   per-harmonic coherent displacements chi_q;
//! * [`conditioning`] — multimode state synthesis, conditioning on HHG/ATI
//!   and entanglement measures;
//! * [`tomography`] — homodyne sampling, maximum-likelihood reconstruction,
//!   inverse Radon transform and fidelity scoring;
//! * [`spectrometer`] — shot-to-shot photon-correlation conditioning;
//! * [`config`] / [`io`] — reproducible run configuration and file formats.
//!
//! Quadrature convention throughout: x = (a + a^dag)/sqrt(2), so the vacuum
//! has Delta x = Delta p = 1/sqrt(2).

pub mod config;
pub mod conditioning;
pub mod error;
pub mod io;
pub mod math;
pub mod phase_space;
pub mod sfa;
pub mod spectrometer;
pub mod tomography;

pub use error::{Error, Result};
