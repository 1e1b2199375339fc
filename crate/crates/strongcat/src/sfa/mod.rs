//! Semiclassical strong-field layer: pulses, Keldysh/ponderomotive/cutoff
//! diagnostics, the SFA dipole and the per-harmonic displacements.

pub mod classical;
pub mod dipole;
pub mod pulse;
pub mod shifts;
pub mod units;

pub use classical::{classical_return_spectrum, first_return, max_return_energy_ratio, ReturnEvent};
pub use dipole::{sfa_dipole, DipoleSeries, SfaOptions};
pub use pulse::{AtomSpec, Envelope, LaserPulse};
pub use shifts::{harmonic_shifts, HarmonicShiftSet, ModeCoupling};
pub use units::{cutoff_energy, keldysh_gamma, ponderomotive_energy};
