//! Classical three-step trajectories: ionization, free flight in the field,
//! recollision. Serves as the independent oracle for the 3.17 U_p cutoff.

use super::pulse::LaserPulse;
use crate::error::{Error, Result};
use crate::math::cumtrapz;
use serde::{Deserialize, Serialize};

/// One recollision event: birth time, first return time and return energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnEvent {
    pub t_ion: f64,
    pub t_ret: f64,
    pub energy: f64,
}

/// First return of an electron born at rest at `t_ion`, integrating
/// x'' = -E(t) with x(t_ion) = x'(t_ion) = 0.
///
/// Velocity u(t) = A(t) - A(t_ion) and position come from the (exact) vector
/// potential and its cumulative integral on the pulse grid; the crossing is
/// located by linear interpolation.
pub fn first_return(pulse: &LaserPulse, t_ion: f64) -> Result<ReturnEvent> {
    let a = pulse.a_samples();
    let ia = cumtrapz(&a, pulse.dt());
    first_return_cached(pulse, &a, &ia, t_ion)
}

fn first_return_cached(
    pulse: &LaserPulse,
    a: &[f64],
    ia: &[f64],
    t_ion: f64,
) -> Result<ReturnEvent> {
    let dt = pulse.dt();
    let i0 = ((t_ion / dt).round() as usize).min(pulse.t_grid.len() - 1);
    let t0 = pulse.t_grid[i0];
    let a0 = a[i0];
    let mut prev_x = 0.0;
    let mut launched = false;
    for i in (i0 + 1)..pulse.t_grid.len() {
        let x = ia[i] - ia[i0] - a0 * (pulse.t_grid[i] - t0);
        if !launched {
            if x.abs() > 1e-9 * pulse.f0 {
                launched = true;
            }
            prev_x = x;
            continue;
        }
        if x == 0.0 || x.signum() != prev_x.signum() {
            // refine crossing by linear interpolation
            let frac = prev_x / (prev_x - x);
            let t_ret = pulse.t_grid[i - 1] + frac * dt;
            let u = pulse.vector_potential(t_ret) - a0;
            return Ok(ReturnEvent {
                t_ion: t0,
                t_ret,
                energy: 0.5 * u * u,
            });
        }
        prev_x = x;
    }
    Err(Error::NoReturns { t_ion })
}

/// Scan ionization times over `n_phases` points per cycle across the pulse
/// and collect first returns; phases without recollision are skipped.
pub fn classical_return_spectrum(pulse: &LaserPulse, n_phases: usize) -> Vec<ReturnEvent> {
    let a = pulse.a_samples();
    let ia = cumtrapz(&a, pulse.dt());
    let step = pulse.cycle() / n_phases as f64;
    let mut events = Vec::new();
    let mut t_ion = 0.0;
    while t_ion < pulse.duration() - pulse.cycle() {
        if let Ok(ev) = first_return_cached(pulse, &a, &ia, t_ion) {
            events.push(ev);
        }
        t_ion += step;
    }
    events
}

/// Maximum first-return kinetic energy over a dense phase scan, in units
/// of U_p; approaches 3.17 for long flat pulses.
pub fn max_return_energy_ratio(pulse: &LaserPulse, n_phases: usize) -> f64 {
    let up = pulse.up_au();
    classical_return_spectrum(pulse, n_phases)
        .iter()
        .map(|ev| ev.energy / up)
        .fold(0.0, f64::max)
}
