//! Unit conversions and strong-field diagnostics. Atomic units internally;
//! eV / W/cm^2 / nm / fs appear only at interface boundaries.

use crate::error::{Error, Result};

/// Hartree energy in eV.
pub const HARTREE_EV: f64 = 27.211386245988;
/// Atomic unit of intensity in W/cm^2.
pub const AU_INTENSITY_WCM2: f64 = 3.50944758e16;
/// Atomic unit of time in fs.
pub const AU_TIME_FS: f64 = 0.024188843265857;
/// omega (a.u.) * lambda (nm) product: omega = 45.5634.../lambda_nm.
pub const OMEGA_NM_PRODUCT: f64 = 45.563352529;

/// Carrier angular frequency in atomic units from the wavelength in nm.
pub fn omega_from_wavelength_nm(lambda_nm: f64) -> f64 {
    OMEGA_NM_PRODUCT / lambda_nm
}

/// Photon energy in eV for a given wavelength in nm.
pub fn photon_energy_ev(lambda_nm: f64) -> f64 {
    omega_from_wavelength_nm(lambda_nm) * HARTREE_EV
}

/// Peak field amplitude in atomic units from the intensity in W/cm^2.
pub fn field_amplitude_au(intensity_wcm2: f64) -> f64 {
    (intensity_wcm2 / AU_INTENSITY_WCM2).sqrt()
}

/// Ponderomotive energy in eV: U_p = 9.33e-14 I[W/cm^2] lambda^2[um].
pub fn ponderomotive_energy(intensity_wcm2: f64, wavelength_um: f64) -> f64 {
    9.33e-14 * intensity_wcm2 * wavelength_um * wavelength_um
}

/// Keldysh parameter gamma = sqrt(I_p / (2 U_p)); energies in the same units.
pub fn keldysh_gamma(ip: f64, up: f64) -> Result<f64> {
    if up <= 0.0 {
        return Err(Error::ZeroField);
    }
    Ok((ip / (2.0 * up)).sqrt())
}

/// Cutoff law: 3.17 U_p + 1.32 I_p.
pub fn cutoff_energy(up: f64, ip: f64) -> f64 {
    3.17 * up + 1.32 * ip
}

pub fn ev_to_au(ev: f64) -> f64 {
    ev / HARTREE_EV
}

pub fn au_to_ev(au: f64) -> f64 {
    au * HARTREE_EV
}

pub fn fs_to_au(fs: f64) -> f64 {
    fs / AU_TIME_FS
}

pub fn au_to_fs(au: f64) -> f64 {
    au * AU_TIME_FS
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ponderomotive_reference_values() {
        assert_relative_eq!(ponderomotive_energy(1e14, 0.8), 5.97, epsilon = 0.01);
        assert_relative_eq!(ponderomotive_energy(8e13, 0.8), 4.78, epsilon = 0.01);
        assert_relative_eq!(ponderomotive_energy(0.0, 0.8), 0.0);
    }

    #[test]
    fn ponderomotive_cross_check_atomic_units() {
        // F0^2/(4 omega^2) must agree with the tabulated constant to ~0.5%
        let intensity = 1e14;
        let lambda_nm = 800.0;
        let f0 = field_amplitude_au(intensity);
        let omega = omega_from_wavelength_nm(lambda_nm);
        let up_au = f0 * f0 / (4.0 * omega * omega);
        let up_ev = au_to_ev(up_au);
        let up_ref = ponderomotive_energy(intensity, 0.8);
        assert!((up_ev / up_ref - 1.0).abs() < 5e-3, "{up_ev} vs {up_ref}");
    }

    #[test]
    fn keldysh_values() {
        assert_relative_eq!(keldysh_gamma(2.0, 1.0).unwrap(), 1.0);
        // Xe at 8e13 W/cm^2, 800 nm
        let up = ponderomotive_energy(8e13, 0.8);
        let gamma = keldysh_gamma(12.13, up).unwrap();
        assert_relative_eq!(gamma, 1.13, epsilon = 0.01);
        assert!(keldysh_gamma(12.13, 0.0).is_err());
        // gamma -> 0 with U_p -> infinity
        assert!(keldysh_gamma(12.13, 1e9).unwrap() < 1e-4);
    }

    #[test]
    fn cutoff_values() {
        assert_relative_eq!(cutoff_energy(0.0, 12.13), 1.32 * 12.13);
        let up = ponderomotive_energy(8e13, 0.8);
        let cutoff = cutoff_energy(up, 12.13);
        assert_relative_eq!(cutoff, 31.2, epsilon = 0.1);
        // harmonic order ~20 at 800 nm
        let order = cutoff / photon_energy_ev(800.0);
        assert!((order - 20.0).abs() < 0.5, "order {order}");
    }
}
