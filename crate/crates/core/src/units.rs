//! Unit conversions between spectroscopy units and SI angular frequency.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda` (m).
pub fn omega_from_wavelength(lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda
}

/// Vacuum wavelength (m) of angular frequency `omega` (rad/s).
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Angular frequency (rad/s) of a wavenumber given in cm^-1.
pub fn omega_from_wavenumber_cm(nu_tilde: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * 100.0 * nu_tilde
}

/// Wavenumber in cm^-1 of angular frequency `omega` (rad/s).
pub fn wavenumber_cm_from_omega(omega: f64) -> f64 {
    omega / (2.0 * PI * SPEED_OF_LIGHT * 100.0)
}

pub fn terahertz_from_omega(omega: f64) -> f64 {
    omega / (2.0 * PI) / 1e12
}
