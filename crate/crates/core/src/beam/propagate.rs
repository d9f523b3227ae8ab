//! Free-space angular-spectrum propagation.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::ComplexFieldGrid;
use crate::error::{Error, Result};
use crate::fft::{fft2, frequency, ifft2};

/// Fraction of spectral power allowed outside the band used by the
/// aliasing guard.
const BAND_TAIL: f64 = 1e-6;

/// Propagate `field` by `distance` (meters, either sign) through vacuum.
///
/// Uses the exact scalar transfer function `exp(i (k_z - k) z)`; the common
/// `exp(i k z)` factor is dropped. Evanescent components decay. Fails when the
/// transfer function would be undersampled over the band that carries the
/// field's power, which is the same as rays leaving through the periodic
/// window.
pub fn propagate(field: &ComplexFieldGrid, distance: f64) -> Result<ComplexFieldGrid> {
    if !distance.is_finite() {
        return Err(Error::InvalidArgument(format!("distance {distance}")));
    }
    if distance == 0.0 {
        return Ok(field.clone());
    }
    let spec = *field.spec();
    let (nx, ny) = (spec.nx(), spec.ny());
    let lambda = field.wavelength();
    let k = field.wavenumber();

    let mut spectrum = field.values().to_vec();
    fft2(nx, ny, &mut spectrum);

    let (band_x, band_y) = occupied_band(&spectrum, nx, ny);
    check_walkoff(distance, lambda, band_x / (nx as f64 * spec.dx()), nx as f64 * spec.dx(), "x")?;
    check_walkoff(distance, lambda, band_y / (ny as f64 * spec.dy()), ny as f64 * spec.dy(), "y")?;

    for j in 0..ny {
        let fy = frequency(j, ny, spec.dy());
        for i in 0..nx {
            let fx = frequency(i, nx, spec.dx());
            let kt2 = (2.0 * PI) * (2.0 * PI) * (fx * fx + fy * fy);
            let kz2 = k * k - kt2;
            let h = if kz2 >= 0.0 {
                // k_z - k without cancellation
                let dkz = -kt2 / (kz2.sqrt() + k);
                Complex64::from_polar(1.0, dkz * distance)
            } else {
                Complex64::new((-(-kz2).sqrt() * distance.abs()).exp(), 0.0)
            };
            spectrum[j * nx + i] *= h;
        }
    }

    ifft2(nx, ny, &mut spectrum);
    Ok(ComplexFieldGrid::from_parts(spec, lambda, spectrum))
}

/// Largest |bin| per axis such that the spectral power beyond it is below
/// `BAND_TAIL` of the total.
fn occupied_band(spectrum: &[Complex64], nx: usize, ny: usize) -> (f64, f64) {
    let mut mx = vec![0.0; nx / 2 + 1];
    let mut my = vec![0.0; ny / 2 + 1];
    for j in 0..ny {
        let bj = crate::fft::signed_bin(j, ny).unsigned_abs() as usize;
        for i in 0..nx {
            let bi = crate::fft::signed_bin(i, nx).unsigned_abs() as usize;
            let p = spectrum[j * nx + i].norm_sqr();
            mx[bi] += p;
            my[bj] += p;
        }
    }
    (band_edge(&mx), band_edge(&my))
}

fn band_edge(marginal: &[f64]) -> f64 {
    let total: f64 = marginal.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut tail = 0.0;
    for (b, p) in marginal.iter().enumerate().rev() {
        tail += p;
        if tail > BAND_TAIL * total {
            return b as f64;
        }
    }
    0.0
}

fn check_walkoff(distance: f64, lambda: f64, f_band: f64, window: f64, axis: &str) -> Result<()> {
    let s = lambda * f_band;
    if s >= 1.0 {
        return Err(Error::Aliasing(format!(
            "field carries evanescent content along {axis}"
        )));
    }
    let shift = distance.abs() * s / (1.0 - s * s).sqrt();
    if shift > 0.5 * window {
        return Err(Error::Aliasing(format!(
            "transfer function undersampled along {axis}: rays walk {shift:.3e} m in a {window:.3e} m window"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{lg_mode_field, BeamParams, GridSpec, LGModeIndex};
    use approx::assert_relative_eq;

    fn second_moment_radius(u: &ComplexFieldGrid) -> f64 {
        let spec = u.spec();
        let (mut m, mut p) = (0.0, 0.0);
        for ((x, y), v) in spec.coords().zip(u.values()) {
            let i = v.norm_sqr();
            m += i * (x * x + y * y);
            p += i;
        }
        // <r^2> = w^2 / 2 for a Gaussian intensity profile
        (2.0 * m / p).sqrt()
    }

    #[test]
    fn zero_distance_is_identity() {
        let spec = GridSpec::square(64, 1.0).unwrap();
        let beam = BeamParams::new(6.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(1, 2), beam, spec, 0.0).unwrap();
        assert_eq!(propagate(&u, 0.0).unwrap(), u);
    }

    #[test]
    fn gaussian_widens_by_sqrt2_at_rayleigh_range() {
        let spec = GridSpec::square(256, 1.0).unwrap();
        let beam = BeamParams::new(16.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(0, 0), beam, spec, 0.0).unwrap();
        let v = propagate(&u, beam.rayleigh_range()).unwrap();
        let ratio = second_moment_radius(&v) / second_moment_radius(&u);
        assert!((ratio - 2f64.sqrt()).abs() < 2e-3 * 2f64.sqrt(), "ratio {ratio}");
        assert_relative_eq!(v.power(), u.power(), max_relative = 1e-6);
    }

    #[test]
    fn matches_analytic_mode_at_distance() {
        let spec = GridSpec::square(256, 1.0).unwrap();
        let beam = BeamParams::new(14.0, 0.5).unwrap();
        let idx = LGModeIndex::new(1, -2);
        let z = 0.7 * beam.rayleigh_range();
        let u = lg_mode_field(idx, beam, spec, 0.0).unwrap();
        let v = propagate(&u, z).unwrap();
        let expect = lg_mode_field(idx, beam, spec, z).unwrap();
        let fidelity = expect.inner(&v).unwrap().norm_sqr();
        assert!(fidelity > 1.0 - 1e-6, "fidelity {fidelity}");
    }

    #[test]
    fn backward_undoes_forward() {
        let spec = GridSpec::square(128, 1.0).unwrap();
        let beam = BeamParams::new(10.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(0, 3), beam, spec, 0.0).unwrap();
        let z = beam.rayleigh_range();
        let back = propagate(&propagate(&u, z).unwrap(), -z).unwrap();
        let err: f64 = u
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "max error {err}");
    }

    #[test]
    fn guard_trips_when_beam_outruns_window() {
        let spec = GridSpec::square(64, 1.0).unwrap();
        let beam = BeamParams::new(5.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(0, 0), beam, spec, 0.0).unwrap();
        let err = propagate(&u, 50.0 * beam.rayleigh_range()).unwrap_err();
        assert!(matches!(err, Error::Aliasing(_)));
    }
}
