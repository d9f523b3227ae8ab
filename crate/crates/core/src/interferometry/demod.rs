//! Fourier demodulation of a fringe pattern into its baseband and the
//! `v conj(r)` lobe.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CarrierHint, Interferogram};
use crate::fft::{fft2, ifft2, signed_bin};

/// Spectral radius (bins) around DC ignored when searching for the carrier.
const DC_EXCLUSION: f64 = 4.0;
/// Off-axis peaks weaker than this fraction of the DC term count as absent.
const MIN_LOBE: f64 = 1e-9;

pub(crate) struct Demodulated {
    pub nx: usize,
    pub ny: usize,
    /// Complex envelope `v conj(r)` with the carrier removed.
    pub lobe: Vec<Complex64>,
    /// Low-pass part `|v|^2 + |r|^2`.
    pub baseband: Vec<f64>,
    /// Position of the `+K` carrier in signed bins.
    pub carrier_bins: (f64, f64),
}

impl Demodulated {
    /// Unit vector along `+K` in pixel space.
    pub fn carrier_direction(&self) -> (f64, f64) {
        let (kx, ky) = self.carrier_bins;
        let (fx, fy) = (kx / self.nx as f64, ky / self.ny as f64);
        let n = fx.hypot(fy);
        (fx / n, fy / n)
    }
}

/// Split `gram` into baseband and lobe. Returns `None` when no carrier is
/// known or detectable.
pub(crate) fn demodulate(gram: &Interferogram, hint: CarrierHint) -> Option<Demodulated> {
    let spec = gram.spec();
    let (nx, ny) = (spec.nx(), spec.ny());
    let mut spectrum: Vec<Complex64> = gram.intensity().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(nx, ny, &mut spectrum);

    let carrier = match gram.carrier() {
        Some(c) => {
            let (fx, fy) = c.frequency(gram.wavelength());
            (fx * nx as f64 * spec.dx(), fy * ny as f64 * spec.dy())
        }
        None => {
            let (lx, ly) = detect_lobe(&spectrum, nx, ny, hint)?;
            (-lx, -ly)
        }
    };
    // window radius in normalized frequency (cycles per pixel)
    let radius = 0.5 * (carrier.0 / nx as f64).hypot(carrier.1 / ny as f64);
    if radius * (nx.min(ny) as f64) < 1.0 {
        return None;
    }

    let center = (-carrier.0, -carrier.1);
    let shift = (center.0.round() as i64, center.1.round() as i64);
    let mut lobe = vec![Complex64::default(); nx * ny];
    let mut base = vec![Complex64::default(); nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let (bx, by) = (signed_bin(i, nx) as f64, signed_bin(j, ny) as f64);
            let s = spectrum[j * nx + i];
            let w = hann(wrapped_distance((bx, by), center, nx, ny), radius);
            if w > 0.0 {
                let oi = (i as i64 - shift.0).rem_euclid(nx as i64) as usize;
                let oj = (j as i64 - shift.1).rem_euclid(ny as i64) as usize;
                lobe[oj * nx + oi] = s * w;
            }
            let w0 = hann(wrapped_distance((bx, by), (0.0, 0.0), nx, ny), radius);
            if w0 > 0.0 {
                base[j * nx + i] = s * w0;
            }
        }
    }
    ifft2(nx, ny, &mut lobe);
    ifft2(nx, ny, &mut base);
    Some(Demodulated {
        nx,
        ny,
        lobe,
        baseband: base.iter().map(|v| v.re.max(0.0)).collect(),
        carrier_bins: carrier,
    })
}

/// Distance in cycles per pixel between two signed bin positions, on the
/// periodic spectrum.
fn wrapped_distance(a: (f64, f64), b: (f64, f64), nx: usize, ny: usize) -> f64 {
    let wrap = |d: f64, n: usize| {
        let n = n as f64;
        (d + n / 2.0).rem_euclid(n) - n / 2.0
    };
    (wrap(a.0 - b.0, nx) / nx as f64).hypot(wrap(a.1 - b.1, ny) / ny as f64)
}

fn hann(distance: f64, radius: f64) -> f64 {
    if distance >= radius {
        0.0
    } else {
        0.5 * (1.0 + (PI * distance / radius).cos())
    }
}

/// Locate the `-K` lobe: strongest off-axis peak, assigned to a half-plane
/// by `hint`, then refined to the power centroid of its neighbourhood.
fn detect_lobe(spectrum: &[Complex64], nx: usize, ny: usize, hint: CarrierHint) -> Option<(f64, f64)> {
    let dc = spectrum[0].norm();
    let mut best = (0.0, 0i64, 0i64);
    for j in 0..ny {
        for i in 0..nx {
            let (bx, by) = (signed_bin(i, nx), signed_bin(j, ny));
            if ((bx * bx + by * by) as f64).sqrt() < DC_EXCLUSION {
                continue;
            }
            let m = spectrum[j * nx + i].norm();
            if m > best.0 {
                best = (m, bx, by);
            }
        }
    }
    if !(best.0 > MIN_LOBE * dc) {
        return None;
    }
    let (bx, by) = (best.1, best.2);
    let positive = match hint {
        CarrierHint::PlusX => bx > 0 || (bx == 0 && by > 0),
        CarrierHint::MinusX => bx < 0 || (bx == 0 && by < 0),
        CarrierHint::PlusY => by > 0 || (by == 0 && bx > 0),
        CarrierHint::MinusY => by < 0 || (by == 0 && bx < 0),
    };
    let peak = if positive { (-bx, -by) } else { (bx, by) };
    let peak = (peak.0 as f64, peak.1 as f64);

    let radius = 0.5 * ((peak.0 / nx as f64).hypot(peak.1 / ny as f64));
    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
    for j in 0..ny {
        for i in 0..nx {
            let b = (signed_bin(i, nx) as f64, signed_bin(j, ny) as f64);
            if wrapped_distance(b, peak, nx, ny) < radius {
                let w = spectrum[j * nx + i].norm_sqr();
                // offsets are taken relative to the peak so wrapping is harmless
                let wrap = |d: f64, n: usize| (d + n as f64 / 2.0).rem_euclid(n as f64) - n as f64 / 2.0;
                sx += w * wrap(b.0 - peak.0, nx);
                sy += w * wrap(b.1 - peak.1, ny);
                sw += w;
            }
        }
    }
    Some((peak.0 + sx / sw, peak.1 + sy / sw))
}
