//! Ring radius and phase-circulation charge meter.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::ComplexFieldGrid;
use crate::error::{Error, Result};

/// Radius of the maximum of the azimuthally averaged intensity, measured
/// around the intensity centroid and refined by a parabola through the
/// peak bin and its neighbours. Beams whose profile peaks on the centroid
/// (no dark core) return 0.
pub fn ring_radius(field: &ComplexFieldGrid) -> f64 {
    let spec = field.spec();
    let intensity = field.intensity();
    let total: f64 = intensity.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let (mut cx, mut cy) = (0.0, 0.0);
    for ((x, y), w) in spec.coords().zip(&intensity) {
        cx += w * x;
        cy += w * y;
    }
    cx /= total;
    cy /= total;

    let dr = spec.dx().min(spec.dy());
    let profile = RadialProfile::build(
        spec.coords().map(|(x, y)| (x - cx).hypot(y - cy)),
        &intensity,
        dr,
        spec.half_aperture(),
    );
    profile.peak_radius()
}

/// Azimuthal average of a scalar map in rings of width `dr`.
pub(crate) struct RadialProfile {
    radius: Vec<f64>,
    mean: Vec<f64>,
}

impl RadialProfile {
    pub(crate) fn build(
        radii: impl Iterator<Item = f64>,
        values: &[f64],
        dr: f64,
        max_radius: f64,
    ) -> Self {
        let nbins = (max_radius / dr).floor() as usize + 1;
        let mut sum = vec![0.0; nbins];
        let mut rsum = vec![0.0; nbins];
        let mut count = vec![0usize; nbins];
        for (r, v) in radii.zip(values) {
            let b = (r / dr + 0.5).floor() as usize;
            if b < nbins {
                sum[b] += v;
                rsum[b] += r;
                count[b] += 1;
            }
        }
        let mut radius = Vec::with_capacity(nbins);
        let mut mean = Vec::with_capacity(nbins);
        for b in 0..nbins {
            if count[b] > 0 {
                radius.push(rsum[b] / count[b] as f64);
                mean.push(sum[b] / count[b] as f64);
            }
        }
        Self { radius, mean }
    }

    /// Sub-bin radius of the profile maximum; 0 when the maximum is the
    /// innermost bin.
    pub(crate) fn peak_radius(&self) -> f64 {
        let Some(k) = self
            .mean
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
        else {
            return 0.0;
        };
        if k == 0 {
            return 0.0;
        }
        if k + 1 >= self.mean.len() {
            return self.radius[k];
        }
        parabola_vertex(
            (self.radius[k - 1], self.mean[k - 1]),
            (self.radius[k], self.mean[k]),
            (self.radius[k + 1], self.mean[k + 1]),
        )
        .unwrap_or(self.radius[k])
    }
}

/// Abscissa of the extremum of the parabola through three points.
pub(crate) fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<f64> {
    let (x1, y1) = a;
    let (x2, y2) = b;
    let (x3, y3) = c;
    let denom = (x1 - x2) * (x1 - x3) * (x2 - x3);
    if denom == 0.0 {
        return None;
    }
    let a2 = (x3 * (y2 - y1) + x2 * (y1 - y3) + x1 * (y3 - y2)) / denom;
    let b2 = (x3 * x3 * (y1 - y2) + x2 * x2 * (y3 - y1) + x1 * x1 * (y2 - y3)) / denom;
    if a2 >= 0.0 {
        return None;
    }
    let v = -b2 / (2.0 * a2);
    (v >= x1.min(x3) && v <= x1.max(x3)).then_some(v)
}

/// Charge enclosed by a circle of `loop_radius` around the optical axis:
/// the nearest integer to `(1/2pi) * closed loop integral of grad(phase)`.
pub fn measure_charge_circulation(field: &ComplexFieldGrid, loop_radius: f64) -> Result<i64> {
    let spec = field.spec();
    let pitch = spec.dx().max(spec.dy());
    if !(loop_radius >= pitch && loop_radius <= spec.half_aperture() - pitch) {
        return Err(Error::InvalidLoop {
            radius: loop_radius,
        });
    }
    let c = phase_circulation(
        field.values(),
        spec.nx(),
        spec.ny(),
        ((spec.nx() / 2) as f64, (spec.ny() / 2) as f64),
        (loop_radius / spec.dx(), loop_radius / spec.dy()),
    );
    nearest_charge(c)
}

pub(crate) fn nearest_charge(circulation: f64) -> Result<i64> {
    let n = circulation.round();
    if (circulation - n).abs() > 0.25 {
        Err(Error::AmbiguousCharge { circulation })
    } else {
        Ok(n as i64)
    }
}

/// Phase winding (in turns) of a sampled complex map along an ellipse with
/// pixel semi-axes `radius` centered at pixel coordinates `center`,
/// traversed counterclockwise in (x, y).
pub(crate) fn phase_circulation(
    values: &[Complex64],
    nx: usize,
    ny: usize,
    center: (f64, f64),
    radius: (f64, f64),
) -> f64 {
    let perimeter = 2.0 * PI * radius.0.max(radius.1);
    let m = ((8.0 * perimeter).ceil() as usize).max(64);
    let sample = |t: f64| {
        let a = 2.0 * PI * t / m as f64;
        bilinear(
            values,
            nx,
            ny,
            center.0 + radius.0 * a.cos(),
            center.1 + radius.1 * a.sin(),
        )
    };
    let first = sample(0.0);
    let mut prev = first;
    let mut total = 0.0;
    for s in 1..=m {
        let cur = if s == m { first } else { sample(s as f64) };
        total += (cur * prev.conj()).arg();
        prev = cur;
    }
    total / (2.0 * PI)
}

/// Bilinear interpolation at fractional pixel `(px, py)`; clamps to the grid.
pub(crate) fn bilinear(values: &[Complex64], nx: usize, ny: usize, px: f64, py: f64) -> Complex64 {
    let px = px.clamp(0.0, (nx - 1) as f64);
    let py = py.clamp(0.0, (ny - 1) as f64);
    let i0 = (px.floor() as usize).min(nx - 2);
    let j0 = (py.floor() as usize).min(ny - 2);
    let fx = px - i0 as f64;
    let fy = py - j0 as f64;
    let at = |i: usize, j: usize| values[j * nx + i];
    at(i0, j0) * ((1.0 - fx) * (1.0 - fy))
        + at(i0 + 1, j0) * (fx * (1.0 - fy))
        + at(i0, j0 + 1) * ((1.0 - fx) * fy)
        + at(i0 + 1, j0 + 1) * (fx * fy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{lg_mode_field, BeamParams, GridSpec, LGModeIndex};

    fn lg(p: u32, ell: i64, waist: f64, spec: GridSpec) -> ComplexFieldGrid {
        let beam = BeamParams::new(waist, 0.8e-6).unwrap();
        lg_mode_field(LGModeIndex::new(p, ell), beam, spec, 0.0).unwrap()
    }

    #[test]
    fn fundamental_ring_radius_is_zero() {
        let spec = GridSpec::square(128, 1e-4).unwrap();
        assert_eq!(ring_radius(&lg(0, 0, 1.6e-3, spec)), 0.0);
    }

    #[test]
    fn first_order_ring_at_w0_over_sqrt2() {
        // 1 mm waist sampled at 62.5 um
        let spec = GridSpec::square(128, 62.5e-6).unwrap();
        let r = ring_radius(&lg(0, 1, 1e-3, spec));
        let expect = 1e-3 / 2f64.sqrt();
        assert!((r / expect - 1.0).abs() < 0.02, "r = {r}");
    }

    #[test]
    fn ring_radius_scales_as_sqrt_charge() {
        let spec = GridSpec::square(256, 1.0).unwrap();
        let r1 = ring_radius(&lg(0, 1, 16.0, spec));
        for ell in [2, 4, 9] {
            let r = ring_radius(&lg(0, ell, 16.0, spec));
            let ratio = r / r1 / (ell as f64).sqrt();
            assert!((ratio - 1.0).abs() < 0.05, "ell {ell}: {ratio}");
        }
    }

    #[test]
    fn circulation_reads_mode_charge() {
        let spec = GridSpec::square(256, 1.0).unwrap();
        for p in 0..=2 {
            for ell in -5..=5 {
                let u = lg(p, ell, 16.0, spec);
                // inside the first radial node for every p <= 2
                assert_eq!(measure_charge_circulation(&u, 6.0).unwrap(), ell, "p={p} ell={ell}");
            }
        }
    }

    #[test]
    fn product_adds_charges() {
        let spec = GridSpec::square(128, 1.0).unwrap();
        let u = lg(0, 1, 12.0, spec).product(&lg(0, 2, 12.0, spec)).unwrap();
        assert_eq!(measure_charge_circulation(&u, 8.0).unwrap(), 3);
    }

    #[test]
    fn loop_must_fit() {
        let spec = GridSpec::square(64, 1.0).unwrap();
        let u = lg(0, 1, 8.0, spec);
        assert!(matches!(
            measure_charge_circulation(&u, 0.5),
            Err(Error::InvalidLoop { .. })
        ));
        assert!(matches!(
            measure_charge_circulation(&u, 40.0),
            Err(Error::InvalidLoop { .. })
        ));
    }

    #[test]
    fn half_integer_winding_is_ambiguous() {
        assert!(matches!(nearest_charge(1.5), Err(Error::AmbiguousCharge { .. })));
        assert_eq!(nearest_charge(-2.1).unwrap(), -2);
    }

    #[test]
    fn parabola_vertex_recovers_peak() {
        let f = |x: f64| -(x - 1.3) * (x - 1.3) + 4.0;
        let v = parabola_vertex((1.0, f(1.0)), (1.5, f(1.5)), (2.0, f(2.0))).unwrap();
        assert!((v - 1.3).abs() < 1e-12);
    }
}
