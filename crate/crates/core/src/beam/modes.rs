//! Laguerre-Gaussian modes and overlap decomposition.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{same_wavelength, ComplexFieldGrid, GridSpec};
use crate::error::{Error, Result};

/// Radial index `p` and azimuthal index (topological charge) `ell` of an
/// LG mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LGModeIndex {
    pub p: u32,
    pub ell: i64,
}

impl LGModeIndex {
    pub fn new(p: u32, ell: i64) -> Self {
        Self { p, ell }
    }
}

/// Waist (1/e^2 amplitude radius at focus) and wavelength of a beam family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    waist: f64,
    wavelength: f64,
}

impl BeamParams {
    pub fn new(waist: f64, wavelength: f64) -> Result<Self> {
        if !(waist > 0.0 && waist.is_finite()) {
            return Err(Error::InvalidBeam(format!("waist must be positive, got {waist}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidBeam(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(Self { waist, wavelength })
    }

    pub fn waist(&self) -> f64 {
        self.waist
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn rayleigh_range(&self) -> f64 {
        PI * self.waist * self.waist / self.wavelength
    }

    /// Beam radius `w(z)`.
    pub fn radius_at(&self, z: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.waist * (1.0 + (z / zr).powi(2)).sqrt()
    }

    fn check_resolution(&self, spec: &GridSpec) -> Result<()> {
        let pitch = spec.dx().max(spec.dy());
        if self.waist < 4.0 * pitch {
            Err(Error::Resolution {
                waist: self.waist,
                pitch,
            })
        } else {
            Ok(())
        }
    }
}

/// Generalized Laguerre polynomial `L_p^alpha(x)` by upward recurrence.
pub fn laguerre(p: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if p == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..p {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `sqrt(2 p! / (pi (p + |l|)!))`, the unit-power prefactor of `LG_p^l`.
fn lg_norm(p: u32, abs_ell: u32) -> f64 {
    // p! / (p + |l|)! = 1 / ((p+1)(p+2)...(p+|l|))
    let ratio: f64 = (1..=abs_ell).map(|m| 1.0 / (p + m) as f64).product();
    (2.0 * ratio / PI).sqrt()
}

/// Unit-power `LG_p^l` sampled at distance `z` from the waist.
///
/// Convention: `exp(+i l theta)` with theta counterclockwise in the (x, y)
/// plane seen along +z, time dependence `exp(-i w t)` and forward
/// propagation `exp(+i k z)`. The plane-wave factor `exp(i k z)` is omitted,
/// matching [`crate::beam::propagate`].
pub fn lg_mode_field(
    index: LGModeIndex,
    beam: BeamParams,
    spec: GridSpec,
    z: f64,
) -> Result<ComplexFieldGrid> {
    beam.check_resolution(&spec)?;
    let zr = beam.rayleigh_range();
    let w = beam.radius_at(z);
    let inv_r = z / (z * z + zr * zr);
    let gouy = (z / zr).atan();
    let k = 2.0 * PI / beam.wavelength;
    let abs_ell = index.ell.unsigned_abs() as u32;
    let order = (2 * index.p + abs_ell + 1) as f64;
    let amp = lg_norm(index.p, abs_ell) / w;
    let ell = index.ell as f64;

    ComplexFieldGrid::from_fn(spec, beam.wavelength, |x, y| {
        let r2 = x * x + y * y;
        let s = 2.0 * r2 / (w * w);
        let radial = amp
            * s.sqrt().powi(abs_ell as i32)
            * laguerre(index.p, abs_ell as f64, s)
            * (-r2 / (w * w)).exp();
        let phase = ell * y.atan2(x) + 0.5 * k * r2 * inv_r - order * gouy;
        Complex64::from_polar(radial, phase)
    })
}

/// Overlap coefficients of a field on a truncated LG basis at the waist.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    coefficients: BTreeMap<LGModeIndex, Complex64>,
    field_power: f64,
}

impl ModeDecomposition {
    pub fn coefficients(&self) -> &BTreeMap<LGModeIndex, Complex64> {
        &self.coefficients
    }

    pub fn coefficient(&self, p: u32, ell: i64) -> Option<Complex64> {
        self.coefficients.get(&LGModeIndex::new(p, ell)).copied()
    }

    pub fn field_power(&self) -> f64 {
        self.field_power
    }

    /// `sum |c|^2` over the whole basis.
    pub fn captured_power(&self) -> f64 {
        self.coefficients.values().map(|c| c.norm_sqr()).sum()
    }

    /// `sum_p |c_{p,ell}|^2`.
    pub fn power_in_ell(&self, ell: i64) -> f64 {
        self.coefficients
            .iter()
            .filter(|(idx, _)| idx.ell == ell)
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    pub fn power_fraction_in_ell(&self, ell: i64) -> f64 {
        self.power_in_ell(ell) / self.field_power
    }

    /// The basis holds less than 95% of the field's power.
    pub fn is_truncated(&self) -> bool {
        self.captured_power() < 0.95 * self.field_power
    }
}

/// Project `field` on `LG_p^l` (waist plane of `beam`) for
/// `p in 0..=p_max`, `l in ell_range`.
///
/// Check [`ModeDecomposition::is_truncated`] before trusting power bookkeeping.
pub fn decompose(
    field: &ComplexFieldGrid,
    beam: BeamParams,
    p_max: u32,
    ell_range: RangeInclusive<i64>,
) -> Result<ModeDecomposition> {
    if !same_wavelength(field.wavelength(), beam.wavelength()) {
        return Err(Error::WavelengthMismatch {
            a: field.wavelength(),
            b: beam.wavelength(),
        });
    }
    beam.check_resolution(field.spec())?;

    let indices: Vec<LGModeIndex> = ell_range
        .flat_map(|ell| (0..=p_max).map(move |p| LGModeIndex::new(p, ell)))
        .collect();
    let coefficients = indices
        .par_iter()
        .map(|&idx| {
            let mode = lg_mode_field(idx, beam, *field.spec(), 0.0)?;
            Ok((idx, mode.inner(field)?))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();

    Ok(ModeDecomposition {
        coefficients,
        field_power: field.power(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, pitch: f64) -> GridSpec {
        GridSpec::square(n, pitch).unwrap()
    }

    #[test]
    fn laguerre_matches_closed_forms() {
        let x = 0.7;
        let a = 2.0;
        assert_relative_eq!(laguerre(0, a, x), 1.0);
        assert_relative_eq!(laguerre(1, a, x), 1.0 + a - x);
        let l2 = 0.5 * (x * x - 2.0 * (a + 2.0) * x + (a + 1.0) * (a + 2.0));
        assert_relative_eq!(laguerre(2, a, x), l2, epsilon = 1e-12);
    }

    #[test]
    fn resolution_guard() {
        let beam = BeamParams::new(3.0, 1.0).unwrap();
        let err = lg_mode_field(LGModeIndex::new(0, 0), beam, grid(64, 1.0), 0.0).unwrap_err();
        assert!(matches!(err, Error::Resolution { .. }));
    }

    #[test]
    fn fundamental_mode_peaks_on_axis_with_flat_phase() {
        let spec = grid(128, 1.0);
        let beam = BeamParams::new(12.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(0, 0), beam, spec, 0.0).unwrap();
        let peak = u
            .values()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap()
            .0;
        assert_eq!(peak, spec.index(64, 64));
        assert!(u.values().iter().all(|v| v.im.abs() < 1e-15));
        assert_relative_eq!(u.power(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn vortex_mode_is_dark_on_axis() {
        let spec = grid(128, 1.0);
        let beam = BeamParams::new(12.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(0, 1), beam, spec, 0.0).unwrap();
        assert_eq!(u.at(64, 64).norm(), 0.0);
        assert_relative_eq!(u.power(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn modes_stay_normalized_away_from_waist() {
        let spec = grid(256, 1.0);
        let beam = BeamParams::new(10.0, 0.5).unwrap();
        let z = beam.rayleigh_range();
        for (p, ell) in [(0, 0), (1, 2), (2, -3)] {
            let u = lg_mode_field(LGModeIndex::new(p, ell), beam, spec, z).unwrap();
            assert_relative_eq!(u.power(), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn decompose_pure_mode() {
        let spec = grid(128, 1.0);
        let beam = BeamParams::new(12.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(0, 1), beam, spec, 0.0).unwrap();
        let d = decompose(&u, beam, 3, -3..=3).unwrap();
        for (idx, c) in d.coefficients() {
            let expect = if *idx == LGModeIndex::new(0, 1) { 1.0 } else { 0.0 };
            assert!((c.norm() - expect).abs() < 1e-6, "{idx:?}: {c}");
        }
        assert!(!d.is_truncated());
    }

    #[test]
    fn decompose_balanced_superposition() {
        let spec = grid(128, 1.0);
        let beam = BeamParams::new(12.0, 0.5).unwrap();
        let a = lg_mode_field(LGModeIndex::new(0, 1), beam, spec, 0.0).unwrap();
        let b = lg_mode_field(LGModeIndex::new(0, -1), beam, spec, 0.0).unwrap();
        let s = a.add(&b).unwrap().normalized();
        let d = decompose(&s, beam, 2, -2..=2).unwrap();
        assert!((d.coefficient(0, 1).unwrap().norm_sqr() - 0.5).abs() < 1e-6);
        assert!((d.coefficient(0, -1).unwrap().norm_sqr() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn decompose_flags_truncation_and_checks_wavelength() {
        let spec = grid(128, 1.0);
        let beam = BeamParams::new(12.0, 0.5).unwrap();
        let u = lg_mode_field(LGModeIndex::new(0, 4), beam, spec, 0.0).unwrap();
        let d = decompose(&u, beam, 1, -1..=1).unwrap();
        assert!(d.is_truncated());

        let other = BeamParams::new(12.0, 0.6).unwrap();
        assert!(matches!(
            decompose(&u, other, 1, 0..=0),
            Err(Error::WavelengthMismatch { .. })
        ));
    }
}
