//! Phase-only optical elements and reflection-parity bookkeeping.

use std::f64::consts::PI;
use std::ops::Add;

use num_complex::Complex64;

use crate::beam::ComplexFieldGrid;
use crate::error::{Error, Result};

/// Spiral phase plate.
///
/// `n_steps = None` is the continuous ramp; `Some(n)` quantizes the ramp into
/// `n` equal steps with boundaries at `theta = 2 pi k / n`, `k = 0` on the
/// +x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SppSpec {
    pub design_charge: i64,
    pub n_steps: Option<u32>,
    pub design_wavelength: f64,
}

impl SppSpec {
    pub fn continuous(design_charge: i64, design_wavelength: f64) -> Result<Self> {
        Self::build(design_charge, None, design_wavelength)
    }

    pub fn stepped(design_charge: i64, n_steps: u32, design_wavelength: f64) -> Result<Self> {
        Self::build(design_charge, Some(n_steps), design_wavelength)
    }

    fn build(design_charge: i64, n_steps: Option<u32>, design_wavelength: f64) -> Result<Self> {
        if n_steps == Some(0) {
            return Err(Error::InvalidArgument("SPP needs at least one step".into()));
        }
        if !(design_wavelength > 0.0 && design_wavelength.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "design wavelength must be positive, got {design_wavelength}"
            )));
        }
        Ok(Self {
            design_charge,
            n_steps,
            design_wavelength,
        })
    }

    /// Azimuthal profile `q(theta)` for `theta` in `[0, 2 pi)`.
    pub fn profile(&self, theta: f64) -> f64 {
        match self.n_steps {
            None => theta,
            Some(n) => {
                let step = 2.0 * PI / n as f64;
                ((theta / step).floor()).min(n as f64 - 1.0) * step
            }
        }
    }

    /// Imprinted phase at azimuth `theta` for light of `wavelength`; the
    /// phase depth scales as `design_wavelength / wavelength` (thin plate, no
    /// material dispersion).
    pub fn phase(&self, theta: f64, wavelength: f64) -> f64 {
        self.profile(theta) * self.design_charge as f64 * (self.design_wavelength / wavelength)
    }
}

pub fn apply_spp(field: &ComplexFieldGrid, spp: &SppSpec) -> ComplexFieldGrid {
    let lambda = field.wavelength();
    field.map(|x, y, u| {
        let theta = y.atan2(x).rem_euclid(2.0 * PI);
        u * Complex64::from_polar(1.0, spp.phase(theta, lambda))
    })
}

/// Reflection off a plane mirror: the transverse field is flipped `x -> -x`
/// about the optical axis, which negates every topological charge.
///
/// Column `i` maps to `(nx - i) mod nx`, so the outermost column (which has
/// no mirror partner on an even grid) maps onto itself and the flip is an
/// exact involution.
pub fn apply_mirror(field: &ComplexFieldGrid) -> ComplexFieldGrid {
    let spec = *field.spec();
    let (nx, ny) = (spec.nx(), spec.ny());
    let src = field.values();
    let mut out = Vec::with_capacity(src.len());
    for j in 0..ny {
        for i in 0..nx {
            out.push(src[spec.index((nx - i) % nx, j)]);
        }
    }
    ComplexFieldGrid::from_parts(spec, field.wavelength(), out)
}

/// Number of mirror reflections along a path. Only the parity is observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReflectionParity {
    pub count: u32,
}

impl ReflectionParity {
    pub fn new(count: u32) -> Self {
        Self { count }
    }

    pub fn is_odd(&self) -> bool {
        self.count % 2 == 1
    }
}

impl Add for ReflectionParity {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(self.count + rhs.count)
    }
}

/// Charge after a path with the given reflection count.
pub fn path_charge(input_charge: i64, parity: ReflectionParity) -> i64 {
    if parity.is_odd() {
        -input_charge
    } else {
        input_charge
    }
}

/// Two-arm beam-crossing setup.
///
/// The pump runs through the variable arm (translation stage plus three
/// mirrors). The Stokes pulse takes the fixed arm, which picks up an extra
/// reflection at the beam splitter and three fixed mirrors, plus one more
/// when the optional fold mirror is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossingSetup {
    pub fold_mirror_in: bool,
}

impl CrossingSetup {
    pub fn pump_arm(&self) -> ReflectionParity {
        ReflectionParity::new(3)
    }

    pub fn stokes_arm(&self) -> ReflectionParity {
        ReflectionParity::new(1 + 3 + u32::from(self.fold_mirror_in))
    }

    /// `(ell_p, ell_s)` at the crystal for a vortex of `input_charge`
    /// entering both arms.
    pub fn charges_at_crystal(&self, input_charge: i64) -> (i64, i64) {
        (
            path_charge(input_charge, self.pump_arm()),
            path_charge(input_charge, self.stokes_arm()),
        )
    }

    /// Input charge that arrives at the crystal as `pump_charge` in the pump
    /// arm.
    pub fn input_for_pump_charge(&self, pump_charge: i64) -> i64 {
        path_charge(pump_charge, self.pump_arm())
    }
}

/// Thin lens of focal length `focal_length`: multiplies by
/// `exp(-i k r^2 / (2 f))`.
pub fn apply_lens(field: &ComplexFieldGrid, focal_length: f64) -> Result<ComplexFieldGrid> {
    if focal_length == 0.0 || !focal_length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "focal length must be finite and nonzero, got {focal_length}"
        )));
    }
    let spec = field.spec();
    let k = field.wavenumber();
    // Phase step between neighbouring samples at the grid corner.
    let xm = (spec.nx() / 2) as f64 * spec.dx();
    let ym = (spec.ny() / 2) as f64 * spec.dy();
    let step = (k * xm * spec.dx() / focal_length.abs()).max(k * ym * spec.dy() / focal_length.abs());
    if step > PI {
        return Err(Error::Aliasing(format!(
            "lens phase advances {step:.2} rad per sample at the grid edge"
        )));
    }
    Ok(field.map(|x, y, u| u * Complex64::from_polar(1.0, -k * (x * x + y * y) / (2.0 * focal_length))))
}

/// Tilt the beam by `angle_x`, `angle_y` (radians): multiplies by
/// `exp(i k (x sin(angle_x) + y sin(angle_y)))`.
pub fn apply_tilt(field: &ComplexFieldGrid, angle_x: f64, angle_y: f64) -> Result<ComplexFieldGrid> {
    let spec = field.spec();
    let k = field.wavenumber();
    let (kx, ky) = (k * angle_x.sin(), k * angle_y.sin());
    if (kx * spec.dx()).abs() >= PI || (ky * spec.dy()).abs() >= PI {
        return Err(Error::Aliasing(format!(
            "tilt ({angle_x:.4}, {angle_y:.4}) rad exceeds the grid Nyquist limit"
        )));
    }
    if kx == 0.0 && ky == 0.0 {
        return Ok(field.clone());
    }
    Ok(field.map(|x, y, u| u * Complex64::from_polar(1.0, kx * x + ky * y)))
}
