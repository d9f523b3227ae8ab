//! Two-source interferograms and automatic topological-charge readout.
//!
//! The reference arm is tilted by the carrier angle, so the recorded
//! intensity is
//!
//! ```text
//! I = |v|^2 + |r|^2 + v conj(r) exp(-i K.x) + c.c.,    K = k sin(angle)
//! ```
//!
//! Demodulation keeps the lobe at `-K`, which is `v conj(r)`. Its phase
//! winds by `ell_v - ell_r` around the vortex core. That difference is the
//! reading, independent of the sign of the tilt, as long as the carrier is
//! known. Images carry no carrier metadata; then the `+K` lobe is assumed to
//! lie on the `+x` side of the spectrum (or the side named by a
//! [`CarrierHint`]), and mirroring the image or flipping the tilt negates the
//! reading.

mod demod;
mod fork;
mod panel;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::beam::{ComplexFieldGrid, GridSpec};
use crate::error::{Error, Result};
use crate::fft::{fft2, frequency, ifft2};
use crate::raman::SidebandLabel;

pub use fork::{count_fork_fringes, extract_charge, extract_charge_with_hint, fringe_visibility};
pub use panel::{analyze_fig3_panel, PanelEntry, PanelSetup};

/// Relative tilt of the reference arm, radians about each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carrier {
    pub angle_x: f64,
    pub angle_y: f64,
}

impl Carrier {
    pub fn along_x(angle: f64) -> Self {
        Self {
            angle_x: angle,
            angle_y: 0.0,
        }
    }

    /// Carrier spatial frequency in cycles per meter.
    pub fn frequency(&self, wavelength: f64) -> (f64, f64) {
        (self.angle_x.sin() / wavelength, self.angle_y.sin() / wavelength)
    }

    pub fn negated(&self) -> Self {
        Self {
            angle_x: -self.angle_x,
            angle_y: -self.angle_y,
        }
    }
}

/// Half-plane assumed to hold the `+K` lobe when the carrier is unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CarrierHint {
    #[default]
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

impl FromStr for CarrierHint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+x" | "x" => Ok(Self::PlusX),
            "-x" => Ok(Self::MinusX),
            "+y" | "y" => Ok(Self::PlusY),
            "-y" => Ok(Self::MinusY),
            other => Err(Error::InvalidArgument(format!(
                "carrier hint must be one of +x, -x, +y, -y, got '{other}'"
            ))),
        }
    }
}

/// Recorded fringe pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    spec: GridSpec,
    intensity: Vec<f64>,
    wavelength: f64,
    carrier: Option<Carrier>,
    label: Option<SidebandLabel>,
}

impl Interferogram {
    pub fn new(
        spec: GridSpec,
        intensity: Vec<f64>,
        wavelength: f64,
        carrier: Option<Carrier>,
    ) -> Result<Self> {
        if intensity.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a {}x{} grid",
                intensity.len(),
                spec.nx(),
                spec.ny()
            )));
        }
        if let Some(v) = intensity.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "intensity must be finite and non-negative, found {v}"
            )));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidArgument(format!("wavelength {wavelength:e}")));
        }
        if let Some(c) = carrier {
            check_nyquist(&spec, c, wavelength)?;
        }
        Ok(Self {
            spec,
            intensity,
            wavelength,
            carrier,
            label: None,
        })
    }

    pub fn with_label(mut self, label: SidebandLabel) -> Self {
        self.label = Some(label);
        self
    }

    /// Same pattern with the carrier metadata dropped or replaced.
    pub fn with_carrier(mut self, carrier: Option<Carrier>) -> Result<Self> {
        if let Some(c) = carrier {
            check_nyquist(&self.spec, c, self.wavelength)?;
        }
        self.carrier = carrier;
        Ok(self)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn intensity(&self) -> &[f64] {
        &self.intensity
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn carrier(&self) -> Option<Carrier> {
        self.carrier
    }

    pub fn label(&self) -> Option<SidebandLabel> {
        self.label
    }

    /// Left-right mirror image (`x -> -x`); the carrier metadata is
    /// mirrored with it.
    pub fn flipped_x(&self) -> Self {
        self.mirrored(true)
    }

    /// Top-bottom mirror image (`y -> -y`).
    pub fn flipped_y(&self) -> Self {
        self.mirrored(false)
    }

    fn mirrored(&self, along_x: bool) -> Self {
        let (nx, ny) = (self.spec.nx(), self.spec.ny());
        let mut out = vec![0.0; self.intensity.len()];
        for j in 0..ny {
            for i in 0..nx {
                let (ti, tj) = if along_x { ((nx - i) % nx, j) } else { (i, (ny - j) % ny) };
                out[tj * nx + ti] = self.intensity[j * nx + i];
            }
        }
        let carrier = self.carrier.map(|c| {
            if along_x {
                Carrier { angle_x: -c.angle_x, ..c }
            } else {
                Carrier { angle_y: -c.angle_y, ..c }
            }
        });
        Self {
            intensity: out,
            carrier,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Circulation,
    ForkCount,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Circulation => "circulation",
            Self::ForkCount => "fork_count",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeReading {
    pub ell: i64,
    /// In `[0, 1]`.
    pub confidence: f64,
    pub method: Method,
    /// Set when the underlying measurement was ambiguous.
    pub flagged: bool,
}

/// Pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl Region {
    pub fn full(spec: &GridSpec) -> Self {
        Self {
            x0: 0,
            y0: 0,
            width: spec.nx(),
            height: spec.ny(),
        }
    }

    /// Square of half-width `half` pixels around the grid center.
    pub fn centered(spec: &GridSpec, half: usize) -> Self {
        let (cx, cy) = (spec.nx() / 2, spec.ny() / 2);
        let x0 = cx.saturating_sub(half);
        let y0 = cy.saturating_sub(half);
        Self {
            x0,
            y0,
            width: (cx + half).min(spec.nx()) - x0,
            height: (cy + half).min(spec.ny()) - y0,
        }
    }

    fn contains(&self, i: usize, j: usize) -> bool {
        i >= self.x0 && i < self.x0 + self.width && j >= self.y0 && j < self.y0 + self.height
    }
}

/// `|vortex + translate(reference, offset_y) exp(i k x sin(tilt))|^2`.
///
/// The translation is a Fourier shift, so the reference wraps around the
/// periodic window.
pub fn synthesize_interferogram(
    vortex: &ComplexFieldGrid,
    reference: &ComplexFieldGrid,
    tilt: f64,
    offset_y: f64,
) -> Result<Interferogram> {
    vortex.ensure_same_grid(reference)?;
    vortex.ensure_same_wavelength(reference)?;
    let spec = *vortex.spec();
    let carrier = Carrier::along_x(tilt);
    check_nyquist(&spec, carrier, vortex.wavelength())?;

    let shifted = translate_y(reference, offset_y);
    let kx = 2.0 * PI * carrier.frequency(vortex.wavelength()).0;
    let intensity = spec
        .coords()
        .zip(vortex.values().iter().zip(&shifted))
        .map(|((x, _), (v, r))| (v + r * Complex64::from_polar(1.0, kx * x)).norm_sqr())
        .collect();
    Interferogram::new(spec, intensity, vortex.wavelength(), Some(carrier))
}

fn translate_y(field: &ComplexFieldGrid, offset: f64) -> Vec<Complex64> {
    if offset == 0.0 {
        return field.values().to_vec();
    }
    let spec = field.spec();
    let (nx, ny) = (spec.nx(), spec.ny());
    let mut buf = field.values().to_vec();
    fft2(nx, ny, &mut buf);
    for j in 0..ny {
        let ramp = Complex64::from_polar(1.0, -2.0 * PI * frequency(j, ny, spec.dy()) * offset);
        buf[j * nx..(j + 1) * nx].iter_mut().for_each(|v| *v *= ramp);
    }
    ifft2(nx, ny, &mut buf);
    buf
}

/// The carrier must sit inside the band with room for the lobe around it.
fn check_nyquist(spec: &GridSpec, carrier: Carrier, wavelength: f64) -> Result<()> {
    let (fx, fy) = carrier.frequency(wavelength);
    let (nyq_x, nyq_y) = (0.5 / spec.dx(), 0.5 / spec.dy());
    if fx.abs() >= nyq_x || fy.abs() >= nyq_y {
        return Err(Error::Nyquist(format!(
            "carrier ({fx:e}, {fy:e}) cycles/m exceeds Nyquist ({nyq_x:e}, {nyq_y:e})"
        )));
    }
    Ok(())
}
