use num_complex::Complex64;

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Sampling of the transverse plane.
///
/// Sample `(i, j)` sits at `x = (i - nx/2) dx`, `y = (j - ny/2) dy`, so the
/// optical axis passes through sample `(nx/2, ny/2)`. Buffers are row-major
/// with `j` selecting the row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidGrid(format!(
                "need at least 8x8 samples, got {nx}x{ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "pitch must be positive and finite, got dx={dx}, dy={dy}"
            )));
        }
        Ok(Self { nx, ny, dx, dy })
    }

    /// Square grid with equal pitch on both axes.
    pub fn square(n: usize, pitch: f64) -> Result<Self> {
        Self::new(n, n, pitch, pitch)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Distance from the optical axis to the nearest grid edge.
    pub fn half_aperture(&self) -> f64 {
        let hx = (self.nx / 2 - 1) as f64 * self.dx;
        let hy = (self.ny / 2 - 1) as f64 * self.dy;
        hx.min(hy)
    }

    /// Iterator over `(x, y)` sample coordinates in buffer order.
    pub fn coords(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| (self.x(i), self.y(j))))
    }
}

/// Sampled transverse complex amplitude of a monochromatic beam.
///
/// Power is `sum |u|^2 dx dy` in arbitrary units.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFieldGrid {
    spec: GridSpec,
    wavelength: f64,
    values: Vec<Complex64>,
}

impl ComplexFieldGrid {
    pub fn new(spec: GridSpec, wavelength: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        check_wavelength(wavelength)?;
        let field = Self {
            spec,
            wavelength,
            values,
        };
        if !field.power().is_finite() {
            return Err(Error::InvalidArgument("field power is not finite".into()));
        }
        Ok(field)
    }

    /// Sample `f(x, y)` on every grid point.
    pub fn from_fn(
        spec: GridSpec,
        wavelength: f64,
        f: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let values = spec.coords().map(|(x, y)| f(x, y)).collect();
        Self::new(spec, wavelength, values)
    }

    /// Uniform unit-amplitude plane wave along the axis.
    pub fn plane_wave(spec: GridSpec, wavelength: f64) -> Result<Self> {
        Self::new(spec, wavelength, vec![Complex64::new(1.0, 0.0); spec.len()])
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.spec.index(i, j)]
    }

    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.cell_area()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Copy scaled to unit power. A field without power is returned unchanged.
    pub fn normalized(&self) -> Self {
        let p = self.power();
        if p > 0.0 {
            self.scaled(1.0 / p.sqrt())
        } else {
            self.clone()
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|_, _, v| v * factor)
    }

    /// Re-tag the field with another wavelength without touching samples.
    pub fn with_wavelength(&self, wavelength: f64) -> Result<Self> {
        check_wavelength(wavelength)?;
        Ok(Self {
            wavelength,
            ..self.clone()
        })
    }

    /// Apply `f(x, y, u)` to every sample.
    pub fn map(&self, f: impl Fn(f64, f64, Complex64) -> Complex64) -> Self {
        let values = self
            .spec
            .coords()
            .zip(&self.values)
            .map(|((x, y), v)| f(x, y, *v))
            .collect();
        Self {
            spec: self.spec,
            wavelength: self.wavelength,
            values,
        }
    }

    /// Pointwise product; the result keeps `self`'s wavelength.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    /// Pointwise sum; both fields must share grid and wavelength.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        self.ensure_same_wavelength(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }

    /// Discrete inner product `<self | other> = sum conj(self) other dx dy`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.ensure_same_grid(other)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.spec.cell_area())
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn ensure_same_wavelength(&self, other: &Self) -> Result<()> {
        if same_wavelength(self.wavelength, other.wavelength) {
            Ok(())
        } else {
            Err(Error::WavelengthMismatch {
                a: self.wavelength,
                b: other.wavelength,
            })
        }
    }

    pub(crate) fn from_parts(spec: GridSpec, wavelength: f64, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self {
            spec,
            wavelength,
            values,
        }
    }
}

pub(crate) fn same_wavelength(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

fn check_wavelength(wavelength: f64) -> Result<()> {
    if wavelength > 0.0 && wavelength.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "wavelength must be positive, got {wavelength}"
        )))
    }
}
