//! The cascaded Raman sideband ladder.
//!
//! Every comb line is addressed by a signed ladder index `k`: Stokes is 0,
//! the pump is 1, anti-Stokes order `n` is `n + 1` and Stokes order `n` is
//! `-n`. Frequency and topological charge are both affine in `k`:
//!
//! ```text
//! omega(k) = omega_s + k (omega_p - omega_s)
//! ell(k)   = ell_s   + k (ell_p   - ell_s)
//! ```
//!
//! because each step up the ladder adds one pump phase and removes one
//! Stokes phase. [`cascade_phase_recursion`] rebuilds the same numbers by
//! iterating that phase arithmetic literally, one order at a time.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::beam::ComplexFieldGrid;
use crate::error::{Error, Result};
use crate::units::{omega_from_wavelength, wavelength_from_omega};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SidebandLabel {
    Pump,
    Stokes,
    /// Anti-Stokes order `n >= 1`.
    AntiStokes(u32),
    /// Stokes order `n >= 1`.
    StokesOrder(u32),
}

impl SidebandLabel {
    pub fn ladder_index(&self) -> LadderIndex {
        LadderIndex(match *self {
            Self::Stokes => 0,
            Self::Pump => 1,
            Self::AntiStokes(n) => n as i64 + 1,
            Self::StokesOrder(n) => -(n as i64),
        })
    }

    pub fn from_index(k: LadderIndex) -> Self {
        match k.0 {
            0 => Self::Stokes,
            1 => Self::Pump,
            k if k > 1 => Self::AntiStokes((k - 1) as u32),
            k => Self::StokesOrder((-k) as u32),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::AntiStokes(0) | Self::StokesOrder(0) => Err(Error::InvalidArgument(
                "sideband orders start at 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SidebandLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pump => write!(f, "P"),
            Self::Stokes => write!(f, "S"),
            Self::AntiStokes(n) => write!(f, "AS{n}"),
            Self::StokesOrder(n) => write!(f, "S{n}"),
        }
    }
}

impl FromStr for SidebandLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown sideband label '{s}'"));
        let t = s.trim().to_ascii_uppercase();
        let label = match t.as_str() {
            "P" => Self::Pump,
            "S" => Self::Stokes,
            _ if t.starts_with("AS") => Self::AntiStokes(t[2..].parse().map_err(|_| bad())?),
            _ if t.starts_with('S') => Self::StokesOrder(t[1..].parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        label.validate().map_err(|_| bad())?;
        Ok(label)
    }
}

/// Signed position on the sideband ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LadderIndex(pub i64);

impl From<SidebandLabel> for LadderIndex {
    fn from(label: SidebandLabel) -> Self {
        label.ladder_index()
    }
}

/// Pump/Stokes pair driving the cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamanConfig {
    pub omega_p: f64,
    pub omega_s: f64,
    pub ell_p: i64,
    pub ell_s: i64,
    /// Raman mode angular frequency.
    pub omega_r: f64,
    pub max_as: u32,
    pub max_s: u32,
}

/// Default tolerated `|(omega_p - omega_s) - omega_R| / omega_R`.
pub const DEFAULT_DETUNING_TOLERANCE: f64 = 0.1;

impl RamanConfig {
    pub fn new(
        omega_p: f64,
        omega_s: f64,
        ell_p: i64,
        ell_s: i64,
        omega_r: f64,
        max_as: u32,
        max_s: u32,
    ) -> Result<Self> {
        if !(omega_s > 0.0 && omega_p > omega_s && omega_p.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need omega_p > omega_s > 0, got {omega_p:e}, {omega_s:e}"
            )));
        }
        if !(omega_r > 0.0 && omega_r.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Raman frequency must be positive, got {omega_r:e}"
            )));
        }
        Ok(Self {
            omega_p,
            omega_s,
            ell_p,
            ell_s,
            omega_r,
            max_as,
            max_s,
        })
    }

    /// Pump at `pump_wavelength` with the Stokes pulse exactly one Raman
    /// quantum below it.
    pub fn from_pump_and_shift(
        pump_wavelength: f64,
        omega_r: f64,
        ell_p: i64,
        ell_s: i64,
        max_as: u32,
        max_s: u32,
    ) -> Result<Self> {
        let omega_p = omega_from_wavelength(pump_wavelength);
        Self::new(omega_p, omega_p - omega_r, ell_p, ell_s, omega_r, max_as, max_s)
    }

    pub fn with_charges(self, ell_p: i64, ell_s: i64) -> Self {
        Self {
            ell_p,
            ell_s,
            ..self
        }
    }

    /// Relative mismatch between the pump-Stokes difference and the Raman
    /// mode.
    pub fn detuning(&self) -> f64 {
        ((self.omega_p - self.omega_s) - self.omega_r).abs() / self.omega_r
    }

    pub fn is_detuned(&self, tolerance: f64) -> bool {
        self.detuning() > tolerance
    }

    pub fn spacing(&self) -> f64 {
        self.omega_p - self.omega_s
    }
}

/// `omega_s + k (omega_p - omega_s)`.
pub fn sideband_frequency(cfg: &RamanConfig, label: SidebandLabel) -> Result<f64> {
    label.validate()?;
    let k = label.ladder_index().0 as f64;
    let omega = cfg.omega_s + k * cfg.spacing();
    if omega > 0.0 {
        Ok(omega)
    } else {
        Err(Error::NegativeFrequency {
            label: label.to_string(),
            omega,
        })
    }
}

/// `ell_s + k (ell_p - ell_s)`.
pub fn sideband_charge(cfg: &RamanConfig, label: SidebandLabel) -> i64 {
    let k = label.ladder_index().0;
    cfg.ell_s + k * (cfg.ell_p - cfg.ell_s)
}

/// Phase of a comb line, `-omega t + ell theta`, kept as its two
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTerm {
    pub omega: f64,
    pub ell: i64,
}

impl Add for PhaseTerm {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            omega: self.omega + rhs.omega,
            ell: self.ell + rhs.ell,
        }
    }
}

impl Sub for PhaseTerm {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self {
            omega: self.omega - rhs.omega,
            ell: self.ell - rhs.ell,
        }
    }
}

/// Build `(omega, ell)` of a line by stepping through the cascade:
/// `AS1 = 2P - S`, `AS(n) = P + AS(n-1) - S`, and mirrored on the Stokes side
/// `S1 = 2S - P`, `S(n) = S + S(n-1) - P`.
pub fn cascade_phase_recursion(cfg: &RamanConfig, label: SidebandLabel) -> (f64, i64) {
    let pump = PhaseTerm {
        omega: cfg.omega_p,
        ell: cfg.ell_p,
    };
    let stokes = PhaseTerm {
        omega: cfg.omega_s,
        ell: cfg.ell_s,
    };
    let term = match label {
        SidebandLabel::Pump => pump,
        SidebandLabel::Stokes => stokes,
        SidebandLabel::AntiStokes(n) => {
            let mut phase = pump;
            for _ in 0..n {
                phase = pump + phase - stokes;
            }
            phase
        }
        SidebandLabel::StokesOrder(n) => {
            let mut phase = stokes;
            for _ in 0..n {
                phase = stokes + phase - pump;
            }
            phase
        }
    };
    (term.omega, term.ell)
}

/// `ell_n^S + ell_n^AS == ell_s + ell_p`.
pub fn conservation_check(cfg: &RamanConfig, n: u32) -> bool {
    let s = sideband_charge(cfg, SidebandLabel::StokesOrder(n));
    let a = sideband_charge(cfg, SidebandLabel::AntiStokes(n));
    s + a == cfg.ell_s + cfg.ell_p
}

/// Lowest-order spatial source term of a sideband.
///
/// The inputs are returned for `P` and `S`; otherwise anti-Stokes order `n`
/// is `u_p^(n+1) conj(u_s)^n` and Stokes order `n` is `u_s^(n+1)
/// conj(u_p)^n`, the field form of the phase recursion. The result has unit
/// power and carries the sideband wavelength implied by the two input
/// wavelengths. Thin-medium approximation: no propagation inside the
/// crystal.
pub fn spatial_sideband(
    pump: &ComplexFieldGrid,
    stokes: &ComplexFieldGrid,
    label: SidebandLabel,
) -> Result<ComplexFieldGrid> {
    label.validate()?;
    pump.ensure_same_grid(stokes)?;
    let omega_p = omega_from_wavelength(pump.wavelength());
    let omega_s = omega_from_wavelength(stokes.wavelength());
    let k = label.ladder_index().0;
    let omega = omega_s + k as f64 * (omega_p - omega_s);
    if omega <= 0.0 {
        return Err(Error::NegativeFrequency {
            label: label.to_string(),
            omega,
        });
    }

    // Peak-normalized inputs keep high powers in range and make the
    // degeneracy threshold dimensionless.
    let up = peak_normalized(pump.values())?;
    let us = peak_normalized(stokes.values())?;
    let (base, partner, n) = match label {
        SidebandLabel::Pump => (&up, &us, 0),
        SidebandLabel::Stokes => (&us, &up, 0),
        SidebandLabel::AntiStokes(n) => (&up, &us, n),
        SidebandLabel::StokesOrder(n) => (&us, &up, n),
    };
    let values: Vec<Complex64> = base
        .iter()
        .zip(partner)
        .map(|(b, q)| b.powu(n + 1) * q.conj().powu(n))
        .collect();

    let reference: f64 = up.iter().chain(&us).map(|v| v.norm_sqr()).sum::<f64>() * 0.5;
    let produced: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    if !(produced > 1e-12 * reference) {
        return Err(Error::DegenerateOverlap);
    }
    let field = ComplexFieldGrid::new(*pump.spec(), wavelength_from_omega(omega), values)?;
    Ok(field.normalized())
}

fn peak_normalized(values: &[Complex64]) -> Result<Vec<Complex64>> {
    let peak = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::DegenerateOverlap);
    }
    Ok(values.iter().map(|v| v / peak).collect())
}

/// Per-line amplitude assignment for [`build_comb`]. There is no physics
/// claim behind either model; conversion efficiencies are configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeModel {
    Uniform,
    /// Each step away from the pump (anti-Stokes side) or the Stokes line
    /// (Stokes side) multiplies the amplitude by `ratio`.
    Geometric(f64),
}

impl Default for AmplitudeModel {
    fn default() -> Self {
        Self::Geometric(0.6)
    }
}

impl AmplitudeModel {
    pub fn amplitude(&self, k: LadderIndex) -> f64 {
        match *self {
            Self::Uniform => 1.0,
            Self::Geometric(g) => {
                let steps = if k.0 >= 1 { k.0 - 1 } else { -k.0 };
                g.powi(steps as i32)
            }
        }
    }
}

impl fmt::Display for AmplitudeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Geometric(g) => write!(f, "geometric:{g}"),
        }
    }
}

impl FromStr for AmplitudeModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "uniform" {
            return Ok(Self::Uniform);
        }
        let ratio = t
            .strip_prefix("geometric")
            .map(|r| r.trim_start_matches([':', '(']).trim_end_matches(')'))
            .and_then(|r| r.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown amplitude model '{s}'")))?;
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "geometric ratio must be positive, got {ratio}"
            )));
        }
        Ok(Self::Geometric(ratio))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombChannel {
    pub label: SidebandLabel,
    pub index: LadderIndex,
    pub omega: f64,
    pub ell: i64,
    pub amplitude: Complex64,
}

/// Comb lines sorted by ladder index.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralComb {
    channels: Vec<CombChannel>,
}

impl SpectralComb {
    /// Build from channels; sorts them and checks the ladder ordering.
    pub fn from_channels(mut channels: Vec<CombChannel>) -> Result<Self> {
        channels.sort_by_key(|c| c.index);
        if channels
            .windows(2)
            .any(|w| w[0].index == w[1].index || w[0].omega >= w[1].omega)
        {
            return Err(Error::InvalidArgument(
                "comb channels must have distinct indices and increasing frequency".into(),
            ));
        }
        Ok(Self { channels })
    }

    pub fn channels(&self) -> &[CombChannel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn get(&self, label: SidebandLabel) -> Option<&CombChannel> {
        let k = label.ladder_index();
        self.channels.iter().find(|c| c.index == k)
    }

    /// Sub-comb of the channels whose ladder index lies in `range`.
    pub fn slice(&self, range: std::ops::RangeInclusive<i64>) -> Self {
        Self {
            channels: self
                .channels
                .iter()
                .filter(|c| range.contains(&c.index.0))
                .cloned()
                .collect(),
        }
    }
}

/// Lines `S_max_s .. S, P .. AS_max_as` with closed-form frequencies and
/// charges.
pub fn build_comb(cfg: &RamanConfig, model: AmplitudeModel) -> Result<SpectralComb> {
    let lo = -(cfg.max_s as i64);
    let hi = cfg.max_as as i64 + 1;
    let channels = (lo..=hi)
        .map(|k| {
            let index = LadderIndex(k);
            let label = SidebandLabel::from_index(index);
            Ok(CombChannel {
                label,
                index,
                omega: sideband_frequency(cfg, label)?,
                ell: sideband_charge(cfg, label),
                amplitude: Complex64::new(model.amplitude(index), 0.0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralComb::from_channels(channels)
}

/// Labels from `first` to `last` inclusive, walking the ladder in whichever
/// direction joins them.
pub fn label_range(first: SidebandLabel, last: SidebandLabel) -> Vec<SidebandLabel> {
    let (a, b) = (first.ladder_index().0, last.ladder_index().0);
    let ks: Vec<i64> = if a <= b {
        (a..=b).collect()
    } else {
        (b..=a).rev().collect()
    };
    ks.into_iter()
        .map(|k| SidebandLabel::from_index(LadderIndex(k)))
        .collect()
}
