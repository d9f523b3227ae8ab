//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Unknown keys are rejected.
//! Command-line `--set key=value` overrides go through the same parser.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use raman_vortex::beam::GridSpec;
use raman_vortex::interferometry::PanelSetup;
use raman_vortex::optics::CrossingSetup;
use raman_vortex::raman::{label_range, AmplitudeModel, RamanConfig, SidebandLabel};
use raman_vortex::units::{omega_from_wavelength, omega_from_wavenumber_cm};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub pump_wavelength_nm: f64,
    pub raman_shift_cm: f64,
    /// Explicit Stokes wavelength; otherwise pump minus the Raman shift.
    pub stokes_wavelength_nm: Option<f64>,
    /// Pump charge at the crystal.
    pub ell: i64,
    /// Fold mirror in the pump path.
    pub m5_in: bool,
    pub ell_p: Option<i64>,
    pub ell_s: Option<i64>,
    pub grid: usize,
    pub pitch_um: f64,
    pub waist_um: f64,
    pub tilt_deg: f64,
    pub detect_rayleigh: f64,
    pub offset_um: Option<f64>,
    pub orders: Vec<SidebandLabel>,
    pub max_as: u32,
    pub max_s: u32,
    pub amplitude_model: AmplitudeModel,
    pub noise: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub comb_channels: usize,
    pub match_delay: bool,
    pub chirp_rate: Option<f64>,
    pub delay_fs: f64,
    pub pulse_tau_fs: f64,
    pub time_samples: usize,
    pub time_step_fs: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pump_wavelength_nm: 800.0,
            raman_shift_cm: 320.0,
            stokes_wavelength_nm: None,
            ell: 1,
            m5_in: false,
            ell_p: None,
            ell_s: None,
            grid: 512,
            pitch_um: 3.0,
            waist_um: 32.0,
            tilt_deg: 3.0,
            detect_rayleigh: 2.0,
            offset_um: None,
            orders: label_range(SidebandLabel::AntiStokes(2), SidebandLabel::StokesOrder(2)),
            max_as: 20,
            max_s: 20,
            amplitude_model: AmplitudeModel::default(),
            noise: 0.0,
            seed: 0,
            output_dir: PathBuf::from("out"),
            comb_channels: 5,
            match_delay: true,
            chirp_rate: None,
            delay_fs: 0.0,
            pulse_tau_fs: 400.0,
            time_samples: 16384,
            time_step_fs: 0.5,
        }
    }
}

pub const KEYS: &[&str] = &[
    "pump_wavelength_nm",
    "raman_shift_cm",
    "stokes_wavelength_nm",
    "ell",
    "m5_in",
    "ell_p",
    "ell_s",
    "grid",
    "pitch_um",
    "waist_um",
    "tilt_deg",
    "detect_rayleigh",
    "offset_um",
    "orders",
    "max_as",
    "max_s",
    "amplitude_model",
    "noise",
    "seed",
    "output_dir",
    "comb_channels",
    "match",
    "chirp_rate",
    "delay_fs",
    "pulse_tau_fs",
    "time_samples",
    "time_step_fs",
];

impl RunConfig {
    /// Defaults, then the file (if any), then `overrides`, then validation.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            cfg.apply_text(&text)?;
        }
        for item in overrides {
            let (key, value) = item.split_once('=').ok_or_else(|| {
                CliError::config(item.trim(), None, "override must look like key=value")
            })?;
            cfg.set(key.trim(), value.trim(), None)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| CliError::Syntax {
                line,
                message: format!("expected key = value, found '{content}'"),
            })?;
            self.set(key.trim(), value.trim(), Some(line))?;
        }
        Ok(())
    }

    /// Assign one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), CliError> {
        let bad = |msg: String| CliError::config(key, line, msg);
        fn num<T: FromStr>(value: &str) -> Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("cannot parse '{value}' as a number"))
        }
        fn opt<T: FromStr>(value: &str) -> Result<Option<T>, String> {
            if value.is_empty() || value.eq_ignore_ascii_case("auto") {
                Ok(None)
            } else {
                num(value).map(Some)
            }
        }
        match key {
            "pump_wavelength_nm" => self.pump_wavelength_nm = num(value).map_err(bad)?,
            "raman_shift_cm" => self.raman_shift_cm = num(value).map_err(bad)?,
            "stokes_wavelength_nm" => self.stokes_wavelength_nm = opt(value).map_err(bad)?,
            "ell" => self.ell = num(value).map_err(bad)?,
            "m5_in" => self.m5_in = parse_bool(value).map_err(bad)?,
            "ell_p" => self.ell_p = opt(value).map_err(bad)?,
            "ell_s" => self.ell_s = opt(value).map_err(bad)?,
            "grid" => self.grid = num(value).map_err(bad)?,
            "pitch_um" => self.pitch_um = num(value).map_err(bad)?,
            "waist_um" => self.waist_um = num(value).map_err(bad)?,
            "tilt_deg" => self.tilt_deg = num(value).map_err(bad)?,
            "detect_rayleigh" => self.detect_rayleigh = num(value).map_err(bad)?,
            "offset_um" => self.offset_um = opt(value).map_err(bad)?,
            "orders" => self.orders = parse_orders(value).map_err(bad)?,
            "max_as" => self.max_as = num(value).map_err(bad)?,
            "max_s" => self.max_s = num(value).map_err(bad)?,
            "amplitude_model" => {
                self.amplitude_model = value.parse().map_err(|e| bad(format!("{e}")))?
            }
            "noise" => self.noise = num(value).map_err(bad)?,
            "seed" => self.seed = num(value).map_err(bad)?,
            "output_dir" => {
                if value.is_empty() {
                    return Err(bad("must not be empty".into()));
                }
                self.output_dir = PathBuf::from(value)
            }
            "comb_channels" => self.comb_channels = num(value).map_err(bad)?,
            "match" => self.match_delay = parse_bool(value).map_err(bad)?,
            "chirp_rate" => self.chirp_rate = opt(value).map_err(bad)?,
            "delay_fs" => self.delay_fs = num(value).map_err(bad)?,
            "pulse_tau_fs" => self.pulse_tau_fs = num(value).map_err(bad)?,
            "time_samples" => self.time_samples = num(value).map_err(bad)?,
            "time_step_fs" => self.time_step_fs = num(value).map_err(bad)?,
            _ => {
                return Err(CliError::config(
                    key,
                    line,
                    format!("unknown key; expected one of {}", KEYS.join(", ")),
                ))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |key: &str, msg: String| Err(CliError::config(key, None, msg));
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                fail(key, format!("must be positive, got {v}"))
            }
        };
        positive("pump_wavelength_nm", self.pump_wavelength_nm)?;
        positive("raman_shift_cm", self.raman_shift_cm)?;
        if self.raman_shift_cm >= 1e7 / self.pump_wavelength_nm {
            return fail(
                "raman_shift_cm",
                format!(
                    "{} cm^-1 is not below the pump wavenumber {:.1} cm^-1",
                    self.raman_shift_cm,
                    1e7 / self.pump_wavelength_nm
                ),
            );
        }
        if let Some(s) = self.stokes_wavelength_nm {
            positive("stokes_wavelength_nm", s)?;
            if s <= self.pump_wavelength_nm {
                return fail(
                    "stokes_wavelength_nm",
                    format!("must be longer than the pump wavelength, got {s}"),
                );
            }
        }
        if self.ell_p.is_some() != self.ell_s.is_some() {
            let key = if self.ell_p.is_some() { "ell_s" } else { "ell_p" };
            return fail(key, "ell_p and ell_s must be given together".into());
        }
        if self.grid < 32 || !self.grid.is_multiple_of(2) {
            return fail("grid", format!("must be even and at least 32, got {}", self.grid));
        }
        positive("pitch_um", self.pitch_um)?;
        positive("waist_um", self.waist_um)?;
        if !(self.tilt_deg.abs() > 0.0 && self.tilt_deg.abs() < 90.0) {
            return fail("tilt_deg", format!("must be nonzero and below 90, got {}", self.tilt_deg));
        }
        if !(self.detect_rayleigh >= 0.0 && self.detect_rayleigh.is_finite()) {
            return fail("detect_rayleigh", format!("must be >= 0, got {}", self.detect_rayleigh));
        }
        if let Some(o) = self.offset_um {
            if !o.is_finite() {
                return fail("offset_um", format!("must be finite, got {o}"));
            }
        }
        if self.orders.is_empty() {
            return fail("orders", "no orders given".into());
        }
        if !(self.noise >= 0.0 && self.noise < 1.0) {
            return fail("noise", format!("must lie in [0, 1), got {}", self.noise));
        }
        if self.comb_channels == 0 {
            return fail("comb_channels", "must be at least 1".into());
        }
        if let Some(b) = self.chirp_rate {
            positive("chirp_rate", b)?;
        }
        if !(self.delay_fs >= 0.0 && self.delay_fs.is_finite()) {
            return fail("delay_fs", format!("must be >= 0, got {}", self.delay_fs));
        }
        positive("pulse_tau_fs", self.pulse_tau_fs)?;
        if self.time_samples < 64 {
            return fail("time_samples", format!("must be at least 64, got {}", self.time_samples));
        }
        positive("time_step_fs", self.time_step_fs)?;
        Ok(())
    }

    /// Ladder description with the charges set by either the explicit
    /// `ell_p`/`ell_s` pair or the beam-crossing geometry.
    pub fn raman(&self) -> Result<RamanConfig, CliError> {
        let omega_p = omega_from_wavelength(self.pump_wavelength_nm * 1e-9);
        let omega_r = omega_from_wavenumber_cm(self.raman_shift_cm);
        let omega_s = match self.stokes_wavelength_nm {
            Some(nm) => omega_from_wavelength(nm * 1e-9),
            None => omega_p - omega_r,
        };
        let (ell_p, ell_s) = match (self.ell_p, self.ell_s) {
            (Some(p), Some(s)) => (p, s),
            _ => {
                let setup = CrossingSetup {
                    fold_mirror_in: self.m5_in,
                };
                setup.charges_at_crystal(setup.input_for_pump_charge(self.ell))
            }
        };
        Ok(RamanConfig::new(
            omega_p, omega_s, ell_p, ell_s, omega_r, self.max_as, self.max_s,
        )?)
    }

    pub fn panel(&self) -> Result<PanelSetup, CliError> {
        Ok(PanelSetup {
            spec: GridSpec::square(self.grid, self.pitch_um * 1e-6)?,
            waist: self.waist_um * 1e-6,
            tilt: self.tilt_deg.to_radians(),
            detect_rayleigh: self.detect_rayleigh,
            offset_y: self.offset_um.map(|o| o * 1e-6),
        })
    }

    /// Canonical text form of everything except the output location; parsing
    /// it (with the same output directory) yields the same configuration.
    pub fn render(&self) -> String {
        fn o<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
        }
        let orders: Vec<String> = self.orders.iter().map(|l| l.to_string()).collect();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("pump_wavelength_nm", self.pump_wavelength_nm.to_string());
        kv("raman_shift_cm", self.raman_shift_cm.to_string());
        kv("stokes_wavelength_nm", o(&self.stokes_wavelength_nm));
        kv("ell", self.ell.to_string());
        kv("m5_in", self.m5_in.to_string());
        kv("ell_p", o(&self.ell_p));
        kv("ell_s", o(&self.ell_s));
        kv("grid", self.grid.to_string());
        kv("pitch_um", self.pitch_um.to_string());
        kv("waist_um", self.waist_um.to_string());
        kv("tilt_deg", self.tilt_deg.to_string());
        kv("detect_rayleigh", self.detect_rayleigh.to_string());
        kv("offset_um", o(&self.offset_um));
        kv("orders", orders.join(","));
        kv("max_as", self.max_as.to_string());
        kv("max_s", self.max_s.to_string());
        kv("amplitude_model", self.amplitude_model.to_string());
        kv("noise", self.noise.to_string());
        kv("seed", self.seed.to_string());
        kv("comb_channels", self.comb_channels.to_string());
        kv("match", self.match_delay.to_string());
        kv("chirp_rate", o(&self.chirp_rate));
        kv("delay_fs", self.delay_fs.to_string());
        kv("pulse_tau_fs", self.pulse_tau_fs.to_string());
        kv("time_samples", self.time_samples.to_string());
        kv("time_step_fs", self.time_step_fs.to_string());
        s
    }
}

fn parse_bool(value: &str) -> Result<bool, String> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("expected true or false, got '{value}'")),
    }
}

/// `AS2..S2` (inclusive range along the ladder) or a comma list `AS1,P,S`.
fn parse_orders(value: &str) -> Result<Vec<SidebandLabel>, String> {
    let label = |s: &str| s.trim().parse::<SidebandLabel>().map_err(|e| e.to_string());
    if let Some((a, b)) = value.split_once("..") {
        return Ok(label_range(label(a)?, label(b)?));
    }
    let labels = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(label)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(labels)
}
