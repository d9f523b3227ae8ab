//! CSV tables with fixed column formats and LF line endings.

use std::fmt::Write as _;

use raman_vortex::interferometry::ChargeReading;
use raman_vortex::raman::SpectralComb;
use raman_vortex::units::{terahertz_from_omega, wavelength_from_omega};

/// Quote a field when it holds a comma, quote or line break.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn comb_csv(comb: &SpectralComb) -> String {
    let mut out = String::from("label,k,wavelength_nm,frequency_THz,ell\n");
    for c in comb.channels() {
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.6},{}",
            c.label,
            c.index.0,
            wavelength_from_omega(c.omega) * 1e9,
            terahertz_from_omega(c.omega),
            c.ell
        );
    }
    out
}

/// One row of `readings.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadingRow {
    pub label: String,
    pub k: i64,
    pub expected_ell: i64,
    pub outcome: Result<ChargeReading, String>,
}

impl ReadingRow {
    pub fn status(&self) -> String {
        match &self.outcome {
            Ok(r) if r.flagged => "flagged".into(),
            Ok(r) if r.ell != self.expected_ell => "mismatch".into(),
            Ok(_) => "ok".into(),
            Err(e) => format!("error: {e}"),
        }
    }

    pub fn failed(&self) -> bool {
        !matches!(&self.outcome, Ok(r) if r.ell == self.expected_ell)
    }
}

pub fn readings_csv(rows: &[ReadingRow]) -> String {
    let mut out = String::from("label,k,expected_ell,ell,confidence,method,status\n");
    for row in rows {
        let (ell, conf, method) = match &row.outcome {
            Ok(r) => (r.ell.to_string(), format!("{:.4}", r.confidence), r.method.to_string()),
            Err(_) => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            field(&row.label),
            row.k,
            row.expected_ell,
            ell,
            conf,
            method,
            field(&row.status())
        );
    }
    out
}

pub fn series_csv(dt: f64, t0: f64, values: &[f64]) -> String {
    let mut out = String::with_capacity(32 * (values.len() + 1));
    out.push_str("t_seconds,intensity\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{:.6e},{:.9e}", t0 + i as f64 * dt, v);
    }
    out
}
