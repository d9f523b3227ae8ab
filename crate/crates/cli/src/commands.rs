//! The four subcommands. Each returns a report for stdout and writes its
//! files under the configured output directory.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use raman_vortex::beam::GridSpec;
use raman_vortex::interferometry::{
    analyze_fig3_panel, extract_charge, extract_charge_with_hint, Carrier, CarrierHint,
    ChargeReading, Interferogram,
};
use raman_vortex::pulse::{
    beat_frequency, chirped_pair_field, synthesize_waveform, train_period, ChirpedPulsePair,
    TimeGrid,
};
use raman_vortex::raman::{build_comb, RamanConfig, SidebandLabel, SpectralComb, DEFAULT_DETUNING_TOLERANCE};
use raman_vortex::Error;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::pgm::PgmImage;
use crate::table::{comb_csv, readings_csv, series_csv, ReadingRow};

const FS: f64 = 1e-15;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub warnings: Vec<String>,
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    Ok(dir)
}

fn detuning_warning(raman: &RamanConfig) -> Vec<String> {
    if raman.is_detuned(DEFAULT_DETUNING_TOLERANCE) {
        vec![format!(
            "pump-Stokes spacing is detuned from the Raman shift by {:.1}%",
            100.0 * raman.detuning()
        )]
    } else {
        Vec::new()
    }
}

/// Full ladder listing, written to `comb.csv` and echoed to stdout.
pub fn comb(cfg: &RunConfig) -> Result<Report, CliError> {
    let raman = cfg.raman()?;
    let comb = build_comb(&raman, cfg.amplitude_model)?;
    let csv = comb_csv(&comb);
    write_file(&output_dir(cfg)?.join("comb.csv"), &csv)?;
    Ok(Report {
        stdout: csv,
        warnings: detuning_warning(&raman),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure3Report {
    pub rows: Vec<ReadingRow>,
    pub report: Report,
}

impl Figure3Report {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(ReadingRow::failed)
    }
}

/// Intensity and interferogram images plus the charge readout for every
/// configured order.
pub fn figure3(cfg: &RunConfig) -> Result<Figure3Report, CliError> {
    let raman = cfg.raman()?;
    let setup = cfg.panel()?;
    let dir = output_dir(cfg)?;
    let results = analyze_fig3_panel(&raman, &setup, &cfg.orders);

    let mut rows = Vec::with_capacity(results.len());
    let mut stdout = String::new();
    for (label, result) in cfg.orders.iter().zip(results) {
        let k = label.ladder_index().0;
        let expected_ell = raman_vortex::raman::sideband_charge(&raman, *label);
        let outcome = match result {
            Ok(entry) => {
                let gram = if cfg.noise > 0.0 {
                    with_noise(&entry.interferogram, cfg.noise, order_seed(cfg.seed, k))?
                } else {
                    entry.interferogram
                };
                let reading = if cfg.noise > 0.0 {
                    extract_charge(&gram)
                } else {
                    entry.reading
                };
                let spec = setup.spec;
                let intensity = PgmImage::from_values(spec.nx(), spec.ny(), &entry.image);
                write_file(
                    &dir.join(format!("{label}_intensity.pgm")),
                    geometry_meta(intensity, &spec, entry.wavelength, *label).encode(),
                )?;
                write_file(
                    &dir.join(format!("{label}_interferogram.pgm")),
                    interferogram_image(&gram, *label).encode(),
                )?;
                Ok(reading)
            }
            Err(e) => Err(e.to_string()),
        };
        let name = label.to_string();
        let row = ReadingRow {
            label: label.to_string(),
            k,
            expected_ell,
            outcome,
        };
        match &row.outcome {
            Ok(r) => {
                let _ = writeln!(
                    stdout,
                    "{name:>4}  expected {:+}  read {:+}  confidence {:.3}  {}",
                    expected_ell,
                    r.ell,
                    r.confidence,
                    row.status()
                );
            }
            Err(e) => {
                let _ = writeln!(stdout, "{name:>4}  expected {expected_ell:+}  failed: {e}");
            }
        }
        rows.push(row);
    }
    write_file(&dir.join("readings.csv"), readings_csv(&rows))?;
    write_file(&dir.join("config.txt"), cfg.render())?;
    Ok(Figure3Report {
        rows,
        report: Report {
            stdout,
            warnings: detuning_warning(&raman),
        },
    })
}

/// Independent noise stream per ladder order, so results do not depend on
/// which orders run or in which order.
pub fn order_seed(seed: u64, k: i64) -> u64 {
    seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Additive Gaussian noise with standard deviation `level` times the peak
/// intensity, clipped at zero.
pub fn with_noise(gram: &Interferogram, level: f64, seed: u64) -> Result<Interferogram, CliError> {
    let peak = gram.intensity().iter().copied().fold(0.0, f64::max);
    let sigma = level * peak;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy: Vec<f64> = match Normal::new(0.0, sigma) {
        Ok(normal) if sigma > 0.0 => gram
            .intensity()
            .iter()
            .map(|v| (v + normal.sample(&mut rng)).max(0.0))
            .collect(),
        _ => gram.intensity().to_vec(),
    };
    let out = Interferogram::new(*gram.spec(), noisy, gram.wavelength(), gram.carrier())?;
    Ok(match gram.label() {
        Some(l) => out.with_label(l),
        None => out,
    })
}

fn geometry_meta(img: PgmImage, spec: &GridSpec, wavelength: f64, label: SidebandLabel) -> PgmImage {
    img.with_meta("dx", spec.dx())
        .with_meta("dy", spec.dy())
        .with_meta("wavelength", wavelength)
        .with_meta("label", label)
}

/// Quantized image of an interferogram with its geometry and carrier in the
/// header.
pub fn interferogram_image(gram: &Interferogram, label: SidebandLabel) -> PgmImage {
    let spec = gram.spec();
    let img = geometry_meta(
        PgmImage::from_values(spec.nx(), spec.ny(), gram.intensity()),
        spec,
        gram.wavelength(),
        label,
    );
    match gram.carrier() {
        Some(c) => img.with_meta("carrier_x", c.angle_x).with_meta("carrier_y", c.angle_y),
        None => img,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseReport {
    pub delay: f64,
    pub target_period: f64,
    /// `None` when the beat signal has no periodic structure.
    pub beat_period: Option<f64>,
    pub comb_labels: Vec<SidebandLabel>,
    pub comb_target_period: f64,
    pub comb_period: Option<f64>,
    pub report: Report,
}

/// Chirped-pair beat signal and the multi-line comb waveform.
pub fn pulse(cfg: &RunConfig) -> Result<PulseReport, CliError> {
    let raman = cfg.raman()?;
    let chirp = cfg
        .chirp_rate
        .ok_or_else(|| CliError::config("chirp_rate", None, "required by the pulse command (rad/s^2)"))?;
    let tau = cfg.pulse_tau_fs * FS;
    let pair = if cfg.match_delay {
        ChirpedPulsePair::matched(tau, chirp, raman.omega_r, raman.omega_p)?
    } else {
        ChirpedPulsePair::new(tau, chirp, cfg.delay_fs * FS, raman.omega_p)?
    };
    let grid = TimeGrid::new(cfg.time_samples, cfg.time_step_fs * FS)?;
    let dir = output_dir(cfg)?;
    let mut stdout = String::new();

    let target_period = 2.0 * PI / raman.omega_r;
    let beat: Vec<f64> = chirped_pair_field(&pair, &grid)?
        .iter()
        .map(|e| e.norm_sqr())
        .collect();
    write_file(&dir.join("beat.csv"), series_csv(grid.dt(), grid.t(0), &beat))?;
    let beat_period = periodic(train_period(&beat, grid.dt()))?;
    let _ = writeln!(
        stdout,
        "beat: delay {:.2} fs, chirp {:.4e} rad/s^2, beat frequency {:.4e} rad/s",
        pair.delay / FS,
        pair.chirp_rate,
        beat_frequency(&pair)
    );
    match beat_period {
        Some(p) => {
            let _ = writeln!(
                stdout,
                "beat period measured {:.3} fs, target {:.3} fs, error {:+.3}%",
                p / FS,
                target_period / FS,
                100.0 * (p / target_period - 1.0)
            );
        }
        None => stdout.push_str("beat: no periodic structure\n"),
    }

    let comb = comb_window(&raman, cfg)?;
    let comb_labels: Vec<SidebandLabel> = comb.channels().iter().map(|c| c.label).collect();
    let waveform = synthesize_waveform(&comb, &grid, &vec![0.0; comb.len()])?;
    write_file(&dir.join("waveform.csv"), series_csv(grid.dt(), grid.t(0), &waveform))?;
    let comb_target_period = 2.0 * PI / raman.spacing();
    let comb_period = periodic(train_period(&waveform, grid.dt()))?;
    let names: Vec<String> = comb_labels.iter().map(|l| l.to_string()).collect();
    match comb_period {
        Some(p) => {
            let _ = writeln!(
                stdout,
                "comb {}: period measured {:.3} fs, target {:.3} fs",
                names.join(","),
                p / FS,
                comb_target_period / FS
            );
        }
        None => {
            let _ = writeln!(stdout, "comb {}: no periodic structure", names.join(","));
        }
    }

    Ok(PulseReport {
        delay: pair.delay,
        target_period,
        beat_period,
        comb_labels,
        comb_target_period,
        comb_period,
        report: Report {
            stdout,
            warnings: detuning_warning(&raman),
        },
    })
}

fn periodic(result: raman_vortex::Result<f64>) -> Result<Option<f64>, CliError> {
    match result {
        Ok(p) => Ok(Some(p)),
        Err(Error::NoPeriodicity) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// `comb_channels` adjacent lines centered on the pump (the extra line of an
/// even count goes to the anti-Stokes side).
fn comb_window(raman: &RamanConfig, cfg: &RunConfig) -> Result<SpectralComb, CliError> {
    let n = cfg.comb_channels as i64;
    let lo = 1 - (n - 1) / 2;
    let hi = lo + n - 1;
    let comb = build_comb(raman, cfg.amplitude_model)?.slice(lo..=hi);
    if comb.len() as i64 != n {
        return Err(CliError::config(
            "comb_channels",
            None,
            format!("{n} channels need max_s >= {} and max_as >= {}", -lo, hi - 1),
        ));
    }
    Ok(comb)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeReport {
    pub reading: ChargeReading,
    pub report: Report,
}

/// Charge readout of a recorded interferogram. Header metadata supplies the
/// pitch, wavelength and carrier; an explicit hint discards any recorded
/// carrier and locates the lobe blind.
pub fn analyze(path: &Path, hint: Option<CarrierHint>) -> Result<AnalyzeReport, CliError> {
    let input = |message: String| CliError::Input {
        path: path.to_path_buf(),
        message,
    };
    let bytes = fs::read(path).map_err(|e| input(e.to_string()))?;
    let img = PgmImage::decode(&bytes).map_err(|e| input(e.to_string()))?;
    let meta = |key: &str| img.meta_f64(key).transpose().map_err(|e| input(e.to_string()));
    let dx = meta("dx")?.unwrap_or(1.0);
    let dy = meta("dy")?.unwrap_or(dx);
    let wavelength = meta("wavelength")?.unwrap_or(1.0);
    let carrier = match (meta("carrier_x")?, meta("carrier_y")?) {
        (None, None) => None,
        (x, y) => Some(Carrier {
            angle_x: x.unwrap_or(0.0),
            angle_y: y.unwrap_or(0.0),
        }),
    };
    let spec = GridSpec::new(img.width, img.height, dx, dy).map_err(|e| input(e.to_string()))?;
    let carrier = if hint.is_some() { None } else { carrier };
    let gram = Interferogram::new(spec, img.values(), wavelength, carrier)
        .map_err(|e| input(e.to_string()))?;
    let reading = extract_charge_with_hint(&gram, hint.unwrap_or_default());

    let label = img
        .meta
        .get("label")
        .cloned()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_default();
    let status = if reading.flagged { "flagged" } else { "ok" };
    let stdout = format!(
        "label,ell,confidence,method,status\n{},{},{:.4},{},{}\n",
        crate::table::field(&label),
        reading.ell,
        reading.confidence,
        reading.method,
        status
    );
    Ok(AnalyzeReport {
        reading,
        report: Report {
            stdout,
            warnings: Vec::new(),
        },
    })
}
