//! Temporal models: the delayed linearly chirped pulse pair whose beat note
//! drives one Raman mode, and intensity waveforms synthesized from a comb.
//!
//! A single chirped pulse is `exp(-t^2 / (2 tau^2) + i (omega_0 t + b t^2 / 2))`.
//! Two copies separated by `t_d` beat at `b t_d` wherever they overlap.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::raman::SpectralComb;

/// Envelope half-widths (in `tau`) a grid must cover on either side of the
/// pulse pair.
const ENVELOPE_SPAN: f64 = 4.0;
/// Minimum normalized autocorrelation of the period peak.
const MIN_PROMINENCE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    nt: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(nt: usize, dt: f64) -> Result<Self> {
        if nt < 64 {
            return Err(Error::InvalidGrid(format!("need at least 64 time samples, got {nt}")));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidGrid(format!("time step must be positive, got {dt:e}")));
        }
        Ok(Self { nt, dt })
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn duration(&self) -> f64 {
        self.nt as f64 * self.dt
    }

    /// Time of sample `i`; sample `nt / 2` sits at zero.
    pub fn t(&self, i: usize) -> f64 {
        (i as f64 - (self.nt / 2) as f64) * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nt).map(|i| self.t(i))
    }

    /// Highest representable angular frequency.
    pub fn nyquist(&self) -> f64 {
        PI / self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpedPulsePair {
    /// Envelope duration parameter in seconds.
    pub tau: f64,
    /// Linear chirp rate `b` in rad/s^2.
    pub chirp_rate: f64,
    /// Pump-Stokes delay in seconds.
    pub delay: f64,
    /// Carrier angular frequency; zero gives the rotating frame.
    pub omega_0: f64,
}

impl ChirpedPulsePair {
    pub fn new(tau: f64, chirp_rate: f64, delay: f64, omega_0: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau must be positive, got {tau:e}")));
        }
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::InvalidArgument(format!("delay must be non-negative, got {delay:e}")));
        }
        if !chirp_rate.is_finite() || !omega_0.is_finite() {
            return Err(Error::InvalidArgument("chirp rate and carrier must be finite".into()));
        }
        Ok(Self {
            tau,
            chirp_rate,
            delay,
            omega_0,
        })
    }

    /// Pair whose delay makes the beat note equal `omega_r`.
    pub fn matched(tau: f64, chirp_rate: f64, omega_r: f64, omega_0: f64) -> Result<Self> {
        if !(chirp_rate > 0.0 && omega_r > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "matching needs positive chirp rate and target, got {chirp_rate:e}, {omega_r:e}"
            )));
        }
        Self::new(tau, chirp_rate, omega_r / chirp_rate, omega_0)
    }
}

/// `b * t_d`.
pub fn beat_frequency(pair: &ChirpedPulsePair) -> f64 {
    pair.chirp_rate * pair.delay
}

/// Both pulses on `grid`, centered at `-t_d/2` and `+t_d/2`.
pub fn chirped_pair_field(pair: &ChirpedPulsePair, grid: &TimeGrid) -> Result<Vec<Complex64>> {
    let half = pair.delay / 2.0;
    let reach = half + ENVELOPE_SPAN * pair.tau;
    let half_span = (grid.nt / 2 - 1) as f64 * grid.dt;
    if reach > half_span {
        return Err(Error::InvalidGrid(format!(
            "time window +/-{half_span:e} s does not cover the pulse pair (+/-{reach:e} s)"
        )));
    }
    let peak_omega = pair.omega_0.abs() + pair.chirp_rate.abs() * (ENVELOPE_SPAN * pair.tau);
    if peak_omega >= grid.nyquist() {
        return Err(Error::Nyquist(format!(
            "instantaneous frequency {peak_omega:e} rad/s exceeds {:e} rad/s",
            grid.nyquist()
        )));
    }
    let pulse = |t: f64| {
        Complex64::new(
            -t * t / (2.0 * pair.tau * pair.tau),
            pair.omega_0 * t + 0.5 * pair.chirp_rate * t * t,
        )
        .exp()
    };
    Ok(grid.times().map(|t| pulse(t + half) + pulse(t - half)).collect())
}

/// `I(t) = |sum_k A_k exp(-i omega_k t + i phi_k)|^2`.
pub fn synthesize_waveform(comb: &SpectralComb, grid: &TimeGrid, phases: &[f64]) -> Result<Vec<f64>> {
    let channels = comb.channels();
    if phases.len() != channels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} phases for {} channels",
            phases.len(),
            channels.len()
        )));
    }
    if let Some(c) = channels.iter().find(|c| c.omega >= grid.nyquist()) {
        return Err(Error::Nyquist(format!(
            "channel {} at {:e} rad/s exceeds {:e} rad/s",
            c.label,
            c.omega,
            grid.nyquist()
        )));
    }
    Ok(grid
        .times()
        .map(|t| {
            channels
                .iter()
                .zip(phases)
                .map(|(c, &phi)| c.amplitude * Complex64::from_polar(1.0, phi - c.omega * t))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect())
}

/// Period of the dominant repeating structure in a uniformly sampled series.
///
/// Uses the unbiased autocorrelation of the mean-removed series. After the
/// central lobe has fallen to its first minimum, the earliest local maximum
/// within 80% of the strongest later one is taken and refined with a
/// parabola through its neighbours.
pub fn train_period(series: &[f64], dt: f64) -> Result<f64> {
    let n = series.len();
    if n < 16 || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need at least 16 samples and positive dt, got {n} and {dt:e}"
        )));
    }
    let acf = autocorrelation(series);
    if !(acf[0] > 0.0) {
        return Err(Error::NoPeriodicity);
    }
    // lags beyond a third of the record carry too few products
    let max_lag = n / 3;
    let first_min = (1..max_lag)
        .find(|&l| acf[l] <= acf[l - 1] && acf[l] <= acf[l + 1])
        .ok_or(Error::NoPeriodicity)?;
    let peaks: Vec<usize> = (first_min + 1..max_lag)
        .filter(|&l| acf[l] > acf[l - 1] && acf[l] >= acf[l + 1])
        .collect();
    let strongest = peaks.iter().map(|&l| acf[l]).fold(f64::NEG_INFINITY, f64::max);
    if !(strongest / acf[0] >= MIN_PROMINENCE) {
        return Err(Error::NoPeriodicity);
    }
    let lag = peaks
        .into_iter()
        .find(|&l| acf[l] >= 0.8 * strongest)
        .ok_or(Error::NoPeriodicity)?;
    let (a, b, c) = (acf[lag - 1], acf[lag], acf[lag + 1]);
    let curvature = a - 2.0 * b + c;
    let shift = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
    Ok((lag as f64 + shift) * dt)
}

/// Unbiased linear autocorrelation via a zero-padded FFT.
fn autocorrelation(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let m = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = series
        .iter()
        .map(|&v| Complex64::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex64::default()))
        .take(m)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(m).process(&mut buf);
    buf.iter()
        .take(n)
        .enumerate()
        .map(|(l, v)| v.re / (m as f64 * (n - l) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raman::{build_comb, AmplitudeModel, RamanConfig};
    use crate::units::omega_from_wavenumber_cm;
    use proptest::prelude::*;

    const FS: f64 = 1e-15;

    fn omega_r() -> f64 {
        omega_from_wavenumber_cm(320.0)
    }

    fn raman_period() -> f64 {
        2.0 * PI / omega_r()
    }

    fn matched_pair() -> ChirpedPulsePair {
        ChirpedPulsePair::matched(400.0 * FS, omega_r() / (200.0 * FS), omega_r(), 0.0).unwrap()
    }

    fn five_line_comb(model: AmplitudeModel) -> SpectralComb {
        let cfg = RamanConfig::from_pump_and_shift(800e-9, omega_r(), 0, 0, 2, 2).unwrap();
        build_comb(&cfg, model).unwrap().slice(-1..=3)
    }

    /// Direct DFT magnitude at angular frequency `w`.
    fn dft_magnitude(series: &[f64], dt: f64, w: f64) -> f64 {
        let mean = series.iter().sum::<f64>() / series.len() as f64;
        series
            .iter()
            .enumerate()
            .map(|(i, v)| Complex64::from_polar(v - mean, -w * i as f64 * dt))
            .sum::<Complex64>()
            .norm()
    }

    #[test]
    fn raman_period_oracle() {
        let nu = omega_r() / (2.0 * PI);
        assert!((nu / 1e12 - 9.5934).abs() < 1e-4);
        assert!((raman_period() / FS - 104.2388).abs() < 1e-3);
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(63, 1e-15).is_err());
        assert!(TimeGrid::new(64, 0.0).is_err());
        let g = TimeGrid::new(64, 1e-15).unwrap();
        assert_eq!(g.t(32), 0.0);
        assert!((g.duration() - 64e-15).abs() < 1e-27);
    }

    #[test]
    fn beat_frequency_is_product() {
        let p = ChirpedPulsePair::new(1.0, 3.0e26, 0.0, 0.0).unwrap();
        assert_eq!(beat_frequency(&p), 0.0);
        let m = matched_pair();
        assert!((beat_frequency(&m) / omega_r() - 1.0).abs() < 1e-15);
        assert!(ChirpedPulsePair::new(1.0, 1.0, -1.0, 0.0).is_err());
        assert!(ChirpedPulsePair::new(0.0, 1.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn beat_frequency_is_bilinear(b in 1e20f64..1e28, td in 1e-15f64..1e-11, alpha in 0.01f64..100.0) {
            let a = ChirpedPulsePair::new(1e-13, b, td, 0.0).unwrap();
            let s = ChirpedPulsePair::new(1e-13, b * alpha, td / alpha, 0.0).unwrap();
            prop_assert!((beat_frequency(&s) / beat_frequency(&a) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_delay_is_single_unmodulated_pulse() {
        let grid = TimeGrid::new(8192, 0.5 * FS).unwrap();
        let pair = ChirpedPulsePair::new(300.0 * FS, 3e26, 0.0, 0.0).unwrap();
        let e = chirped_pair_field(&pair, &grid).unwrap();
        for (t, v) in grid.times().zip(&e) {
            let expect = 4.0 * (-t * t / (300.0 * FS).powi(2)).exp();
            assert!((v.norm_sqr() - expect).abs() < 1e-12);
        }
        let intensity: Vec<f64> = e.iter().map(|v| v.norm_sqr()).collect();
        assert_eq!(train_period(&intensity, grid.dt()), Err(Error::NoPeriodicity));
    }

    #[test]
    fn matched_pair_modulates_at_beat_frequency() {
        let grid = TimeGrid::new(16384, 0.5 * FS).unwrap();
        let intensity: Vec<f64> = chirped_pair_field(&matched_pair(), &grid)
            .unwrap()
            .iter()
            .map(|v| v.norm_sqr())
            .collect();
        // strongest spectral line above the envelope band |omega| < 8 / tau
        let bin = 2.0 * PI / grid.duration();
        let first = (8.0 / matched_pair().tau / bin).ceil() as usize;
        let peak_bin = (first..grid.nt() / 4)
            .max_by(|&a, &b| {
                dft_magnitude(&intensity, grid.dt(), a as f64 * bin)
                    .total_cmp(&dft_magnitude(&intensity, grid.dt(), b as f64 * bin))
            })
            .unwrap();
        assert!((peak_bin as f64 * bin - omega_r()).abs() <= bin);

        let period = train_period(&intensity, grid.dt()).unwrap();
        assert!((period / raman_period() - 1.0).abs() < 0.01, "{}", period / FS);
    }

    #[test]
    fn pair_guards() {
        let small = TimeGrid::new(256, 0.5 * FS).unwrap();
        assert!(matches!(
            chirped_pair_field(&matched_pair(), &small),
            Err(Error::InvalidGrid(_))
        ));
        let coarse = TimeGrid::new(4096, 5.0 * FS).unwrap();
        let fast = ChirpedPulsePair::new(400.0 * FS, 1e27, 50.0 * FS, 0.0).unwrap();
        assert!(matches!(chirped_pair_field(&fast, &coarse), Err(Error::Nyquist(_))));
    }

    #[test]
    fn single_channel_is_flat() {
        let cfg = RamanConfig::from_pump_and_shift(800e-9, omega_r(), 0, 0, 0, 0).unwrap();
        let comb = build_comb(&cfg, AmplitudeModel::Uniform).unwrap().slice(1..=1);
        let grid = TimeGrid::new(256, 0.5 * FS).unwrap();
        let w = synthesize_waveform(&comb, &grid, &[0.3]).unwrap();
        assert!(w.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn flat_comb_forms_raman_period_train() {
        let comb = five_line_comb(AmplitudeModel::Uniform);
        let grid = TimeGrid::new(16384, 0.5 * FS).unwrap();
        let w = synthesize_waveform(&comb, &grid, &[0.0; 5]).unwrap();
        assert!((w[grid.nt() / 2] - 25.0).abs() < 1e-9);
        let period = train_period(&w, grid.dt()).unwrap();
        assert!((period - raman_period()).abs() < grid.dt(), "{}", period / FS);
    }

    #[test]
    fn cosine_period() {
        let dt = 0.37;
        let omega = 2.0 * PI / 23.3;
        let s: Vec<f64> = (0..2000).map(|i| 1.0 + (omega * i as f64 * dt).cos()).collect();
        let p = train_period(&s, dt).unwrap();
        assert!((p / 23.3 - 1.0).abs() < 0.005);
    }

    #[test]
    fn constant_series_has_no_period() {
        assert_eq!(train_period(&[2.0; 100], 1.0), Err(Error::NoPeriodicity));
    }

    #[test]
    fn waveform_guards() {
        let comb = five_line_comb(AmplitudeModel::Uniform);
        let coarse = TimeGrid::new(256, 2.0 * FS).unwrap();
        assert!(matches!(
            synthesize_waveform(&comb, &coarse, &[0.0; 5]),
            Err(Error::Nyquist(_))
        ));
        let grid = TimeGrid::new(256, 0.5 * FS).unwrap();
        assert!(synthesize_waveform(&comb, &grid, &[0.0; 4]).is_err());
    }

    #[test]
    fn parseval_over_whole_periods() {
        let comb = five_line_comb(AmplitudeModel::Geometric(0.6));
        // eight Raman periods in 4096 samples
        let grid = TimeGrid::new(4096, 8.0 * raman_period() / 4096.0).unwrap();
        let phases = [0.1, -0.7, 2.0, 0.4, 1.3];
        let w = synthesize_waveform(&comb, &grid, &phases).unwrap();
        let energy: f64 = w.iter().sum::<f64>() * grid.dt();
        let expect: f64 =
            comb.channels().iter().map(|c| c.amplitude.norm_sqr()).sum::<f64>() * grid.duration();
        assert!((energy / expect - 1.0).abs() < 1e-6);
    }

    #[test]
    fn phase_invariances() {
        let comb = five_line_comb(AmplitudeModel::Geometric(0.6));
        let grid = TimeGrid::new(4096, 0.5 * FS).unwrap();
        let base = synthesize_waveform(&comb, &grid, &[0.0; 5]).unwrap();

        let offset = synthesize_waveform(&comb, &grid, &[1.234; 5]).unwrap();
        assert!(base.iter().zip(&offset).all(|(a, b)| (a - b).abs() < 1e-9));

        // a linear phase in k moves the train by a whole number of samples
        let shift = 40usize;
        let spacing = comb.channels()[1].omega - comb.channels()[0].omega;
        let phases: Vec<f64> = (0..5).map(|k| k as f64 * spacing * shift as f64 * grid.dt()).collect();
        let moved = synthesize_waveform(&comb, &grid, &phases).unwrap();
        for i in 0..grid.nt() - shift {
            assert!((moved[i + shift] - base[i]).abs() < 1e-8);
        }
        let p0 = train_period(&base, grid.dt()).unwrap();
        let p1 = train_period(&moved, grid.dt()).unwrap();
        assert!((p0 - p1).abs() < grid.dt(), "{} {}", p0 / FS, p1 / FS);
    }
}
