use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid beam parameters: {0}")]
    InvalidBeam(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid too coarse: waist {waist:.3e} m is below 4 samples of pitch {pitch:.3e} m")]
    Resolution { waist: f64, pitch: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("wavelength mismatch: {a:.6e} m vs {b:.6e} m")]
    WavelengthMismatch { a: f64, b: f64 },

    #[error("aliasing: {0}; use a larger or finer grid")]
    Aliasing(String),

    #[error("phase circulation {circulation:.3} (x 2pi) is not close to an integer")]
    AmbiguousCharge { circulation: f64 },

    #[error("loop radius {radius:.3e} m does not fit between the core and the grid edge")]
    InvalidLoop { radius: f64 },

    #[error("sideband {label} has non-positive frequency {omega:.4e} rad/s")]
    NegativeFrequency { label: String, omega: f64 },

    #[error("degenerate overlap: product field carries no power")]
    DegenerateOverlap,

    #[error("region too small: {0}")]
    RegionTooSmall(String),

    #[error("no periodic structure found")]
    NoPeriodicity,

    #[error("Nyquist violation: {0}")]
    Nyquist(String),
}
