//! Simulation and analysis of orbital-angular-momentum transfer in cascaded
//! Raman sideband generation.
//!
//! * [`beam`]: sampled transverse fields, Laguerre-Gaussian modes, mode
//!   decomposition and angular-spectrum propagation.
//! * [`optics`]: phase-only elements (spiral phase plates, mirrors, lenses,
//!   tilts) and reflection-parity bookkeeping.
//! * [`raman`]: the sideband ladder with its frequency and charge rules, and
//!   the spatial source terms of each order.
//! * [`interferometry`]: two-source interferograms and automatic charge
//!   readout from fork patterns.
//! * [`pulse`]: chirped pulse pairs and comb waveform synthesis.

pub mod beam;
pub mod error;
pub mod fft;
pub mod interferometry;
pub mod optics;
pub mod pulse;
pub mod raman;
pub mod units;

pub use error::{Error, Result};
