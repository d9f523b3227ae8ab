//! Transverse fields, Laguerre-Gaussian modes and free-space propagation.

mod grid;
mod metrics;
mod modes;
mod propagate;

pub use grid::{ComplexFieldGrid, GridSpec};
pub use metrics::{measure_charge_circulation, ring_radius};
pub use modes::{decompose, laguerre, lg_mode_field, BeamParams, LGModeIndex, ModeDecomposition};
pub use propagate::propagate;

pub(crate) use metrics::{nearest_charge, phase_circulation, RadialProfile};
