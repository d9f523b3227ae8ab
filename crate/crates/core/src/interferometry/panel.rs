//! End-to-end sideband-order panel: vortex and reference sideband sets,
//! free-space propagation to the detection plane, interference, readout.

use rayon::prelude::*;

use super::{extract_charge, synthesize_interferogram, ChargeReading, Interferogram};
use crate::beam::{lg_mode_field, propagate, ring_radius, BeamParams, ComplexFieldGrid, GridSpec, LGModeIndex};
use crate::error::Result;
use crate::raman::{sideband_charge, spatial_sideband, RamanConfig, SidebandLabel};
use crate::units::wavelength_from_omega;

/// Geometry shared by every order of a panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelSetup {
    pub spec: GridSpec,
    /// Pump and Stokes waist at the crystal.
    pub waist: f64,
    /// Reference-arm tilt, radians about the x axis.
    pub tilt: f64,
    /// Crystal-to-detector distance in pump Rayleigh ranges.
    pub detect_rayleigh: f64,
    /// Vertical displacement of the reference set. `None` uses 1.5 times the
    /// vortex ring diameter at the crystal.
    pub offset_y: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PanelEntry {
    pub label: SidebandLabel,
    pub expected_ell: i64,
    pub wavelength: f64,
    /// Vortex-set ring radius at the detection plane.
    pub ring_radius: f64,
    /// Vortex-set intensity at the detection plane.
    pub image: Vec<f64>,
    pub interferogram: Interferogram,
    pub reading: ChargeReading,
}

/// Run every order independently; results keep the order of `orders` and
/// one failing order does not stop the others.
pub fn analyze_fig3_panel(
    cfg: &RamanConfig,
    setup: &PanelSetup,
    orders: &[SidebandLabel],
) -> Vec<Result<PanelEntry>> {
    let inputs = Inputs::new(cfg, setup);
    orders
        .par_iter()
        .map(|&label| {
            let inputs = inputs.as_ref().map_err(Clone::clone)?;
            analyze_order(cfg, setup, inputs, label)
        })
        .collect()
}

struct Inputs {
    pump: ComplexFieldGrid,
    stokes: ComplexFieldGrid,
    pump_ref: ComplexFieldGrid,
    stokes_ref: ComplexFieldGrid,
    detect_distance: f64,
}

impl Inputs {
    fn new(cfg: &RamanConfig, setup: &PanelSetup) -> Result<Self> {
        let pump_beam = BeamParams::new(setup.waist, wavelength_from_omega(cfg.omega_p))?;
        let stokes_beam = BeamParams::new(setup.waist, wavelength_from_omega(cfg.omega_s))?;
        let mode = |ell, beam| lg_mode_field(LGModeIndex::new(0, ell), beam, setup.spec, 0.0);
        Ok(Self {
            pump: mode(cfg.ell_p, pump_beam)?,
            stokes: mode(cfg.ell_s, stokes_beam)?,
            pump_ref: mode(0, pump_beam)?,
            stokes_ref: mode(0, stokes_beam)?,
            detect_distance: setup.detect_rayleigh * pump_beam.rayleigh_range(),
        })
    }
}

fn analyze_order(
    cfg: &RamanConfig,
    setup: &PanelSetup,
    inputs: &Inputs,
    label: SidebandLabel,
) -> Result<PanelEntry> {
    let vortex = spatial_sideband(&inputs.pump, &inputs.stokes, label)?;
    let reference = spatial_sideband(&inputs.pump_ref, &inputs.stokes_ref, label)?;
    let offset = setup
        .offset_y
        .unwrap_or_else(|| 1.5 * 2.0 * ring_radius(&vortex));

    let vortex = propagate(&vortex, inputs.detect_distance)?;
    let reference = propagate(&reference, inputs.detect_distance)?;
    let gram = synthesize_interferogram(&vortex, &reference, setup.tilt, offset)?.with_label(label);
    let reading = extract_charge(&gram);
    Ok(PanelEntry {
        label,
        expected_ell: sideband_charge(cfg, label),
        wavelength: vortex.wavelength(),
        ring_radius: ring_radius(&vortex),
        image: vortex.intensity(),
        interferogram: gram,
        reading,
    })
}
