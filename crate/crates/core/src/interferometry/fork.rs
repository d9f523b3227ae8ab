//! Charge readout from a demodulated fringe pattern.
//!
//! The core is the dark basin of the lobe envelope enclosed by brighter
//! light: a priority flood from the unlit surroundings fills every dip up to
//! its spill level. Each basin scores its filled volume (in log amplitude)
//! weighted by its spill level relative to the envelope peak, so pits in the
//! noise floor lose to a core ringed by signal. Ties go to the basin nearest
//! the grid center. The winner's depth-weighted centroid anchors a set of
//! circulation loops.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::demod::{demodulate, Demodulated};
use super::{CarrierHint, ChargeReading, Interferogram, Method, Region};
use crate::beam::{nearest_charge, phase_circulation, RadialProfile};
use crate::error::{Error, Result};

/// Pixels below this fraction of the peak baseband count as unlit.
const LIT_FRACTION: f64 = 0.01;
/// Minimum basin depth, natural log of an amplitude ratio.
const MIN_DEPTH: f64 = 1.386_294_361_119_890_6; // ln 4
/// Loop radii as multiples of the envelope ring radius.
const LOOP_SCALES: [f64; 5] = [0.7, 0.8, 0.9, 1.0, 1.15];

/// Read the charge assuming the `+K` lobe is on the `+x` side when the
/// interferogram has no carrier metadata.
pub fn extract_charge(gram: &Interferogram) -> ChargeReading {
    extract_charge_with_hint(gram, CarrierHint::default())
}

pub fn extract_charge_with_hint(gram: &Interferogram, hint: CarrierHint) -> ChargeReading {
    let Some(demod) = demodulate(gram, hint) else {
        return no_signal(Method::Circulation);
    };
    let Some(core) = locate_core(&demod, gram) else {
        return no_signal(Method::Circulation);
    };
    let (dx, dy) = (gram.spec().dx(), gram.spec().dy());
    let reach = edge_distance(&demod, core.center, dx, dy);
    let circulations: Vec<f64> = LOOP_SCALES
        .iter()
        .map(|s| s * core.ring)
        .filter(|&r| r >= dx.max(dy) && r <= reach)
        .map(|r| phase_circulation(&demod.lobe, demod.nx, demod.ny, core.center, (r / dx, r / dy)))
        .collect();
    vote(&circulations)
}

/// Literal fringe count: zero crossings of the fringe term along two lines
/// parallel to the carrier, just either side of the core. Their difference
/// is twice the charge, less the share of the winding that leaks past the
/// line ends.
pub fn count_fork_fringes(gram: &Interferogram) -> ChargeReading {
    let Some(demod) = demodulate(gram, CarrierHint::default()) else {
        return no_signal(Method::ForkCount);
    };
    let Some(core) = locate_core(&demod, gram) else {
        return no_signal(Method::ForkCount);
    };
    let pitch = gram.spec().dx();
    let (nx, ny) = (demod.nx, demod.ny);
    let fringe: Vec<f64> = gram
        .intensity()
        .iter()
        .zip(&demod.baseband)
        .map(|(i, b)| i - b)
        .collect();

    let (ux, uy) = demod.carrier_direction();
    let (px, py) = (-uy, ux);
    let ring = core.ring / pitch;
    let offset = (0.25 * ring).max(2.0);
    let reach = edge_distance(&demod, core.center, 1.0, 1.0) - offset;
    let half = (2.0 * ring).min(reach);
    if half <= 2.0 * offset {
        return no_signal(Method::ForkCount);
    }
    let crossings = |side: f64| {
        let steps = (4.0 * half).ceil() as usize;
        let mut count = 0i64;
        let mut prev = 0.0;
        for s in 0..=steps {
            let t = -half + 2.0 * half * s as f64 / steps as f64;
            let v = bilinear_real(
                &fringe,
                nx,
                ny,
                core.center.0 + t * ux + side * offset * px,
                core.center.1 + t * uy + side * offset * py,
            );
            if v != 0.0 {
                if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                    count += 1;
                }
                prev = v;
            }
        }
        count
    };
    let leak = 1.0 - 2.0 * (offset / half).atan() / std::f64::consts::PI;
    let raw = (crossings(1.0) - crossings(-1.0)) as f64 / 2.0 / leak;
    let ell = raw.round();
    let residual = (raw - ell).abs();
    ChargeReading {
        ell: ell as i64,
        confidence: (1.0 - 2.0 * residual).clamp(0.0, 1.0),
        method: Method::ForkCount,
        flagged: residual > 0.25,
    }
}

/// `2 sum |lobe| / sum baseband` over `region`, the intensity-weighted
/// `(I_max - I_min) / (I_max + I_min)` of the local fringes.
pub fn fringe_visibility(gram: &Interferogram, region: Region) -> Result<f64> {
    let spec = gram.spec();
    if region.width == 0
        || region.height == 0
        || region.x0 + region.width > spec.nx()
        || region.y0 + region.height > spec.ny()
    {
        return Err(Error::InvalidArgument(format!("region {region:?} is outside the grid")));
    }
    let Some(demod) = demodulate(gram, CarrierHint::default()) else {
        return Ok(0.0);
    };
    let (kx, ky) = demod.carrier_bins;
    let periods = (kx / spec.nx() as f64).abs() * region.width as f64
        + (ky / spec.ny() as f64).abs() * region.height as f64;
    if periods < 3.0 {
        return Err(Error::RegionTooSmall(format!(
            "region spans {periods:.2} fringe periods, need at least 3"
        )));
    }
    let (mut lobe, mut base) = (0.0, 0.0);
    for j in region.y0..region.y0 + region.height {
        for i in region.x0..region.x0 + region.width {
            debug_assert!(region.contains(i, j));
            lobe += demod.lobe[j * spec.nx() + i].norm();
            base += demod.baseband[j * spec.nx() + i];
        }
    }
    if base <= 0.0 {
        return Ok(0.0);
    }
    Ok((2.0 * lobe / base).clamp(0.0, 1.0))
}

fn no_signal(method: Method) -> ChargeReading {
    ChargeReading {
        ell: 0,
        confidence: 0.0,
        method,
        flagged: true,
    }
}

/// Majority vote over loop circulations.
fn vote(circulations: &[f64]) -> ChargeReading {
    if circulations.is_empty() {
        return no_signal(Method::Circulation);
    }
    let rounded: Vec<i64> = circulations.iter().map(|c| c.round() as i64).collect();
    let mut best = (0usize, 0i64);
    for &n in &rounded {
        let votes = rounded.iter().filter(|&&m| m == n).count();
        if votes > best.0 || (votes == best.0 && n.abs() < best.1.abs()) {
            best = (votes, n);
        }
    }
    let (votes, ell) = best;
    let agreeing: Vec<f64> = circulations
        .iter()
        .zip(&rounded)
        .filter(|(_, &n)| n == ell)
        .map(|(c, _)| *c)
        .collect();
    let residual = agreeing.iter().map(|c| (c - ell as f64).abs()).sum::<f64>() / agreeing.len() as f64;
    let agreement = votes as f64 / circulations.len() as f64;
    let clean = agreeing.iter().filter(|&&c| nearest_charge(c).is_ok()).count();
    ChargeReading {
        ell,
        confidence: (agreement * (1.0 - 2.0 * residual)).clamp(0.0, 1.0),
        method: Method::Circulation,
        flagged: agreement <= 0.5 || 2 * clean <= agreeing.len(),
    }
}

struct Core {
    /// Pixel coordinates.
    center: (f64, f64),
    /// Envelope ring radius, meters.
    ring: f64,
}

fn locate_core(demod: &Demodulated, gram: &Interferogram) -> Option<Core> {
    let (nx, ny) = (demod.nx, demod.ny);
    let amp: Vec<f64> = demod.lobe.iter().map(|v| v.norm()).collect();
    let peak = amp.iter().copied().fold(0.0, f64::max);
    let lit_level = LIT_FRACTION * demod.baseband.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    let level: Vec<f64> = amp.iter().map(|a| a.max(f64::MIN_POSITIVE).ln()).collect();
    let lit: Vec<bool> = demod.baseband.iter().map(|&b| b >= lit_level).collect();

    let filled = priority_flood(&level, &lit, nx, ny);
    let depth: Vec<f64> = filled.iter().zip(&level).map(|(f, l)| f - l).collect();
    let center_px = ((nx / 2) as f64, (ny / 2) as f64);

    let mut seen = vec![false; nx * ny];
    let mut best: Option<(f64, f64, (f64, f64))> = None;
    for start in 0..nx * ny {
        if seen[start] || depth[start] <= MIN_DEPTH {
            continue;
        }
        let (mut volume, mut weight, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let peak_level = peak.ln();
        while let Some(p) = queue.pop_front() {
            let d = depth[p];
            volume += d * (filled[p] - peak_level).exp();
            weight += d;
            sx += d * (p % nx) as f64;
            sy += d * (p / nx) as f64;
            for q in neighbours(p, nx, ny) {
                if !seen[q] && depth[q] > MIN_DEPTH {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        let c = (sx / weight, sy / weight);
        let dist = (c.0 - center_px.0).hypot(c.1 - center_px.1);
        let better = match best {
            None => true,
            Some((v, d, _)) => volume > v * (1.0 + 1e-9) || ((volume - v).abs() <= v * 1e-9 && dist < d),
        };
        if better {
            best = Some((volume, dist, c));
        }
    }

    let spec = gram.spec();
    let intensity: Vec<f64> = amp.iter().map(|a| a * a).collect();
    let center = match best {
        Some((_, _, c)) => c,
        None => weighted_centroid(&intensity, nx, ny),
    };
    let radii = (0..ny).flat_map(|j| {
        (0..nx).map(move |i| {
            ((i as f64 - center.0) * spec.dx()).hypot((j as f64 - center.1) * spec.dy())
        })
    });
    let dr = spec.dx().min(spec.dy());
    let max_r = (nx as f64 * spec.dx()).max(ny as f64 * spec.dy());
    let ring = RadialProfile::build(radii, &intensity, dr, max_r).peak_radius();
    let ring = if ring > 0.0 {
        ring
    } else {
        rms_radius(&intensity, center, spec.dx(), spec.dy(), nx)
    };
    Some(Core { center, ring })
}

fn neighbours(p: usize, nx: usize, ny: usize) -> impl Iterator<Item = usize> {
    let (i, j) = (p % nx, p / nx);
    [
        (i > 0).then(|| p - 1),
        (i + 1 < nx).then(|| p + 1),
        (j > 0).then(|| p - nx),
        (j + 1 < ny).then(|| p + nx),
    ]
    .into_iter()
    .flatten()
}

#[derive(PartialEq)]
struct Cell(f64, usize);

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    // min-heap on level, then index for determinism
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Fill every depression not connected to the unlit region or the grid edge
/// up to its spill level.
fn priority_flood(level: &[f64], lit: &[bool], nx: usize, ny: usize) -> Vec<f64> {
    let mut filled = level.to_vec();
    let mut done = vec![false; nx * ny];
    let mut heap = BinaryHeap::new();
    for p in 0..nx * ny {
        let (i, j) = (p % nx, p / nx);
        if !lit[p] || i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
            done[p] = true;
            heap.push(Cell(level[p], p));
        }
    }
    while let Some(Cell(h, p)) = heap.pop() {
        for q in neighbours(p, nx, ny) {
            if !done[q] {
                done[q] = true;
                filled[q] = level[q].max(h);
                heap.push(Cell(filled[q], q));
            }
        }
    }
    filled
}

fn weighted_centroid(weights: &[f64], nx: usize, ny: usize) -> (f64, f64) {
    let (mut sx, mut sy, mut sw) = (0.0, 0.0, 0.0);
    for (p, w) in weights.iter().enumerate() {
        sx += w * (p % nx) as f64;
        sy += w * (p / nx) as f64;
        sw += w;
    }
    if sw > 0.0 {
        (sx / sw, sy / sw)
    } else {
        ((nx / 2) as f64, (ny / 2) as f64)
    }
}

fn rms_radius(weights: &[f64], c: (f64, f64), dx: f64, dy: f64, nx: usize) -> f64 {
    let (mut s, mut sw) = (0.0, 0.0);
    for (p, w) in weights.iter().enumerate() {
        let x = ((p % nx) as f64 - c.0) * dx;
        let y = ((p / nx) as f64 - c.1) * dy;
        s += w * (x * x + y * y);
        sw += w;
    }
    if sw > 0.0 {
        (s / sw).sqrt()
    } else {
        0.0
    }
}

/// Largest loop radius (in units of the given pitches) that keeps one
/// pixel clear of the edge.
fn edge_distance(demod: &Demodulated, c: (f64, f64), dx: f64, dy: f64) -> f64 {
    let rx = c.0.min(demod.nx as f64 - 1.0 - c.0) - 1.0;
    let ry = c.1.min(demod.ny as f64 - 1.0 - c.1) - 1.0;
    (rx * dx).min(ry * dy).max(0.0)
}

fn bilinear_real(values: &[f64], nx: usize, ny: usize, px: f64, py: f64) -> f64 {
    let px = px.clamp(0.0, (nx - 1) as f64);
    let py = py.clamp(0.0, (ny - 1) as f64);
    let i0 = (px.floor() as usize).min(nx - 2);
    let j0 = (py.floor() as usize).min(ny - 2);
    let (fx, fy) = (px - i0 as f64, py - j0 as f64);
    let at = |i: usize, j: usize| values[j * nx + i];
    at(i0, j0) * (1.0 - fx) * (1.0 - fy)
        + at(i0 + 1, j0) * fx * (1.0 - fy)
        + at(i0, j0 + 1) * (1.0 - fx) * fy
        + at(i0 + 1, j0 + 1) * fx * fy
}


