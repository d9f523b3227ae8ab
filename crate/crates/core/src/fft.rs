//! Row-major 2-D FFT on top of `rustfft`.
//!
//! Buffers hold `ny` rows of `nx` samples. Forward transforms are not
//! normalized; [`ifft2`] divides by `nx * ny` so that a forward/inverse pair
//! is the identity.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

pub fn fft2(nx: usize, ny: usize, buf: &mut [Complex64]) {
    transform(nx, ny, buf, FftDirection::Forward);
}

pub fn ifft2(nx: usize, ny: usize, buf: &mut [Complex64]) {
    transform(nx, ny, buf, FftDirection::Inverse);
    let scale = 1.0 / (nx * ny) as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
}

fn transform(nx: usize, ny: usize, buf: &mut [Complex64], direction: FftDirection) {
    assert_eq!(buf.len(), nx * ny);
    let mut planner = FftPlanner::new();

    let rows = planner.plan_fft(nx, direction);
    let mut scratch = vec![Complex64::default(); rows.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(nx) {
        rows.process_with_scratch(row, &mut scratch);
    }

    let mut transposed = transpose(nx, ny, buf);
    let cols = planner.plan_fft(ny, direction);
    scratch.resize(cols.get_inplace_scratch_len(), Complex64::default());
    for col in transposed.chunks_exact_mut(ny) {
        cols.process_with_scratch(col, &mut scratch);
    }
    let back = transpose(ny, nx, &transposed);
    buf.copy_from_slice(&back);
}

/// Transpose a row-major `height x width` buffer.
fn transpose(width: usize, height: usize, src: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); src.len()];
    for (j, row) in src.chunks_exact(width).enumerate() {
        for (i, v) in row.iter().enumerate() {
            out[i * height + j] = *v;
        }
    }
    out
}

/// Signed FFT bin index: `0, 1, .., n/2, -(n/2 - 1), .., -1` style ordering.
#[inline]
pub fn signed_bin(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Spatial frequency (cycles per unit length) of FFT bin `i`.
#[inline]
pub fn frequency(i: usize, n: usize, pitch: f64) -> f64 {
    signed_bin(i, n) as f64 / (n as f64 * pitch)
}
