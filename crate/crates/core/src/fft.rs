//! FFT plumbing shared by every spectral operation.
//!
//! The raw transforms here are the unnormalized DFT with kernel
//! `exp(-2πi jk/N)` along every axis and its inverse (which carries
//! `1/N^dim`). Conversions to the continuum convention
//! `f̂(ξ) = h^dim Σ e^{-iz·ξ} f(z)` live in [`to_lattice`] and
//! [`from_lattice`].

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{Field, Grid};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = planner().lock().unwrap_or_else(|e| e.into_inner());
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

fn transform(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    debug_assert_eq!(data.len(), grid.len());
    let n = grid.points();
    let fft = plan(n, inverse);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // The last axis is contiguous, so every row is transformed in one call.
    fft.process_with_scratch(data, &mut scratch);
    if grid.dim() == 1 {
        return;
    }
    let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
    for axis in 0..grid.dim() - 1 {
        let stride = grid.stride(axis);
        let outer = data.len() / (n * stride);
        for o in 0..outer {
            for i in 0..n {
                let base = o * n * stride + i * stride;
                for inner in 0..stride {
                    lines[(o * stride + inner) * n + i] = data[base + inner];
                }
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        for o in 0..outer {
            for i in 0..n {
                let base = o * n * stride + i * stride;
                for inner in 0..stride {
                    data[base + inner] = lines[(o * stride + inner) * n + i];
                }
            }
        }
    }
}

/// Unnormalized forward DFT over all axes, in place.
pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, false);
}

/// Inverse DFT over all axes, in place, including the `1/N^dim` factor.
pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, true);
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Factor `c_k` with `f̂(ξ_k) = c_k · DFT_k`, i.e. `h^dim (-1)^{Σ k}`.
///
/// The sign comes from the grid starting at `-L`: `e^{iLξ} = (-1)^m` and
/// `(-1)^m = (-1)^k` because N is even.
pub fn lattice_factor(grid: &Grid, flat: usize) -> Complex64 {
    let parity: usize = (0..grid.dim()).map(|a| grid.axis_index(flat, a)).sum();
    let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(sign * grid.cell_volume(), 0.0)
}

/// Maps a DFT index (FFT order) to the flat index of the dual grid, whose
/// samples are ordered by increasing frequency.
pub fn dual_index(grid: &Grid, flat: usize) -> usize {
    let n = grid.points();
    let mut out = 0;
    for axis in 0..grid.dim() {
        let k = grid.axis_index(flat, axis);
        out = out * n + (k + n / 2) % n;
    }
    out
}

/// Fourier transform of a physical field in the continuum convention,
/// returned as a field on [`Grid::dual`].
pub fn to_lattice(field: &Field) -> Field {
    let grid = *field.grid();
    let mut data = field.samples().to_vec();
    forward(&grid, &mut data);
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for (k, v) in data.iter().enumerate() {
        out[dual_index(&grid, k)] = lattice_factor(&grid, k) * v;
    }
    Field::from_raw(grid.dual(), out, field.time())
}

/// Inverse of [`to_lattice`]: takes samples of `f̂` on the dual grid and
/// returns `F^{-1} f̂` on `grid`.
pub fn from_lattice(profile: &Field, grid: &Grid) -> Field {
    let mut data = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (k, v) in data.iter_mut().enumerate() {
        *v = profile.samples()[dual_index(grid, k)] / lattice_factor(grid, k);
    }
    inverse(grid, &mut data);
    Field::from_raw(*grid, data, profile.time())
}
