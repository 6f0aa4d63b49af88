//! Periodic box discretization of R^n and the sampled fields living on it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Uniform periodic grid on `[-L, L)^dim` with `N` points per axis.
///
/// Flat sample indices are row-major: axis 0 varies slowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("{points} points per axis is not a power of two >= 4")));
        }
        Ok(Self { dim, half_width, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of samples, `N^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing `h = 2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Quadrature measure `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Spacing of the frequency lattice, `π/L`.
    pub fn frequency_spacing(&self) -> f64 {
        PI / self.half_width
    }

    /// Largest lattice frequency magnitude (the Nyquist value `π/h`).
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Grid whose coordinates are the frequency lattice `(π/L)·{-N/2, …, N/2-1}`.
    pub fn dual(&self) -> Grid {
        Grid { dim: self.dim, half_width: self.nyquist(), points: self.points }
    }

    /// Same sample layout with every coordinate multiplied by `factor > 0`.
    pub fn rescaled(&self, factor: f64) -> Result<Grid> {
        Grid::new(self.dim, self.half_width * factor, self.points)
    }

    /// Flat-index stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.dim - 1 - axis) as u32)
    }

    /// Index along `axis` of the flat sample index `flat`.
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        (flat / self.stride(axis)) % self.points
    }

    /// Coordinate of grid index `i` along any axis: `-L + i h`.
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    /// Coordinates along one axis.
    pub fn axis_coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coordinate(i)).collect()
    }

    /// Lattice frequencies along one axis in FFT order.
    pub fn axis_frequencies(&self) -> Vec<f64> {
        let n = self.points as isize;
        (0..n)
            .map(|k| {
                let m = if k < n / 2 { k } else { k - n };
                m as f64 * self.frequency_spacing()
            })
            .collect()
    }

    /// Writes the coordinates of sample `flat` into `out[..dim]`.
    pub fn point(&self, flat: usize, out: &mut [f64]) {
        for (axis, x) in out.iter_mut().enumerate().take(self.dim) {
            *x = self.coordinate(self.axis_index(flat, axis));
        }
    }

    /// `|ξ|²` for every DFT index in FFT order.
    pub fn frequency_squared(&self) -> Vec<f64> {
        let freqs = self.axis_frequencies();
        (0..self.len()).map(|flat| (0..self.dim).map(|a| freqs[self.axis_index(flat, a)].powi(2)).sum()).collect()
    }

    /// `|z|²` at every sample.
    pub fn radius_squared(&self) -> Vec<f64> {
        let coords = self.axis_coordinates();
        (0..self.len()).map(|flat| (0..self.dim).map(|a| coords[self.axis_index(flat, a)].powi(2)).sum()).collect()
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        Ok(())
    }
}

/// Norm selector for [`Field::norm`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L2,
    Lr(f64),
    Linf,
}

/// Complex samples of a function on a [`Grid`] at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    samples: Vec<Complex64>,
    time: f64,
}

impl Field {
    /// Builds a field, checking the sample count and finiteness.
    pub fn new(grid: Grid, samples: Vec<Complex64>, time: f64) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("expected {} samples, got {}", grid.len(), samples.len())));
        }
        if samples.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("field samples".into()));
        }
        Ok(Self { grid, samples, time })
    }

    pub(crate) fn from_raw(grid: Grid, samples: Vec<Complex64>, time: f64) -> Self {
        debug_assert_eq!(samples.len(), grid.len());
        Self { grid, samples, time }
    }

    pub fn zeros(grid: Grid, time: f64) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len()], time }
    }

    /// Samples `f` at every grid point; `f` receives the coordinates.
    pub fn from_fn(grid: Grid, time: f64, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let mut z = [0.0; 3];
        let samples = (0..grid.len())
            .map(|flat| {
                grid.point(flat, &mut z);
                f(&z[..grid.dim()])
            })
            .collect();
        Self { grid, samples, time }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Discrete norm with measure `h^dim`.
    pub fn norm(&self, kind: NormKind) -> Result<f64> {
        if !self.is_finite() {
            return Err(Error::NonFinite("norm input".into()));
        }
        match kind {
            NormKind::L2 => Ok(self.l2_norm()),
            NormKind::Lr(r) => {
                if !(r.is_finite() && r >= 1.0) {
                    return Err(Error::InvalidArgument(format!("L^r norm needs 1 <= r < inf, got {r}")));
                }
                let sum: f64 = self.samples.iter().map(|v| v.norm().powf(r)).sum();
                Ok((sum * self.grid.cell_volume()).powf(1.0 / r))
            }
            NormKind::Linf => Ok(self.sup_norm()),
        }
    }

    /// Discrete L² norm without the finiteness check.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sqr().sqrt()
    }

    /// `‖u‖²` in the discrete L² inner product.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.norm_sqr_sum() * self.grid.cell_volume()
    }

    fn norm_sqr_sum(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete inner product `h^dim Σ conj(u) v`.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.same_grid(other)?;
        let sum: Complex64 = self.samples.iter().zip(&other.samples).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * self.grid.cell_volume())
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `self - other`.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        Ok(Field::from_raw(self.grid, samples, self.time))
    }

    /// `self + other`.
    pub fn add(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Field::from_raw(self.grid, samples, self.time))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect();
        Ok(Field::from_raw(self.grid, samples, self.time))
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_raw(self.grid, self.samples.iter().map(|&v| f(v)).collect(), self.time)
    }

    /// Pointwise map `u(z) ↦ g(z, u(z))`.
    pub fn map_with_point(&self, g: impl Fn(&[f64], Complex64) -> Complex64) -> Field {
        let mut z = [0.0; 3];
        let dim = self.grid.dim();
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(flat, &v)| {
                self.grid.point(flat, &mut z);
                g(&z[..dim], v)
            })
            .collect();
        Field::from_raw(self.grid, samples, self.time)
    }

    /// `D_{z_j} u = -i ∂_j u` as the Fourier multiplier `ξ_j`.
    pub fn spectral_derivative(&self, axis: usize) -> Result<Field> {
        self.grid.check_axis(axis)?;
        let mut data = self.samples.clone();
        fft::forward(&self.grid, &mut data);
        apply_derivative_multiplier(&self.grid, &mut data, axis);
        fft::inverse(&self.grid, &mut data);
        Ok(Field::from_raw(self.grid, data, self.time))
    }

    /// Pointwise multiplication by the coordinate `z_j`.
    pub fn coordinate_multiply(&self, axis: usize) -> Result<Field> {
        self.grid.check_axis(axis)?;
        let coords = self.grid.axis_coordinates();
        let samples =
            self.samples.iter().enumerate().map(|(flat, v)| v * coords[self.grid.axis_index(flat, axis)]).collect();
        Ok(Field::from_raw(self.grid, samples, self.time))
    }

    /// L² mass in the outer 10% shell (any coordinate beyond 0.9 L),
    /// relative to the total mass. Zero for the zero field.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let total = self.norm_sqr_sum();
        if total == 0.0 {
            return 0.0;
        }
        let coords = self.grid.axis_coordinates();
        let edge = 0.9 * self.grid.half_width();
        let shell: f64 = self
            .samples
            .iter()
            .enumerate()
            .filter(|(flat, _)| (0..self.grid.dim()).any(|a| coords[self.grid.axis_index(*flat, a)].abs() > edge))
            .map(|(_, v)| v.norm_sqr())
            .sum();
        shell / total
    }
}

/// Multiplies DFT coefficients (FFT order) by `ξ_axis`.
pub(crate) fn apply_derivative_multiplier(grid: &Grid, data: &mut [Complex64], axis: usize) {
    let freqs = grid.axis_frequencies();
    for (flat, v) in data.iter_mut().enumerate() {
        *v *= freqs[grid.axis_index(flat, axis)];
    }
}

/// Free functions mirroring the methods, for call sites that read better
/// as operations.
pub fn spectral_derivative(field: &Field, axis: usize) -> Result<Field> {
    field.spectral_derivative(axis)
}

pub fn coordinate_multiply(field: &Field, axis: usize) -> Result<Field> {
    field.coordinate_multiply(axis)
}

pub fn norm(field: &Field, kind: NormKind) -> Result<f64> {
    field.norm(kind)
}
