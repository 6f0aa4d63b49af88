//! The free Schrödinger group `e^{-iτΔ}` and the Poisson operator `P_0`.
//!
//! With `D_t = -i∂_t` and `Δ = -Σ∂²`, solutions of `(D_t + Δ)u = 0` satisfy
//! `û(t+τ) = e^{-iτ|ξ|²} û(t)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Field, Grid};
use crate::profile::{representable_lattice, ProfileSpec};

/// Multiplies DFT coefficients (FFT order) by `e^{-iτ|ξ|²}`.
pub(crate) fn apply_kinetic(xi2: &[f64], data: &mut [Complex64], tau: f64) {
    for (v, &k2) in data.iter_mut().zip(xi2) {
        *v *= Complex64::from_polar(1.0, -tau * k2);
    }
}

/// Solution of the free equation after a time offset `τ`.
pub fn propagate(field: &Field, tau: f64) -> Result<Field> {
    if !tau.is_finite() {
        return Err(Error::InvalidArgument(format!("propagation time {tau} is not finite")));
    }
    let grid = *field.grid();
    let mut data = field.samples().to_vec();
    fft::forward(&grid, &mut data);
    apply_kinetic(&grid.frequency_squared(), &mut data, tau);
    fft::inverse(&grid, &mut data);
    Ok(Field::from_raw(grid, data, field.time() + tau))
}

/// `P_0 f(t) = (2π)^{-n} ∫ e^{-it|ξ|²} e^{iz·ξ} f(ξ) dξ`, with `f` sampled
/// directly on the frequency lattice.
pub fn poisson(f: &ProfileSpec, t: f64, grid: &Grid) -> Result<Field> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    let lattice = representable_lattice(f, grid)?;
    Ok(poisson_lattice(&lattice, t, grid))
}

/// [`poisson`] for a profile already sampled on the dual grid.
pub fn poisson_lattice(lattice: &Field, t: f64, grid: &Grid) -> Field {
    let xi2 = grid.dual().radius_squared();
    let samples: Vec<Complex64> =
        lattice.samples().iter().zip(&xi2).map(|(v, &k2)| v * Complex64::from_polar(1.0, -t * k2)).collect();
    let phased = Field::from_raw(grid.dual(), samples, t);
    fft::from_lattice(&phased, grid).with_time(t)
}
