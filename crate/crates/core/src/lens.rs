//! Phase removal, the `ζ = z/2t` frame and the lens profile
//! `U(𝐭, ζ) = (4πit)^{n/2} e^{-it|ζ|²} u(t, 2tζ)` with `𝐭 = 1/(4t)`.
//!
//! ζ-grids are relabeled z-grids: sample `i` of the z-grid is sample `i` of
//! the ζ-grid for `t > 0`, and the mirrored index `(N - i) mod N` per axis
//! for `t < 0`. No interpolation happens anywhere.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::module_norm::{effective_time, onecusp_norm};
use crate::profile::ProfileSpec;

/// Smallest `|t|` accepted by the lens transform.
pub const LENS_MIN_TIME: f64 = 0.5;

fn quadratic_phase(u: &Field, t_eff: f64, sign: f64) -> Field {
    let r2 = u.grid().radius_squared();
    let samples =
        u.samples().iter().zip(&r2).map(|(v, &r)| v * Complex64::from_polar(1.0, sign * r / (4.0 * t_eff))).collect();
    Field::from_raw(*u.grid(), samples, u.time())
}

/// `ũ = e^{-i|z|²/4t} u`, with `t` replaced by `t + 1` for `-1/2 <= t < 1/2`.
pub fn remove_phase(u: &Field, t: f64) -> Result<Field> {
    remove_phase_with(u, t, true)
}

/// [`remove_phase`] with explicit control of the small-time rule.
pub fn remove_phase_with(u: &Field, t: f64, small_time_rule: bool) -> Result<Field> {
    Ok(quadratic_phase(u, effective_time(t, small_time_rule)?, -1.0))
}

/// Inverse of [`remove_phase`].
pub fn add_phase(u: &Field, t: f64) -> Result<Field> {
    add_phase_with(u, t, true)
}

pub fn add_phase_with(u: &Field, t: f64, small_time_rule: bool) -> Result<Field> {
    Ok(quadratic_phase(u, effective_time(t, small_time_rule)?, 1.0))
}

/// `(4πit)^{n/2}` on the principal branch, `exp((n/2) Log(4πit))`.
pub fn lens_prefactor(dim: usize, t: f64) -> Complex64 {
    (Complex64::new(0.0, 4.0 * PI * t).ln() * (dim as f64 / 2.0)).exp()
}

/// Time data and grids of one lens transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensFrame {
    t: f64,
    bold_t: f64,
    z_grid: Grid,
    zeta_grid: Grid,
}

impl LensFrame {
    pub fn new(z_grid: &Grid, t: f64) -> Result<Self> {
        if !t.is_finite() || t.abs() < LENS_MIN_TIME {
            return Err(Error::TimeTooSmall(t));
        }
        Ok(Self { t, bold_t: 1.0 / (4.0 * t), z_grid: *z_grid, zeta_grid: z_grid.rescaled(1.0 / (2.0 * t.abs()))? })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `𝐭 = 1/(4t)`.
    pub fn bold_t(&self) -> f64 {
        self.bold_t
    }

    pub fn z_grid(&self) -> &Grid {
        &self.z_grid
    }

    pub fn zeta_grid(&self) -> &Grid {
        &self.zeta_grid
    }

    /// Flat ζ-grid index holding z-grid sample `flat`.
    pub fn zeta_index(&self, flat: usize) -> usize {
        if self.t > 0.0 {
            return flat;
        }
        let g = &self.z_grid;
        let n = g.points();
        (0..g.dim()).fold(0, |acc, axis| acc * n + (n - g.axis_index(flat, axis)) % n)
    }

    fn relabel(&self, samples: &[Complex64]) -> Vec<Complex64> {
        if self.t > 0.0 {
            return samples.to_vec();
        }
        // The mirror map is an involution, so the same routine serves both ways.
        let mut out = vec![Complex64::new(0.0, 0.0); samples.len()];
        for (flat, v) in samples.iter().enumerate() {
            out[self.zeta_index(flat)] = *v;
        }
        out
    }

    /// Moves z-grid samples onto the ζ-grid without changing any value.
    pub fn relabel_to_zeta(&self, u: &Field) -> Result<Field> {
        if u.grid() != &self.z_grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field::from_raw(self.zeta_grid, self.relabel(u.samples()), u.time()))
    }

    /// Inverse of [`relabel_to_zeta`](Self::relabel_to_zeta).
    pub fn relabel_to_z(&self, profile: &Field) -> Result<Field> {
        if profile.grid() != &self.zeta_grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field::from_raw(self.z_grid, self.relabel(profile.samples()), profile.time()))
    }
}

/// Lens profile `U(𝐭, ·)` of `u` at time `t`, on the relabeled ζ-grid.
pub fn lens_profile(u: &Field, t: f64) -> Result<(Field, LensFrame)> {
    let frame = LensFrame::new(u.grid(), t)?;
    let c = lens_prefactor(u.grid().dim(), t);
    let tilde = quadratic_phase(u, t, -1.0).scale(c);
    Ok((frame.relabel_to_zeta(&tilde)?, frame))
}

/// Inverse of [`lens_profile`]: recovers `u` on the z-grid.
pub fn lens_inverse(profile: &Field, frame: &LensFrame) -> Result<Field> {
    let c = lens_prefactor(frame.z_grid().dim(), frame.t());
    let tilde = frame.relabel_to_z(profile)?.scale(c.inv());
    Ok(quadratic_phase(&tilde, frame.t(), 1.0))
}

/// The field whose lens profile at time `t` is exactly `f` on the ζ-grid.
pub fn profile_lens_inverse(f: &ProfileSpec, t: f64, grid: &Grid) -> Result<Field> {
    let frame = LensFrame::new(grid, t)?;
    lens_inverse(&f.sample(frame.zeta_grid(), t), &frame).map(|u| u.with_time(t))
}

/// `U(𝐭, ·) - f` on the ζ-grid of time `t`.
pub fn lens_error_field(u: &Field, t: f64, f: &ProfileSpec) -> Result<Field> {
    let (profile, frame) = lens_profile(u, t)?;
    profile.sub(&f.sample(frame.zeta_grid(), t))
}

/// `‖U(𝐭, ·) - f‖_{W^k_N}` with `f` evaluated analytically on the ζ-grid.
pub fn final_state_error(u: &Field, t: f64, f: &ProfileSpec, k: usize) -> Result<f64> {
    onecusp_norm(&lens_error_field(u, t, f)?, k)
}
