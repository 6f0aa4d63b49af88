//! Split-step Fourier integration of `(D_t + Δ + V)u = σ|u|^{p-1}u` through
//! all times, conservation monitors, and the backward final state `f_-`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Field, Grid, NormKind};
use crate::module_norm::{module_norm, ModuleId};
use crate::potential::PotentialSpec;
use crate::solver::{asymptotic_tail, Sign, SolverConfig};

/// Step-size schedule and monitors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveOptions {
    /// Smallest step magnitude.
    pub dt: f64,
    /// Steps grow like `dt_relative · |t|` once that exceeds `dt`.
    pub dt_relative: f64,
    /// Largest step magnitude.
    pub dt_max: f64,
    /// A snapshot is stored every this many steps (and at both ends).
    pub output_every: usize,
    /// Abort when `‖u‖_∞` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    /// Abort when the boundary shell holds more than this mass fraction.
    pub boundary_tolerance: f64,
    /// Bound on `|dt| ξ_eff²` over the occupied part of the spectrum.
    pub kinetic_phase_limit: f64,
    /// Bound on `|dt| (‖V‖_∞ + ‖u‖_∞^{p-1})`.
    pub nonlinear_phase_limit: f64,
    /// Reference time `T` of the virial functional; the start time if unset.
    pub virial_reference: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            dt_relative: 0.0,
            dt_max: 1e-3,
            output_every: 100,
            blowup_factor: 1e3,
            boundary_tolerance: 1e-8,
            kinetic_phase_limit: PI,
            nonlinear_phase_limit: 0.5,
            virial_reference: None,
        }
    }
}

impl EvolveOptions {
    pub fn constant(dt: f64) -> Self {
        Self { dt, dt_max: dt, ..Self::default() }
    }

    fn step_at(&self, t: f64) -> f64 {
        (self.dt_relative * t.abs()).max(self.dt).min(self.dt_max.max(self.dt))
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite() && self.dt_relative >= 0.0 && self.dt_max.is_finite()) {
            return Err(Error::InvalidConfig("step sizes must be positive and finite".into()));
        }
        if self.output_every == 0 {
            return Err(Error::InvalidConfig("output_every must be >= 1".into()));
        }
        Ok(())
    }
}

/// Conserved and monitored quantities at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub t: f64,
    /// `‖u‖²_{L²}`.
    pub mass: f64,
    /// `½‖∇u‖² - σ/(p+1) ∫|u|^{p+1}`, without a potential term.
    pub energy: f64,
    /// `‖(z + 2i(t-T)∇)u‖² + 8(t-T)²/(p+1) ∫|u|^{p+1}`.
    pub virial: f64,
    pub linf: f64,
    pub l4: f64,
    /// `W^k_{M_t}` norm.
    pub module_norm: f64,
    pub boundary_mass: f64,
}

/// Observables of `u` at time `t`, with virial reference time `t_ref`.
pub fn observables(u: &Field, t: f64, t_ref: f64, cfg: &SolverConfig) -> Result<Observables> {
    let grid = *u.grid();
    let mass = u.norm(NormKind::L2)?.powi(2);
    let mut spectrum = u.samples().to_vec();
    fft::forward(&grid, &mut spectrum);
    let xi2 = grid.frequency_squared();
    let scale = grid.cell_volume() / grid.len() as f64;
    let gradient: f64 = spectrum.iter().zip(&xi2).map(|(v, k2)| v.norm_sqr() * k2).sum::<f64>() * scale;
    let p1 = cfg.p as f64 + 1.0;
    let potential_term = if cfg.nonlinear { u.norm(NormKind::Lr(p1))?.powf(p1) / p1 } else { 0.0 };
    let energy = 0.5 * gradient - cfg.sign.sigma() * potential_term;
    let tau = t - t_ref;
    let mut weighted = 0.0;
    for axis in 0..grid.dim() {
        let z = u.coordinate_multiply(axis)?;
        let d = u.spectral_derivative(axis)?;
        let combo = z.sub(&d.scale(Complex64::new(2.0 * tau, 0.0)))?;
        weighted += combo.l2_norm_sqr();
    }
    let virial = weighted + 8.0 * tau * tau * potential_term;
    Ok(Observables {
        t,
        mass,
        energy,
        virial,
        linf: u.sup_norm(),
        l4: u.norm(NormKind::Lr(4.0))?,
        module_norm: module_norm(u, &ModuleId::physical(t, cfg.order)?)?,
        boundary_mass: u.boundary_mass_fraction(),
    })
}

/// Stored state at an output time.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: Field,
    /// `∫_{t_start}^{t} e^{isΔ} G(s) ds` in DFT coefficients (trapezoid over
    /// every step).
    pub duhamel: Vec<Complex64>,
    /// `‖G(t)‖_{W^k_{M_t}}`.
    pub integrand_norm: f64,
    pub observables: Observables,
}

/// Result of a split-step run.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
    pub snapshots: Vec<Snapshot>,
}

impl Extension {
    pub fn samples(&self) -> Vec<(f64, &Field)> {
        self.snapshots.iter().map(|s| (s.t, &s.field)).collect()
    }

    pub fn last(&self) -> &Snapshot {
        &self.snapshots[self.snapshots.len() - 1]
    }

    /// `max |M(t) - M(start)| / M(start)`.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.snapshots[0].observables.mass;
        if m0 == 0.0 {
            return 0.0;
        }
        self.snapshots.iter().map(|s| (s.observables.mass - m0).abs() / m0).fold(0.0, f64::max)
    }

    /// `max_t E / min_t E`.
    pub fn energy_ratio(&self) -> f64 {
        let (lo, hi) = self
            .snapshots
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.observables.energy), hi.max(s.observables.energy)));
        hi / lo
    }

    /// Snapshot whose time equals `t` up to rounding.
    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| (s.t - t).abs() <= 1e-9 * t.abs().max(1.0))
    }
}

struct Stepper<'a> {
    grid: Grid,
    cfg: &'a SolverConfig,
    potential: &'a PotentialSpec,
    opts: &'a EvolveOptions,
    xi2: Vec<f64>,
    half_kinetic: (f64, Vec<Complex64>),
}

impl<'a> Stepper<'a> {
    fn new(grid: Grid, cfg: &'a SolverConfig, potential: &'a PotentialSpec, opts: &'a EvolveOptions) -> Self {
        Self { grid, cfg, potential, opts, xi2: grid.frequency_squared(), half_kinetic: (f64::NAN, Vec::new()) }
    }

    fn kinetic(&mut self, dt: f64) -> &[Complex64] {
        if self.half_kinetic.0 != dt {
            let table = self.xi2.iter().map(|&k2| Complex64::from_polar(1.0, -0.5 * dt * k2)).collect();
            self.half_kinetic = (dt, table);
        }
        &self.half_kinetic.1
    }

    fn check_kinetic(&self, spectrum: &[Complex64], t: f64, dt: f64) -> Result<()> {
        let peak = spectrum.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Ok(());
        }
        let band = spectrum
            .iter()
            .zip(&self.xi2)
            .filter(|(v, _)| v.norm_sqr() > 1e-14 * peak)
            .map(|(_, &k2)| k2)
            .fold(0.0, f64::max);
        if dt.abs() * band > self.opts.kinetic_phase_limit {
            return Err(Error::StepSize {
                t,
                reason: format!("kinetic phase {:.3} exceeds {:.3}", dt.abs() * band, self.opts.kinetic_phase_limit),
            });
        }
        Ok(())
    }

    /// One Strang step from `t` to `t + dt`, in place.
    fn step(&mut self, u: &mut [Complex64], t: f64, dt: f64, check: bool) -> Result<()> {
        let grid = self.grid;
        fft::forward(&grid, u);
        if check {
            self.check_kinetic(u, t, dt)?;
        }
        let k = self.kinetic(dt).to_vec();
        for (v, m) in u.iter_mut().zip(&k) {
            *v *= m;
        }
        fft::inverse(&grid, u);
        let t_mid = t + 0.5 * dt;
        let v = if self.potential.vanishes_at(t_mid) { None } else { Some(self.potential.eval(t_mid, &grid)?) };
        let sigma = self.cfg.sign.sigma();
        let half = (self.cfg.p as i32 - 1) / 2;
        let mut max_phase = 0.0f64;
        for (i, x) in u.iter_mut().enumerate() {
            let mut theta = v.as_ref().map_or(0.0, |v| v.samples()[i].re);
            if self.cfg.nonlinear {
                theta -= sigma * x.norm_sqr().powi(half);
            }
            max_phase = max_phase.max(theta.abs());
            *x *= Complex64::from_polar(1.0, -dt * theta);
        }
        if dt.abs() * max_phase > self.opts.nonlinear_phase_limit {
            return Err(Error::StepSize {
                t,
                reason: format!(
                    "potential/nonlinear phase {:.3} exceeds {:.3}",
                    dt.abs() * max_phase,
                    self.opts.nonlinear_phase_limit
                ),
            });
        }
        fft::forward(&grid, u);
        for (v, m) in u.iter_mut().zip(&k) {
            *v *= m;
        }
        fft::inverse(&grid, u);
        Ok(())
    }

    /// `e^{itΔ} G(t)` in DFT coefficients.
    fn integrand(&self, u: &Field, t: f64) -> Result<(Vec<Complex64>, Field)> {
        let v = if self.potential.vanishes_at(t) { None } else { Some(self.potential.eval(t, &self.grid)?) };
        let g = self.cfg.forcing(u, v.as_ref());
        let mut data = g.samples().to_vec();
        fft::forward(&self.grid, &mut data);
        for (x, &k2) in data.iter_mut().zip(&self.xi2) {
            *x *= Complex64::from_polar(1.0, t * k2);
        }
        Ok((data, g))
    }
}

/// One Strang step: half kinetic, exact phase rotation by
/// `V(t + dt/2) - σ|u|^{p-1}`, half kinetic. `dt` may be negative.
pub fn strang_step(u: &Field, t: f64, dt: f64, potential: &PotentialSpec, cfg: &SolverConfig) -> Result<Field> {
    if !(dt.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument("non-finite time or step".into()));
    }
    let opts = EvolveOptions::constant(dt.abs().max(f64::MIN_POSITIVE));
    let mut stepper = Stepper::new(*u.grid(), cfg, potential, &opts);
    let mut data = u.samples().to_vec();
    stepper.step(&mut data, t, dt, true)?;
    Ok(Field::from_raw(*u.grid(), data, t + dt))
}

/// Integrates from `t0` to `t1` (either direction) and records snapshots.
pub fn evolve(
    u0: &Field,
    t0: f64,
    t1: f64,
    potential: &PotentialSpec,
    cfg: &SolverConfig,
    opts: &EvolveOptions,
) -> Result<Extension> {
    opts.validate()?;
    potential.validate(u0.grid().dim())?;
    if !(t0.is_finite() && t1.is_finite()) || t0 == t1 {
        return Err(Error::InvalidArgument(format!("cannot evolve from {t0} to {t1}")));
    }
    let grid = *u0.grid();
    let direction = (t1 - t0).signum();
    let t_ref = opts.virial_reference.unwrap_or(t0);
    let ceiling = opts.blowup_factor * u0.sup_norm();
    let mut stepper = Stepper::new(grid, cfg, potential, opts);

    let snapshot = |stepper: &Stepper, field: &Field, t: f64, duhamel: &[Complex64]| -> Result<Snapshot> {
        let (_, g) = stepper.integrand(field, t)?;
        let obs = observables(field, t, t_ref, cfg)?;
        if obs.boundary_mass > opts.boundary_tolerance {
            return Err(Error::BoundaryMass { t, fraction: obs.boundary_mass });
        }
        Ok(Snapshot {
            t,
            field: field.clone().with_time(t),
            duhamel: duhamel.to_vec(),
            integrand_norm: module_norm(&g, &ModuleId::physical(t, cfg.order)?)?,
            observables: obs,
        })
    };

    let mut t = t0;
    let mut u = u0.samples().to_vec();
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    let (mut prev, _) = stepper.integrand(u0, t0)?;
    let mut snapshots = vec![snapshot(&stepper, u0, t0, &acc)?];
    let mut steps = 0usize;
    while (t1 - t) * direction > 0.0 {
        let mut dt = direction * opts.step_at(t);
        let last = (t + dt - t1) * direction >= -1e-12 * t1.abs().max(1.0);
        if last {
            dt = t1 - t;
        }
        stepper.step(&mut u, t, dt, steps % 64 == 0)?;
        t = if last { t1 } else { t + dt };
        steps += 1;
        let field = Field::from_raw(grid, u.clone(), t);
        let linf = field.sup_norm();
        if !linf.is_finite() || (ceiling > 0.0 && linf > ceiling) {
            return Err(Error::BlowUp { t, linf, ceiling });
        }
        let (next, _) = stepper.integrand(&field, t)?;
        for ((a, lo), hi) in acc.iter_mut().zip(&prev).zip(&next) {
            *a += (lo + hi) * (0.5 * dt);
        }
        prev = next;
        if last || steps % opts.output_every == 0 {
            snapshots.push(snapshot(&stepper, &field, t, &acc)?);
        }
    }
    Ok(Extension { start: t0, end: t1, steps, snapshots })
}

/// Backward extension from `S` down to `t_end < S`; defocusing only.
pub fn extend_backward(
    u_at_s: &Field,
    s: f64,
    t_end: f64,
    potential: &PotentialSpec,
    cfg: &SolverConfig,
    opts: &EvolveOptions,
) -> Result<Extension> {
    if cfg.sign != Sign::Defocusing {
        return Err(Error::InvalidConfig("global extension requires the defocusing sign".into()));
    }
    if t_end >= s {
        return Err(Error::InvalidArgument(format!("t_end = {t_end} must lie below S = {s}")));
    }
    evolve(u_at_s, s, t_end, potential, cfg, opts)
}

/// Fraction of the peak integrand norm allowed at the far end of the run.
pub const COVERAGE_FRACTION: f64 = 0.01;

/// `f_- = F[e^{it_1Δ}u(t_1) + i ∫_{-∞}^{t_1} e^{isΔ} G(s) ds]`, returned on
/// the dual grid.
///
/// The integral over `[t_end, t_1]` is the stored trapezoid accumulator; the
/// part beyond `t_end` uses the asymptotic tail when `cfg.tail_correction`
/// is set.
pub fn compute_f_minus(ext: &Extension, t1: f64, potential: &PotentialSpec, cfg: &SolverConfig) -> Result<Field> {
    let far = ext.last();
    if far.t >= ext.start {
        return Err(Error::Coverage("trajectory does not run backward".into()));
    }
    let peak = ext.snapshots.iter().map(|s| s.integrand_norm).fold(0.0, f64::max);
    if peak > 0.0 && far.integrand_norm > COVERAGE_FRACTION * peak {
        return Err(Error::Coverage(format!(
            "integrand norm at t_end = {} is {:.3e} of its peak",
            far.t,
            far.integrand_norm / peak
        )));
    }
    let at = ext.snapshot_at(t1).ok_or_else(|| Error::Coverage(format!("no snapshot at t1 = {t1}")))?;
    let grid = *at.field.grid();
    let xi2 = grid.frequency_squared();
    let mut v = at.field.samples().to_vec();
    fft::forward(&grid, &mut v);
    let tail = if cfg.tail_correction { asymptotic_tail(&far.field, far.t, potential, cfg)? } else { None };
    let i = Complex64::new(0.0, 1.0);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k in 0..grid.len() {
        let mut integral = at.duhamel[k] - far.duhamel[k];
        if let Some(tail) = &tail {
            integral += tail[k];
        }
        let coeff = v[k] * Complex64::from_polar(1.0, at.t * xi2[k]) + i * integral;
        out[fft::dual_index(&grid, k)] = fft::lattice_factor(&grid, k) * coeff;
    }
    Ok(Field::from_raw(grid.dual(), out, f64::NEG_INFINITY))
}
