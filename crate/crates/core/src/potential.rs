//! Time-dependent potentials `V(t, z)` and their admissibility check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::module_norm::{module_norm, ModuleId};
use crate::profile::ProfileSpec;
use crate::propagator::poisson;
use crate::quadrature::{integrate, integrate_to_infinity};

/// Potential families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PotentialFamily {
    Zero,
    /// `a ⟨t⟩^{-1} (2t_*)^{-n/2} φ(z/2t_*)` with `t_* = max(|t|, 1/2)`.
    SelfSimilar {
        amplitude: f64,
        profile: ProfileSpec,
    },
    /// `|P_0 g(t)|^{p-1}`.
    NlsInduced {
        profile: ProfileSpec,
        p: u32,
    },
    /// Time-independent `a φ(z)`. Outside the admissible class; kept as a
    /// negative fixture for the validator.
    Static {
        amplitude: f64,
        profile: ProfileSpec,
    },
}

/// A potential family plus an optional switch-off time: `V = 0` for
/// `|t| > cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub family: PotentialFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    /// Filled in by [`PotentialSpec::with_bound`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admissibility_bound: Option<f64>,
}

/// Japanese bracket `⟨t⟩ = (1 + t²)^{1/2}`.
pub fn bracket(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

/// Self-similar time scale, continuous across the small-time window.
fn self_similar_scale(t: f64) -> f64 {
    t.abs().max(0.5)
}

impl PotentialSpec {
    pub fn zero() -> Self {
        Self::new(PotentialFamily::Zero)
    }

    pub fn new(family: PotentialFamily) -> Self {
        Self { family, cutoff: None, admissibility_bound: None }
    }

    pub fn self_similar(amplitude: f64, profile: ProfileSpec) -> Self {
        Self::new(PotentialFamily::SelfSimilar { amplitude, profile })
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.cutoff = Some(cutoff);
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.admissibility_bound = Some(bound);
        self
    }

    pub fn is_zero(&self) -> bool {
        match &self.family {
            PotentialFamily::Zero => true,
            PotentialFamily::SelfSimilar { amplitude, profile } | PotentialFamily::Static { amplitude, profile } => {
                *amplitude == 0.0 || profile.is_zero()
            }
            PotentialFamily::NlsInduced { profile, .. } => profile.is_zero(),
        }
    }

    /// True when `V(t) = 0` identically.
    pub fn vanishes_at(&self, t: f64) -> bool {
        self.is_zero() || self.cutoff.is_some_and(|c| t.abs() > c)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if let Some(c) = self.cutoff {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::InvalidConfig(format!("potential cutoff {c} must be >= 0")));
            }
        }
        match &self.family {
            PotentialFamily::Zero => Ok(()),
            PotentialFamily::SelfSimilar { amplitude, profile } | PotentialFamily::Static { amplitude, profile } => {
                if !amplitude.is_finite() {
                    return Err(Error::InvalidConfig("potential amplitude is not finite".into()));
                }
                profile.validate(dim)?;
                if !profile.is_real() {
                    return Err(Error::InvalidConfig("potential profile must be real-valued".into()));
                }
                Ok(())
            }
            PotentialFamily::NlsInduced { profile, p } => {
                if *p < 2 {
                    return Err(Error::InvalidConfig(format!("nls_induced power {p} must be >= 2")));
                }
                profile.validate(dim)
            }
        }
    }

    /// `V(t, ·)` on `grid`; the imaginary part is exactly zero.
    pub fn eval(&self, t: f64, grid: &Grid) -> Result<Field> {
        if !t.is_finite() {
            return Err(Error::InvalidArgument(format!("time {t} is not finite")));
        }
        if self.vanishes_at(t) {
            return Ok(Field::zeros(*grid, t));
        }
        let real = |x: f64| Complex64::new(x, 0.0);
        let n = grid.dim() as f64;
        let field = match &self.family {
            PotentialFamily::Zero => Field::zeros(*grid, t),
            PotentialFamily::SelfSimilar { amplitude, profile } => {
                let ts = self_similar_scale(t);
                let c = amplitude / bracket(t) * (2.0 * ts).powf(-n / 2.0);
                let mut zeta = [0.0; 3];
                Field::from_fn(*grid, t, |z| {
                    for (dst, &x) in zeta.iter_mut().zip(z) {
                        *dst = x / (2.0 * ts);
                    }
                    real(c * profile.evaluate(&zeta[..z.len()]).re)
                })
            }
            PotentialFamily::NlsInduced { profile, p } => {
                poisson(profile, t, grid)?.map(|v| real(v.norm().powi(*p as i32 - 1)))
            }
            PotentialFamily::Static { amplitude, profile } => {
                Field::from_fn(*grid, t, |z| real(amplitude * profile.evaluate(z).re))
            }
        };
        Ok(field.with_time(t))
    }

    /// Leading-order asymptotic weight `A(ξ) = ∫ V(s, 2sξ) ds` over the tail
    /// beyond `edge` (towards `+∞` for `edge > 0`, `-∞` for `edge < 0`),
    /// sampled on the dual grid of `grid`.
    ///
    /// `None` when the family has no self-similar asymptotics or the tail
    /// integral diverges.
    pub fn tail_weight(&self, edge: f64, grid: &Grid) -> Result<Option<Field>> {
        let dual = grid.dual();
        if self.is_zero() {
            return Ok(Some(Field::zeros(dual, edge)));
        }
        let start = edge.abs();
        let end = self.cutoff.unwrap_or(f64::INFINITY);
        if start >= end {
            return Ok(Some(Field::zeros(dual, edge)));
        }
        let n = grid.dim() as f64;
        let scalar = |g: &dyn Fn(f64) -> f64| -> f64 {
            if end.is_finite() {
                integrate(g, start, end, 64)
            } else {
                integrate_to_infinity(g, start)
            }
        };
        let weight = match &self.family {
            PotentialFamily::Zero => return Ok(Some(Field::zeros(dual, edge))),
            PotentialFamily::Static { .. } => return Ok(None),
            PotentialFamily::SelfSimilar { amplitude, profile } => {
                let c = scalar(&|s| amplitude / bracket(s) * (2.0 * self_similar_scale(s)).powf(-n / 2.0));
                // For s < 0 the argument 2sξ/(2|s|) is -ξ.
                let sign = edge.signum();
                let mut zeta = [0.0; 3];
                Field::from_fn(dual, edge, |xi| {
                    for (dst, &x) in zeta.iter_mut().zip(xi) {
                        *dst = sign * x;
                    }
                    Complex64::new(c * profile.evaluate(&zeta[..xi.len()]).re, 0.0)
                })
            }
            PotentialFamily::NlsInduced { profile, p } => {
                let q = n * (*p as f64 - 1.0) / 2.0;
                if q <= 1.0 && !end.is_finite() {
                    return Ok(None);
                }
                let c = scalar(&|s| (4.0 * PI * s).powf(-q));
                Field::from_fn(dual, edge, |xi| {
                    Complex64::new(c * profile.evaluate(xi).norm().powi(*p as i32 - 1), 0.0)
                })
            }
        };
        Ok(Some(weight))
    }
}

/// Sampled admissibility bound `sup_t ⟨t⟩ ‖V(t)‖_{W^k_{M_{t,0}}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub order: usize,
    /// `(t, ⟨t⟩ ‖V(t)‖_{W^k_{M_{t,0}}})` per sample.
    pub samples: Vec<(f64, f64)>,
    pub bound: f64,
    /// Running maximum at the last sample over the running maximum one
    /// decade earlier.
    pub last_decade_growth: f64,
    pub admissible: bool,
}

/// Growth factor over the last decade above which a potential is flagged.
pub const ADMISSIBILITY_GROWTH_LIMIT: f64 = 2.0;

/// Evaluates `⟨t⟩ ‖V(t)‖_{W^k_{M_{t,0}}}` on `t_samples` and flags growth
/// of more than a factor two across the last decade.
pub fn admissibility_bound(
    spec: &PotentialSpec,
    k: usize,
    t_samples: &[f64],
    grid: &Grid,
) -> Result<AdmissibilityReport> {
    if t_samples.len() < 16 {
        return Err(Error::InvalidArgument(format!(
            "admissibility check needs at least 16 time samples, got {}",
            t_samples.len()
        )));
    }
    if t_samples.windows(2).any(|w| w[1] <= w[0]) || t_samples[0] <= 0.0 {
        return Err(Error::InvalidArgument("time samples must be positive and increasing".into()));
    }
    spec.validate(grid.dim())?;
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let v = spec.eval(t, grid)?;
        let norm = module_norm(&v, &ModuleId::phase_removed(t, k)?)?;
        samples.push((t, bracket(t) * norm));
    }
    let mut running = Vec::with_capacity(samples.len());
    let mut max = 0.0f64;
    for &(_, value) in &samples {
        max = max.max(value);
        running.push(max);
    }
    let t_last = samples[samples.len() - 1].0;
    let earlier = samples.iter().rposition(|&(t, _)| t <= t_last / 10.0).unwrap_or(0);
    let last_decade_growth = if running[earlier] > 0.0 { max / running[earlier] } else { 1.0 };
    Ok(AdmissibilityReport {
        order: k,
        samples,
        bound: max,
        last_decade_growth,
        admissible: last_decade_growth <= ADMISSIBILITY_GROWTH_LIMIT,
    })
}

/// A log-uniform sample set on `[t_min, t_max]`.
pub fn log_uniform_times(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    let ratio = (t_max / t_min).ln();
    (0..count)
        .map(|i| if i + 1 == count { t_max } else { t_min * (ratio * i as f64 / (count - 1) as f64).exp() })
        .collect()
}
