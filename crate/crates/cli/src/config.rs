//! Experiment configuration, read from TOML.
//!
//! ```toml
//! dimension = 1
//! seed = 7
//! output_dir = "out/reference"
//!
//! [grid]
//! half_width = 1000.0
//! points = 4096
//!
//! [solver]          # any SolverConfig field; `dim` comes from `dimension`
//! p = 5
//!
//! [profile]
//! family = "gaussian"
//! amplitude = 1.0
//! width = 0.8
//!
//! [potential]
//! family = "self_similar"
//! amplitude = 0.5
//! profile = { family = "gaussian", amplitude = 1.0, width = 1.0 }
//! ```
//!
//! The remaining tables (`evolve`, `extend`, `rates`, `admissibility`,
//! `probes`) are optional and documented on their structs.

use std::path::{Path, PathBuf};

use anyhow::Context;
use scatterlab_core::{admissible_np, EvolveOptions, Grid, PotentialSpec, ProfileSpec, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
}

/// Backward extension from `S` to `t_end_factor · S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtendConfig {
    pub enabled: bool,
    pub t_end_factor: f64,
    /// Number of matching times `t_1` at which `f_-` is evaluated.
    pub f_minus_times: usize,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        Self { enabled: true, t_end_factor: -64.0, f_minus_times: 3 }
    }
}

/// Final-state error fit over `[S, window_factor · S]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateConfig {
    pub window_factor: f64,
    /// Order of the `W^j_N` error norm; `k - 2` when unset.
    pub error_order: Option<usize>,
    pub tolerance: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        Self { window_factor: 16.0, error_order: None, tolerance: 0.15 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdmissibilityConfig {
    pub enabled: bool,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
}

impl Default for AdmissibilityConfig {
    fn default() -> Self {
        Self { enabled: true, t_min: 0.5, t_max: 64.0, samples: 16 }
    }
}

/// Inequality probe suite. Grids are per probe: the multiplication and
/// nonlinear probes use `[-24t, 24t)` at each probe time, the GN chain a
/// fixed ζ-box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub enabled: bool,
    pub samples: usize,
    pub times: Vec<f64>,
    pub dilations: Vec<f64>,
    pub multiplication_order: usize,
    pub multiplication_points: usize,
    pub nonlinear_points: usize,
    pub gn_order: usize,
    pub gn_half_width: f64,
    pub gn_points: usize,
    /// Largest GN ratio spread accepted across dilations.
    pub gn_spread_limit: f64,
    /// Decay probe times for the potential source.
    pub decay_t_min: f64,
    pub decay_t_max: f64,
    pub decay_samples: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            samples: 32,
            times: vec![2.0, 8.0, 32.0],
            dilations: vec![0.5, 1.0, 2.0],
            multiplication_order: 1,
            multiplication_points: 512,
            nonlinear_points: 8192,
            gn_order: 2,
            gn_half_width: 24.0,
            gn_points: 1024,
            gn_spread_limit: 10.0,
            decay_t_min: 4.0,
            decay_t_max: 64.0,
            decay_samples: 9,
        }
    }
}

/// Half width of the probe box at time `t`.
pub fn probe_half_width(t: f64) -> f64 {
    24.0 * t
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    pub profile: ProfileSpec,
    #[serde(default = "PotentialSpec::zero")]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub evolve: EvolveOptions,
    #[serde(default)]
    pub extend: ExtendConfig,
    #[serde(default)]
    pub rates: RateConfig,
    #[serde(default)]
    pub admissibility: AdmissibilityConfig,
    #[serde(default)]
    pub probes: ProbeConfig,
}

fn default_seed() -> u64 {
    7
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

/// A configuration that failed validation; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationError {
    pub field: String,
    pub reason: String,
}

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

impl std::error::Error for ValidationError {}

fn invalid(field: &str, reason: impl Into<String>) -> ValidationError {
    ValidationError { field: field.into(), reason: reason.into() }
}

/// Cap on the number of points of any probe grid.
const MAX_PROBE_POINTS: usize = 1 << 24;

impl ExperimentConfig {
    /// Parses TOML. `solver.dim`, if present, must agree with `dimension`.
    pub fn from_toml(text: &str) -> Result<Self, ValidationError> {
        let raw: toml::Value = toml::from_str(text).map_err(|e| invalid("config", e.to_string()))?;
        let explicit_dim = raw.get("solver").and_then(|s| s.get("dim")).and_then(|d| d.as_integer());
        let mut cfg: ExperimentConfig =
            raw.try_into().map_err(|e: toml::de::Error| invalid("config", e.to_string()))?;
        if let Some(d) = explicit_dim {
            if d != cfg.dimension as i64 {
                return Err(invalid("solver.dim", format!("{d} differs from dimension = {}", cfg.dimension)));
            }
        }
        cfg.solver.dim = cfg.dimension;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Result<Self, ValidationError>> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(Self::from_toml(&text))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.dimension, self.grid.half_width, self.grid.points).expect("validated grid")
    }

    /// Order of the final-state error norm.
    pub fn error_order(&self) -> usize {
        self.rates.error_order.unwrap_or(self.solver.order - 2)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let n = self.dimension;
        if !(1..=3).contains(&n) {
            return Err(invalid("dimension", format!("{n} is not in 1..=3")));
        }
        if !admissible_np(n, self.solver.p) {
            return Err(invalid("solver.p", format!("(n, p) = ({n}, {}) is not admissible", self.solver.p)));
        }
        if self.solver.order < 2 {
            return Err(invalid("solver.order", "module order k must be at least 2"));
        }
        if !self.grid.points.is_power_of_two() {
            return Err(invalid("grid.points", format!("{} is not a power of two", self.grid.points)));
        }
        Grid::new(n, self.grid.half_width, self.grid.points).map_err(|e| invalid("grid", e.to_string()))?;
        self.solver.validate().map_err(|e| invalid("solver", e.to_string()))?;
        self.profile.validate(n).map_err(|e| invalid("profile", e.to_string()))?;
        self.potential.validate(n).map_err(|e| invalid("potential", e.to_string()))?;
        if self.error_order() > self.solver.order {
            return Err(invalid("rates.error_order", "must not exceed the module order"));
        }
        if !(self.rates.window_factor > 1.0 && self.rates.window_factor <= self.solver.t_max_factor) {
            return Err(invalid("rates.window_factor", "must lie in (1, solver.t_max_factor]"));
        }
        if self.extend.enabled && !(self.extend.t_end_factor < 1.0 && self.extend.t_end_factor.is_finite()) {
            return Err(invalid("extend.t_end_factor", "must be finite and below 1"));
        }
        let p = &self.probes;
        if p.enabled {
            if p.samples < 2 {
                return Err(invalid("probes.samples", "need at least two samples"));
            }
            if p.times.is_empty() || p.times.iter().any(|&t| !(t >= 0.5 && t.is_finite())) {
                return Err(invalid("probes.times", "probe times must be finite and >= 1/2"));
            }
            if p.dilations.is_empty() || p.dilations.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(invalid("probes.dilations", "dilations must be positive"));
            }
            for (name, points) in [
                ("probes.multiplication_points", p.multiplication_points),
                ("probes.nonlinear_points", p.nonlinear_points),
                ("probes.gn_points", p.gn_points),
            ] {
                if !points.is_power_of_two() || points < 4 {
                    return Err(invalid(name, format!("{points} is not a power of two >= 4")));
                }
                if points.checked_pow(n as u32).map_or(true, |total| total > MAX_PROBE_POINTS) {
                    return Err(invalid(name, format!("{points}^{n} points exceed the probe grid cap")));
                }
            }
            if 2 * p.multiplication_order <= n {
                return Err(invalid("probes.multiplication_order", "the multiplication rule needs k > n/2"));
            }
            if p.decay_samples < 5 {
                return Err(invalid("probes.decay_samples", "need at least 5 times"));
            }
        }
        Ok(())
    }
}
