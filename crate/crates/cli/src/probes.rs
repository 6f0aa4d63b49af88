//! The seeded inequality probe suite.

use scatterlab_core::diagnostics::{
    dilated_field, phase_removed_field, physical_field, probe_decay, probe_gagliardo_nirenberg, probe_multiplication,
    probe_nonlinear_bound, sample_profiles, DecayMode, DecaySource, GnSample, GnStatement, ProbeReport,
};
use scatterlab_core::potential::log_uniform_times;
use scatterlab_core::{Grid, ProfileSpec, Result};
use serde::{Deserialize, Serialize};

use crate::config::{probe_half_width, ExperimentConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSuite {
    pub seed: u64,
    pub multiplication: ProbeReport,
    pub gagliardo_nirenberg: Vec<ProbeReport>,
    pub nonlinear_bound: ProbeReport,
    pub decay: Vec<ProbeReport>,
}

impl ProbeSuite {
    pub fn reports(&self) -> impl Iterator<Item = &ProbeReport> {
        std::iter::once(&self.multiplication)
            .chain(&self.gagliardo_nirenberg)
            .chain(std::iter::once(&self.nonlinear_bound))
            .chain(&self.decay)
    }

    pub fn all_stable(&self) -> bool {
        self.reports().all(|r| r.stable)
    }
}

/// GN statements exercised at module order `k`.
pub fn gn_statements(k: usize) -> Vec<GnStatement> {
    let mut out: Vec<GnStatement> = (1..=k).map(|p| GnStatement::BaseCase { k, p }).collect();
    out.extend((1..=k).map(|l| GnStatement::Corollary { k, l }));
    out.push(GnStatement::ProductBound { k });
    out
}

/// `W^k_{M_{t,0}}`-side probe grid at time `t`.
pub fn probe_grid(dim: usize, t: f64, points: usize) -> Result<Grid> {
    Grid::new(dim, probe_half_width(t), points)
}

pub fn gn_grid(cfg: &ExperimentConfig) -> Result<Grid> {
    Grid::new(cfg.dimension, cfg.probes.gn_half_width, cfg.probes.gn_points)
}

pub fn profiles(cfg: &ExperimentConfig) -> Vec<ProfileSpec> {
    sample_profiles(cfg.dimension, cfg.probes.samples, cfg.seed)
}

pub fn run_multiplication(cfg: &ExperimentConfig, profiles: &[ProfileSpec]) -> Result<ProbeReport> {
    let pc = &cfg.probes;
    let mut samples = Vec::with_capacity(pc.times.len() * profiles.len());
    for &t in &pc.times {
        let grid = probe_grid(cfg.dimension, t, pc.multiplication_points)?;
        for (i, g) in profiles.iter().enumerate() {
            let partner = &profiles[(i + 1) % profiles.len()];
            samples.push((phase_removed_field(g, t, &grid), phase_removed_field(partner, t, &grid), t));
        }
    }
    probe_multiplication(&samples, pc.multiplication_order)
}

pub fn run_gagliardo_nirenberg(cfg: &ExperimentConfig, profiles: &[ProfileSpec]) -> Result<Vec<ProbeReport>> {
    let pc = &cfg.probes;
    let grid = gn_grid(cfg)?;
    let mut samples = Vec::with_capacity(pc.dilations.len() * profiles.len());
    for &lambda in &pc.dilations {
        for (i, g) in profiles.iter().enumerate() {
            let partner = &profiles[(i + 1) % profiles.len()];
            samples.push(GnSample {
                u: dilated_field(g, lambda, &grid),
                partner: Some(dilated_field(partner, lambda, &grid)),
                parameter: lambda,
            });
        }
    }
    gn_statements(pc.gn_order).into_iter().map(|s| probe_gagliardo_nirenberg(&samples, s, pc.gn_spread_limit)).collect()
}

pub fn run_nonlinear(cfg: &ExperimentConfig, profiles: &[ProfileSpec]) -> Result<ProbeReport> {
    let pc = &cfg.probes;
    let mut samples = Vec::with_capacity(pc.times.len() * profiles.len());
    for &t in &pc.times {
        let grid = probe_grid(cfg.dimension, t, pc.nonlinear_points)?;
        samples.extend(profiles.iter().map(|g| (physical_field(g, t, &grid), t)));
    }
    probe_nonlinear_bound(&samples, cfg.solver.p, cfg.solver.order)
}

/// Lebesgue exponents checked on the potential in dimension `dim`.
pub fn decay_exponents(dim: usize) -> Vec<f64> {
    match dim {
        1 => vec![4.0, f64::INFINITY],
        2 => vec![4.0, 8.0],
        _ => vec![4.0, 6.0],
    }
}

/// Decay of `⟨t⟩V(t)`; empty for the zero potential.
pub fn run_potential_decay(cfg: &ExperimentConfig) -> Result<Vec<ProbeReport>> {
    if cfg.potential.is_zero() {
        return Ok(Vec::new());
    }
    let pc = &cfg.probes;
    let grid = cfg.grid();
    let times = log_uniform_times(pc.decay_t_min, pc.decay_t_max, pc.decay_samples);
    decay_exponents(cfg.dimension)
        .into_iter()
        .map(|r| {
            let source = DecaySource::Potential { spec: &cfg.potential, grid: &grid, times: &times };
            probe_decay(source, r, DecayMode::ModuleClass)
        })
        .collect()
}

/// Every probe that needs no solver output.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<ProbeSuite> {
    let profiles = profiles(cfg);
    Ok(ProbeSuite {
        seed: cfg.seed,
        multiplication: run_multiplication(cfg, &profiles)?,
        gagliardo_nirenberg: run_gagliardo_nirenberg(cfg, &profiles)?,
        nonlinear_bound: run_nonlinear(cfg, &profiles)?,
        decay: run_potential_decay(cfg)?,
    })
}
