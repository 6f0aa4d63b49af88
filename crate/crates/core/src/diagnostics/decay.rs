use serde::{Deserialize, Serialize};

use super::{lebesgue, push_ratio, rate::least_squares_loglog, ProbeReport, SlopeCheck};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::potential::{bracket, PotentialSpec};

/// Which decay rate a series is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayMode {
    /// `‖W(t)‖_{L^r} ~ t^{-n(1/2-1/r)}`, checked two-sided within 0.05.
    ModuleClass,
    /// NLS solutions with weighted data: slope at most
    /// `-n(1/2+n/8)(1/2-1/r) + 0.1`.
    NlsWeighted,
    /// `n = 3`, `r = 3/2`: `‖W(t)‖_{L^{3/2}}` grows at most like `t^{2/3}`.
    ThreeHalves,
}

/// Input of the decay probe.
#[derive(Debug, Clone, Copy)]
pub enum DecaySource<'a> {
    /// `W(t) = ⟨t⟩ V(t)` sampled on `grid` at `times`.
    Potential { spec: &'a PotentialSpec, grid: &'a Grid, times: &'a [f64] },
    /// Fields tagged with their times, e.g. trajectory or extension samples.
    Series(&'a [(f64, &'a Field)]),
}

/// Reference slope and whether the check is one-sided.
pub fn decay_reference_slope(mode: DecayMode, dim: usize, r: f64) -> Result<(f64, f64, bool)> {
    let n = dim as f64;
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    let in_range = match dim {
        1 => r >= 2.0,
        2 => r >= 2.0 && r.is_finite(),
        3 => (2.0..=6.0).contains(&r),
        _ => false,
    };
    match mode {
        DecayMode::ThreeHalves if dim == 3 && r == 1.5 => Ok((2.0 / 3.0, 0.05, true)),
        DecayMode::ThreeHalves => {
            Err(Error::InvalidArgument("the L^{3/2} bound is stated for n = 3, r = 3/2 only".into()))
        }
        _ if !in_range => Err(Error::InvalidArgument(format!("r = {r} is outside the admissible range for n = {dim}"))),
        DecayMode::ModuleClass => Ok((-n * (0.5 - inv_r), 0.05, false)),
        DecayMode::NlsWeighted => Ok((-n * (0.5 + n / 8.0) * (0.5 - inv_r), 0.1, true)),
    }
}

/// Fits `log ‖W(t)‖_{L^r}` against `log t` and compares with the
/// reference slope of `mode`. Each sample records `‖W(t)‖ / t^{slope_ref}`.
pub fn probe_decay(source: DecaySource<'_>, r: f64, mode: DecayMode) -> Result<ProbeReport> {
    let kind = lebesgue(r);
    let (dim, series) = match source {
        DecaySource::Potential { spec, grid, times } => {
            spec.validate(grid.dim())?;
            let mut out = Vec::with_capacity(times.len());
            for &t in times {
                let w = spec.eval(t, grid)?;
                out.push((t, bracket(t) * w.norm(kind)?));
            }
            (grid.dim(), out)
        }
        DecaySource::Series(samples) => {
            let dim = samples.first().map_or(1, |s| s.1.grid().dim());
            let mut out = Vec::with_capacity(samples.len());
            for (t, u) in samples {
                out.push((*t, u.norm(kind)?));
            }
            (dim, out)
        }
    };
    if series.len() < 5 {
        return Err(Error::InvalidArgument(format!("decay probe needs at least 5 time samples, got {}", series.len())));
    }
    let (reference, tolerance, one_sided) = decay_reference_slope(mode, dim, r)?;
    let fit = least_squares_loglog(&series)?;
    let check = SlopeCheck::new(fit, reference, tolerance, one_sided);
    let mut samples = Vec::with_capacity(series.len());
    let mut excluded = Vec::new();
    for &(t, norm) in &series {
        push_ratio(&mut samples, &mut excluded, format!("t = {t}"), t, norm, t.powf(reference))?;
    }
    let name = format!("decay(r={r},{mode:?})");
    Ok(ProbeReport::build(name, samples, excluded, f64::INFINITY, Some(check)))
}
