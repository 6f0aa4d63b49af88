//! Empirical probes for the inequalities with unquantified constants, decay
//! slope checks, Strichartz accumulation and log-log rate fits.
//!
//! A probe evaluates `left / right` with the constant stripped. The verdict
//! rests on two things: every ratio is finite and positive, and the maximum
//! ratio does not drift with the parameter the constant is independent of
//! (time, dilation scale).

use serde::{Deserialize, Serialize};

mod decay;
mod gn;
mod probes;
mod rate;
mod sampling;
mod strichartz;

pub use decay::{decay_reference_slope, probe_decay, DecayMode, DecaySource};
pub use gn::{probe_gagliardo_nirenberg, v_norms, GnSample, GnStatement};
pub use probes::{probe_multiplication, probe_nonlinear_bound};
pub use rate::{least_squares_loglog, rate_fit, RateFit};
pub use sampling::{
    dilated_field, phase_removed_field, physical_field, sample_profiles, SampleFamily, DEFAULT_SAMPLE_COUNT,
};
pub use strichartz::{
    check_admissible_pair, strichartz_accumulate, StrichartzNorm, StrichartzReport, LAST_DECADE_SHARE_LIMIT,
};

/// One evaluated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub label: String,
    /// Time or scale the sample belongs to; samples are grouped by it.
    pub parameter: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// Slope comparison attached to decay probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeCheck {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub reference: f64,
    pub tolerance: f64,
    /// One-sided checks accept any slope below `reference + tolerance`.
    pub one_sided: bool,
    pub passed: bool,
}

impl SlopeCheck {
    fn new(fit: RateFit, reference: f64, tolerance: f64, one_sided: bool) -> Self {
        let passed =
            if one_sided { fit.slope <= reference + tolerance } else { (fit.slope - reference).abs() <= tolerance };
        Self {
            slope: fit.slope,
            intercept: fit.intercept,
            residual: fit.residual,
            reference,
            tolerance,
            one_sided,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: String,
    pub samples: Vec<ProbeSample>,
    /// Labels of samples dropped because both sides vanish.
    pub excluded: Vec<String>,
    pub max_ratio: Option<f64>,
    /// `(parameter, max ratio)` per parameter group, in first-seen order.
    pub group_maxima: Vec<(f64, f64)>,
    /// Largest over smallest group maximum.
    pub spread: f64,
    pub spread_limit: f64,
    pub fit: Option<SlopeCheck>,
    pub stable: bool,
}

impl ProbeReport {
    pub(crate) fn build(
        probe: impl Into<String>,
        samples: Vec<ProbeSample>,
        excluded: Vec<String>,
        spread_limit: f64,
        fit: Option<SlopeCheck>,
    ) -> Self {
        let mut group_maxima: Vec<(f64, f64)> = Vec::new();
        for s in &samples {
            match group_maxima.iter_mut().find(|(p, _)| *p == s.parameter) {
                Some(entry) => entry.1 = entry.1.max(s.ratio),
                None => group_maxima.push((s.parameter, s.ratio)),
            }
        }
        let max_ratio = samples.iter().map(|s| s.ratio).reduce(f64::max);
        let hi = group_maxima.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
        let lo = group_maxima.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
        let spread = if group_maxima.is_empty() { 1.0 } else { hi / lo };
        let ratios_ok = samples.iter().all(|s| s.ratio.is_finite() && s.ratio > 0.0);
        let stable = !samples.is_empty()
            && ratios_ok
            && spread.is_finite()
            && spread <= spread_limit
            && fit.as_ref().map_or(true, |f| f.passed);
        Self { probe: probe.into(), samples, excluded, max_ratio, group_maxima, spread, spread_limit, fit, stable }
    }
}

/// Records `lhs / rhs`, or the exclusion when both sides vanish.
pub(crate) fn push_ratio(
    samples: &mut Vec<ProbeSample>,
    excluded: &mut Vec<String>,
    label: String,
    parameter: f64,
    lhs: f64,
    rhs: f64,
) -> crate::error::Result<()> {
    if rhs == 0.0 {
        if lhs == 0.0 {
            excluded.push(label);
            return Ok(());
        }
        return Err(crate::error::Error::DegenerateSeries(format!(
            "{label}: right side vanishes while the left side is {lhs:.3e}"
        )));
    }
    samples.push(ProbeSample { label, parameter, lhs, rhs, ratio: lhs / rhs });
    Ok(())
}

/// `L^r` norm kind, with `r = ∞` mapped to the sup norm.
pub(crate) fn lebesgue(r: f64) -> crate::grid::NormKind {
    use crate::grid::NormKind;
    if r.is_infinite() {
        NormKind::Linf
    } else if r == 2.0 {
        NormKind::L2
    } else {
        NormKind::Lr(r)
    }
}
