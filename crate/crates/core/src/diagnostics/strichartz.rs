use serde::{Deserialize, Serialize};

use super::lebesgue;
use crate::error::{Error, Result};
use crate::grid::{Field, NormKind};

/// Share of the accumulated integral allowed in the last decade of time.
pub const LAST_DECADE_SHARE_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case")]
pub enum StrichartzNorm {
    /// `∫ ‖u(t)‖_{L^r}^q dt` for an admissible pair.
    Pair { q: f64, r: f64 },
    /// `∫ ‖u(t)‖_∞^{p-1} dt`.
    NonlinearControl { p: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    pub norm: StrichartzNorm,
    /// Trapezoidal integral, or the supremum when `q = ∞`.
    pub total: f64,
    /// Part of `total` coming from `t >= t_last / 10`. For `q = ∞` this is
    /// 1 when the supremum is reached in the last decade and 0 otherwise.
    pub last_decade_share: f64,
    pub stabilized: bool,
    pub samples: usize,
}

/// `2/q + n/r = n/2` with `q, r >= 2`, excluding the endpoints
/// `(∞, 2)` and `(2, ∞)` in two dimensions.
pub fn check_admissible_pair(q: f64, r: f64, dim: usize) -> Result<()> {
    let inadmissible = || Error::InadmissiblePair { q, r, dim };
    if q.is_nan() || r.is_nan() || q < 2.0 || r < 2.0 || !(1..=3).contains(&dim) {
        return Err(inadmissible());
    }
    let n = dim as f64;
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if (2.0 * inv(q) + n * inv(r) - n / 2.0).abs() > 1e-12 {
        return Err(inadmissible());
    }
    if dim == 2 && (q.is_infinite() || r.is_infinite()) {
        return Err(inadmissible());
    }
    Ok(())
}

/// Accumulates the space-time norm over `samples` (any order; sorted by
/// time here) and flags stabilization when the last decade contributes
/// less than [`LAST_DECADE_SHARE_LIMIT`].
pub fn strichartz_accumulate(samples: &[(f64, &Field)], norm: StrichartzNorm, dim: usize) -> Result<StrichartzReport> {
    let (kind, power) = match norm {
        StrichartzNorm::Pair { q, r } => {
            check_admissible_pair(q, r, dim)?;
            (lebesgue(r), q)
        }
        StrichartzNorm::NonlinearControl { p } => {
            if p < 2 {
                return Err(Error::InvalidArgument(format!("nonlinear control needs p >= 2, got {p}")));
            }
            (NormKind::Linf, f64::from(p - 1))
        }
    };
    let mut values = Vec::with_capacity(samples.len());
    for (t, u) in samples {
        if u.grid().dim() != dim {
            return Err(Error::GridMismatch);
        }
        if !t.is_finite() {
            return Err(Error::NonFinite("sample time".into()));
        }
        values.push((*t, u.norm(kind)?));
    }
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let t_last = values.last().map_or(0.0, |v| v.0);
    let cut = t_last / 10.0;
    let (total, tail) = if power.is_infinite() {
        let sup = values.iter().map(|v| v.1).fold(0.0, f64::max);
        let late = values.iter().filter(|v| t_last > 0.0 && v.0 >= cut).map(|v| v.1).fold(0.0, f64::max);
        (sup, if late < sup { 0.0 } else { late })
    } else {
        let mut total = 0.0;
        let mut tail = 0.0;
        for w in values.windows(2) {
            let piece = 0.5 * (w[1].0 - w[0].0) * (w[0].1.powf(power) + w[1].1.powf(power));
            total += piece;
            if t_last > 0.0 && w[0].0 >= cut {
                tail += piece;
            }
        }
        (total, tail)
    };
    let last_decade_share = if total > 0.0 { tail / total } else { 0.0 };
    Ok(StrichartzReport {
        norm,
        total,
        last_decade_share,
        stabilized: total.is_finite() && last_decade_share < LAST_DECADE_SHARE_LIMIT,
        samples: values.len(),
    })
}
