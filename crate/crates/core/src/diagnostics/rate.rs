use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(log t, log err)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

/// Fit without the sample-count and span preconditions of [`rate_fit`].
pub fn least_squares_loglog(series: &[(f64, f64)]) -> Result<RateFit> {
    if series.len() < 2 {
        return Err(Error::DegenerateSeries("need at least two points".into()));
    }
    for &(t, e) in series {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::DegenerateSeries(format!("abscissa {t} is not positive")));
        }
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::DegenerateSeries(format!("value {e} at t = {t} is not positive")));
        }
    }
    let m = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let xm = xs.iter().sum::<f64>() / m;
    let ym = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateSeries("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(RateFit { slope, intercept, residual: (ss / m).sqrt(), points: series.len() })
}

/// Log-log convergence rate of `err(t)`; needs at least six points
/// spanning a decade.
pub fn rate_fit(series: &[(f64, f64)]) -> Result<RateFit> {
    if series.len() < 6 {
        return Err(Error::InvalidArgument(format!("rate fit needs at least 6 points, got {}", series.len())));
    }
    let lo = series.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = series.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0) || hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "rate fit needs a positive range spanning a decade, got [{lo}, {hi}]"
        )));
    }
    least_squares_loglog(series)
}
