use super::{push_ratio, ProbeReport};
use crate::error::{Error, Result};
use crate::grid::Field;
use crate::module_norm::{module_norm, ModuleId, MAX_ORDER};
use crate::potential::bracket;

/// Ratios `‖uv‖_{W^k_{M_{t,0}}} / (⟨t⟩^{-n/2} ‖u‖_{W^k_{M_{t,0}}} ‖v‖_{W^k_{M_{t,0}}})`.
///
/// Samples are grouped by `t`; the report is stable when the group maxima
/// agree within a factor 3.
pub fn probe_multiplication(samples: &[(Field, Field, f64)], k: usize) -> Result<ProbeReport> {
    let mut out = Vec::with_capacity(samples.len());
    let mut excluded = Vec::new();
    for (i, (u, v, t)) in samples.iter().enumerate() {
        let n = u.grid().dim();
        if 2 * k <= n || k > MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "multiplication probe needs n/2 < k <= {MAX_ORDER}, got k = {k}, n = {n}"
            )));
        }
        let module = ModuleId::phase_removed(*t, k)?;
        let lhs = module_norm(&u.mul(v)?, &module)?;
        let rhs = bracket(*t).powf(-(n as f64) / 2.0) * module_norm(u, &module)? * module_norm(v, &module)?;
        push_ratio(&mut out, &mut excluded, format!("sample {i}, t = {t}"), *t, lhs, rhs)?;
    }
    Ok(ProbeReport::build("multiplication", out, excluded, 3.0, None))
}

/// `|u|^{p-1} u`.
pub(crate) fn power_nonlinearity(u: &Field, p: u32) -> Field {
    u.map(|v| v * v.norm().powi(p as i32 - 1))
}

/// Ratios `‖|u|^{p-1}u‖_{W^k_{M_t}} / (‖u‖_∞^{p-1} ‖u‖_{W^k_{M_t}})`.
///
/// The constant is claimed independent of `t`, so the group maxima over
/// the sampled times must agree within 50%.
pub fn probe_nonlinear_bound(samples: &[(Field, f64)], p: u32, k: usize) -> Result<ProbeReport> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::InvalidArgument(format!("nonlinear bound needs odd p >= 3, got {p}")));
    }
    let mut out = Vec::with_capacity(samples.len());
    let mut excluded = Vec::new();
    for (i, (u, t)) in samples.iter().enumerate() {
        let module = ModuleId::physical(*t, k)?;
        let lhs = module_norm(&power_nonlinearity(u, p), &module)?;
        let rhs = u.sup_norm().powi(p as i32 - 1) * module_norm(u, &module)?;
        push_ratio(&mut out, &mut excluded, format!("sample {i}, t = {t}"), *t, lhs, rhs)?;
    }
    Ok(ProbeReport::build("nonlinear_bound", out, excluded, 1.5, None))
}
