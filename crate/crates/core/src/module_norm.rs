//! Symmetry-module generators and the module regularity norms
//! `W^k_{M_t}`, `W^k_{M_{t,0}}`, `W^k_{\hat M_{t,0}}` and `W^k_N`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{apply_derivative_multiplier, Field};

/// Highest supported module order.
pub const MAX_ORDER: usize = 4;

/// Generator families.
///
/// * `Mt`: `Id`, rotations, `2tD_j - z_j`, `D_j`.
/// * `Mt0`: `Id`, rotations, `2tD_j`, `D_j + z_j/2t` (phase-removed frame).
/// * `Mt0Hat`: `Id`, rotations, `2tD_j`, `z_j/2t`.
/// * `Nzeta`: `Id`, rotations, `D_{ζ_j}`, `ζ_j` (profile frame; time ignored).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleFamily {
    Mt,
    Mt0,
    Mt0Hat,
    Nzeta,
}

impl fmt::Display for ModuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ModuleFamily::Mt => "Mt",
            ModuleFamily::Mt0 => "Mt0",
            ModuleFamily::Mt0Hat => "Mt0Hat",
            ModuleFamily::Nzeta => "Nzeta",
        };
        f.write_str(name)
    }
}

/// Whether the small-time rule (replace `t` by `t + 1`) applies at `t`.
///
/// The window is `-1/2 <= t < 1/2`.
pub fn in_small_time_window(t: f64) -> bool {
    (-0.5..0.5).contains(&t)
}

/// Time actually used by the generators, after the small-time rule.
pub fn effective_time(t: f64, small_time_rule: bool) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    if small_time_rule && in_small_time_window(t) {
        return Ok(t + 1.0);
    }
    if t == 0.0 {
        return Err(Error::TimeTooSmall(t));
    }
    Ok(t)
}

/// A module: family, time and order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModuleId {
    family: ModuleFamily,
    time: f64,
    order: usize,
    small_time_rule: bool,
}

impl ModuleId {
    /// The small-time rule is switched on automatically for time-dependent
    /// families inside the window.
    pub fn new(family: ModuleFamily, time: f64, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooLarge(order));
        }
        if !time.is_finite() {
            return Err(Error::InvalidArgument(format!("module time {time} is not finite")));
        }
        let small_time_rule = family != ModuleFamily::Nzeta && in_small_time_window(time);
        Ok(Self { family, time, order, small_time_rule })
    }

    pub fn physical(time: f64, order: usize) -> Result<Self> {
        Self::new(ModuleFamily::Mt, time, order)
    }

    pub fn phase_removed(time: f64, order: usize) -> Result<Self> {
        Self::new(ModuleFamily::Mt0, time, order)
    }

    pub fn zeta(order: usize) -> Result<Self> {
        Self::new(ModuleFamily::Nzeta, 1.0, order)
    }

    pub fn family(&self) -> ModuleFamily {
        self.family
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn small_time_rule(&self) -> bool {
        self.small_time_rule
    }

    pub fn effective_time(&self) -> f64 {
        if self.small_time_rule {
            self.time + 1.0
        } else {
            self.time
        }
    }

    /// Generators of the family in canonical order: identity, rotations
    /// `(i, j)` lexicographically, then the per-axis generators.
    pub fn generators(&self, dim: usize) -> Vec<Generator> {
        let mut gens = vec![Generator::Identity];
        for i in 0..dim {
            for j in i + 1..dim {
                gens.push(Generator::Rotation(i, j));
            }
        }
        let (first, second): (fn(usize) -> Generator, fn(usize) -> Generator) = match self.family {
            ModuleFamily::Mt => (Generator::Galilean, Generator::Derivative),
            ModuleFamily::Mt0 => (Generator::ScaledDerivative, Generator::ConjDerivative),
            ModuleFamily::Mt0Hat => (Generator::ScaledDerivative, Generator::ScaledCoordinate),
            ModuleFamily::Nzeta => (Generator::ZetaDerivative, Generator::ZetaCoord),
        };
        gens.extend((0..dim).map(first));
        gens.extend((0..dim).map(second));
        gens
    }
}

/// A single generator. Axis arguments are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    Identity,
    /// `z_j D_i - z_i D_j` for `i < j`.
    Rotation(usize, usize),
    /// `2tD_j - z_j`.
    Galilean(usize),
    /// `D_j`.
    Derivative(usize),
    /// `D_j + z_j/2t`.
    ConjDerivative(usize),
    /// `2tD_j`.
    ScaledDerivative(usize),
    /// `z_j/2t`.
    ScaledCoordinate(usize),
    /// `ζ_j`.
    ZetaCoord(usize),
    /// `D_{ζ_j}`.
    ZetaDerivative(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Identity => write!(f, "Id"),
            Generator::Rotation(i, j) => write!(f, "Rot{i}{j}"),
            Generator::Galilean(j) => write!(f, "Gal{j}"),
            Generator::Derivative(j) => write!(f, "D{j}"),
            Generator::ConjDerivative(j) => write!(f, "ConjD{j}"),
            Generator::ScaledDerivative(j) => write!(f, "TD{j}"),
            Generator::ScaledCoordinate(j) => write!(f, "Zt{j}"),
            Generator::ZetaCoord(j) => write!(f, "Zeta{j}"),
            Generator::ZetaDerivative(j) => write!(f, "DZeta{j}"),
        }
    }
}

/// `D_j w` for every axis, sharing one forward transform.
pub(crate) fn derivatives(w: &Field) -> Vec<Field> {
    let grid = *w.grid();
    let mut spectrum = w.samples().to_vec();
    fft::forward(&grid, &mut spectrum);
    (0..grid.dim())
        .map(|axis| {
            let mut data = spectrum.clone();
            apply_derivative_multiplier(&grid, &mut data, axis);
            fft::inverse(&grid, &mut data);
            Field::from_raw(grid, data, w.time())
        })
        .collect()
}

/// Applies `gen` given the field and its precomputed derivatives.
pub(crate) fn image(gen: Generator, w: &Field, d: &[Field], tau: f64) -> Field {
    let grid = *w.grid();
    let coords = grid.axis_coordinates();
    let z = |flat: usize, axis: usize| coords[grid.axis_index(flat, axis)];
    let build = |f: &dyn Fn(usize, Complex64) -> Complex64| -> Field {
        let samples = w.samples().iter().enumerate().map(|(flat, &v)| f(flat, v)).collect();
        Field::from_raw(grid, samples, w.time())
    };
    match gen {
        Generator::Identity => w.clone(),
        Generator::Rotation(i, j) => {
            build(&|flat, _| d[i].samples()[flat] * z(flat, j) - d[j].samples()[flat] * z(flat, i))
        }
        Generator::Galilean(j) => build(&|flat, v| d[j].samples()[flat] * (2.0 * tau) - v * z(flat, j)),
        Generator::Derivative(j) | Generator::ZetaDerivative(j) => d[j].clone(),
        Generator::ConjDerivative(j) => build(&|flat, v| d[j].samples()[flat] + v * (z(flat, j) / (2.0 * tau))),
        Generator::ScaledDerivative(j) => d[j].scale(Complex64::new(2.0 * tau, 0.0)),
        Generator::ScaledCoordinate(j) => build(&|flat, v| v * (z(flat, j) / (2.0 * tau))),
        Generator::ZetaCoord(j) => build(&|flat, v| v * z(flat, j)),
    }
}

fn check_generator(gen: Generator, module: &ModuleId, dim: usize) -> Result<()> {
    if module.generators(dim).contains(&gen) {
        Ok(())
    } else {
        Err(Error::InvalidGenerator { generator: gen.to_string(), family: module.family().to_string(), dim })
    }
}

/// Applies one generator of `module` to `field`.
pub fn apply_generator(field: &Field, gen: Generator, module: &ModuleId) -> Result<Field> {
    let dim = field.grid().dim();
    check_generator(gen, module, dim)?;
    let d = match gen {
        Generator::Identity | Generator::ScaledCoordinate(_) | Generator::ZetaCoord(_) => Vec::new(),
        _ => derivatives(field),
    };
    Ok(image(gen, field, &d, module.effective_time()))
}

/// Squared L² norm of one ordered monomial `A_1 ⋯ A_k u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialContribution {
    /// `A_1*A_2*…*A_k`, with `A_k` applied first.
    pub monomial: String,
    pub contribution: f64,
}

struct Walk {
    tau: f64,
    total: f64,
    record: Option<Vec<(Vec<usize>, f64)>>,
}

impl Walk {
    /// Depth-first walk over generator chains. `path` lists generator
    /// indices in application order.
    fn visit(&mut self, gens: &[Generator], w: &Field, known: Option<&[Field]>, depth: usize, path: &mut Vec<usize>) {
        if depth == 0 {
            let c = w.l2_norm_sqr();
            self.total += c;
            if let Some(rec) = self.record.as_mut() {
                rec.push((path.iter().rev().copied().collect(), c));
            }
            return;
        }
        let owned;
        let d = match known {
            Some(d) => d,
            None => {
                owned = derivatives(w);
                &owned[..]
            }
        };
        for (gi, &gen) in gens.iter().enumerate() {
            path.push(gi);
            if gen == Generator::Identity {
                self.visit(gens, w, Some(d), depth - 1, path);
            } else {
                let next = image(gen, w, d, self.tau);
                self.visit(gens, &next, None, depth - 1, path);
            }
            path.pop();
        }
    }
}

fn walk(field: &Field, module: &ModuleId, record: bool) -> Result<(Walk, Vec<Generator>)> {
    if module.order() > MAX_ORDER {
        return Err(Error::OrderTooLarge(module.order()));
    }
    if !field.is_finite() {
        return Err(Error::NonFinite("module norm input".into()));
    }
    let gens = module.generators(field.grid().dim());
    let mut state = Walk { tau: module.effective_time(), total: 0.0, record: record.then(Vec::new) };
    state.visit(&gens, field, None, module.order(), &mut Vec::new());
    Ok((state, gens))
}

/// `sqrt(Σ_{A_1..A_k} ‖A_1 ⋯ A_k u‖²)` over ordered k-tuples of generators,
/// identity included.
pub fn module_norm(field: &Field, module: &ModuleId) -> Result<f64> {
    Ok(walk(field, module, false)?.0.total.sqrt())
}

/// Per-monomial squared norms, sorted lexicographically by generator index.
pub fn module_norm_breakdown(field: &Field, module: &ModuleId) -> Result<Vec<MonomialContribution>> {
    let (state, gens) = walk(field, module, true)?;
    let mut rows = state.record.unwrap_or_default();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(rows
        .into_iter()
        .map(|(idx, c)| MonomialContribution {
            monomial: if idx.is_empty() {
                "Id".into()
            } else {
                idx.iter().map(|&i| gens[i].to_string()).collect::<Vec<_>>().join("*")
            },
            contribution: c,
        })
        .collect())
}

/// `W^k_N` norm of a profile sampled on a ζ-grid.
pub fn onecusp_norm(profile: &Field, k: usize) -> Result<f64> {
    module_norm(profile, &ModuleId::zeta(k)?)
}
