//! Final-state solver: Picard iteration of
//! `Φ(u)(t) = P_0 f(t) + i ∫_t^∞ e^{-i(t-s)Δ} G(s) ds`, `G = Vu - σ|u|^{p-1}u`,
//! on a log-uniform mesh of `[S, T_max]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{Field, Grid};
use crate::module_norm::{module_norm, ModuleId, MAX_ORDER};
use crate::potential::PotentialSpec;
use crate::profile::{representable_lattice, ProfileSpec};

/// Sign of the nonlinearity: `σ = -1` (defocusing) or `σ = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Defocusing,
    Focusing,
}

impl Sign {
    pub fn sigma(self) -> f64 {
        match self {
            Sign::Defocusing => -1.0,
            Sign::Focusing => 1.0,
        }
    }
}

/// Solver parameters. `T_max = t_max_factor · S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub dim: usize,
    pub p: u32,
    pub sign: Sign,
    /// Switches the `|u|^{p-1}u` term off (linear runs).
    pub nonlinear: bool,
    /// Module order k.
    pub order: usize,
    pub picard_tol: f64,
    pub max_iterations: usize,
    pub s_initial: f64,
    pub s_doubling_cap: f64,
    pub t_max_factor: f64,
    /// Number of mesh intervals M (M + 1 nodes).
    pub mesh_intervals: usize,
    /// Starts the Duhamel sweep from the leading-order asymptotic tail
    /// beyond `T_max` instead of zero.
    pub tail_correction: bool,
    pub contraction_target: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            p: 5,
            sign: Sign::Defocusing,
            nonlinear: true,
            order: 2,
            picard_tol: 1e-9,
            max_iterations: 60,
            s_initial: 1.0,
            s_doubling_cap: 64.0,
            t_max_factor: 64.0,
            mesh_intervals: 192,
            tail_correction: true,
            contraction_target: 0.5,
        }
    }
}

/// Whether `(n, p)` is in the treated range: p odd, and `p >= 5` for n = 1,
/// `p >= 3` for n = 2, `p = 3` for n = 3.
pub fn admissible_np(n: usize, p: u32) -> bool {
    p % 2 == 1
        && match n {
            1 => p >= 5,
            2 => p >= 3,
            3 => p == 3,
            _ => false,
        }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !admissible_np(self.dim, self.p) {
            return Err(Error::InvalidConfig(format!(
                "(n, p) = ({}, {}) is outside the admissible range",
                self.dim, self.p
            )));
        }
        if !(2..=MAX_ORDER).contains(&self.order) {
            return Err(Error::InvalidConfig(format!("order k = {} must be in 2..=4", self.order)));
        }
        if !(self.picard_tol > 0.0 && self.picard_tol.is_finite()) {
            return Err(Error::InvalidConfig("picard_tol must be positive".into()));
        }
        if !(self.s_initial >= 1.0 && self.s_doubling_cap >= self.s_initial) {
            return Err(Error::InvalidConfig("need 1 <= s_initial <= s_doubling_cap".into()));
        }
        if !(self.t_max_factor > 1.0) || self.mesh_intervals < 1 || self.max_iterations < 1 {
            return Err(Error::InvalidConfig(
                "t_max_factor > 1, mesh_intervals >= 1 and max_iterations >= 1 required".into(),
            ));
        }
        if !(self.contraction_target > 0.0 && self.contraction_target < 1.0) {
            return Err(Error::InvalidConfig("contraction_target must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Decay exponent `n(p-1)/2` of the nonlinear integrand.
    pub fn nonlinear_exponent(&self) -> f64 {
        self.dim as f64 * (self.p as f64 - 1.0) / 2.0
    }

    /// `G = Vu - σ|u|^{p-1}u` at one node.
    pub(crate) fn forcing(&self, u: &Field, v: Option<&Field>) -> Field {
        let sigma = self.sign.sigma();
        let half = (self.p as i32 - 1) / 2;
        let samples = u
            .samples()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let mut g = Complex64::new(0.0, 0.0);
                if let Some(v) = v {
                    g += v.samples()[i].re * x;
                }
                if self.nonlinear {
                    g -= sigma * x.norm_sqr().powi(half) * x;
                }
                g
            })
            .collect();
        Field::from_raw(*u.grid(), samples, u.time())
    }
}

/// Quadrature nodes on `[S, T_max]` with trapezoidal weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeMesh {
    pub start: f64,
    pub t_max: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Integrand decay exponent q used for the truncation estimate.
    pub tail_exponent: f64,
    /// `∫_{T_max}^∞ s^{-q} ds = T_max^{1-q}/(q-1)`.
    pub tail_integral: f64,
}

impl TimeMesh {
    /// Log-uniform nodes `S (T/S)^{j/M}`, `j = 0..=M`.
    pub fn log_uniform(start: f64, t_max: f64, intervals: usize, tail_exponent: f64) -> Result<Self> {
        if !(start >= 1.0 && t_max > start && t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("mesh needs 1 <= S < T_max, got [{start}, {t_max}]")));
        }
        if intervals == 0 {
            return Err(Error::InvalidArgument("mesh needs at least one interval".into()));
        }
        let ratio = (t_max / start).ln();
        let mut nodes: Vec<f64> =
            (0..=intervals).map(|j| start * (ratio * j as f64 / intervals as f64).exp()).collect();
        nodes[0] = start;
        nodes[intervals] = t_max;
        Self::from_nodes(nodes, tail_exponent)
    }

    pub fn from_nodes(nodes: Vec<f64>, tail_exponent: f64) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("mesh nodes must be strictly increasing".into()));
        }
        let m = nodes.len() - 1;
        let weights = (0..=m)
            .map(|j| {
                let left = if j > 0 { nodes[j] - nodes[j - 1] } else { 0.0 };
                let right = if j < m { nodes[j + 1] - nodes[j] } else { 0.0 };
                0.5 * (left + right)
            })
            .collect();
        let t_max = nodes[m];
        let tail_integral =
            if tail_exponent > 1.0 { t_max.powf(1.0 - tail_exponent) / (tail_exponent - 1.0) } else { f64::INFINITY };
        Ok(Self { start: nodes[0], t_max, nodes, weights, tail_exponent, tail_integral })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Fields at every mesh node.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mesh: TimeMesh,
    pub fields: Vec<Field>,
    pub iteration: usize,
    pub residual: Option<f64>,
}

impl Trajectory {
    pub fn new(mesh: TimeMesh, fields: Vec<Field>) -> Result<Self> {
        if fields.len() != mesh.len() {
            return Err(Error::InvalidArgument("one field per mesh node required".into()));
        }
        if fields.windows(2).any(|w| w[0].grid() != w[1].grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { mesh, fields, iteration: 0, residual: None })
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    /// `(t, u(t))` pairs.
    pub fn samples(&self) -> Vec<(f64, &Field)> {
        self.mesh.nodes.iter().copied().zip(self.fields.iter()).collect()
    }

    /// Field at the node closest to `t`.
    pub fn nearest(&self, t: f64) -> (f64, &Field) {
        let j = self
            .mesh
            .nodes
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
            .map(|(j, _)| j)
            .unwrap_or(0);
        (self.mesh.nodes[j], &self.fields[j])
    }
}

/// Leading-order value of `∫_edge^{±∞} e^{isΔ} G(s) ds` in DFT coefficients,
/// from the profile `h = F[e^{i·edge·Δ} u(edge)]` of the boundary field.
///
/// Uses `u(s) ≈ P_0 h(s)` beyond the edge, so that `e^{isΔ}G(s)` becomes the
/// multiplier `V(s, 2sξ) h(ξ) - σ (4π|s|)^{-n(p-1)/2} |h|^{p-1} h`. Returns
/// `None` when the potential has no usable asymptotics.
pub(crate) fn asymptotic_tail(
    boundary: &Field,
    edge: f64,
    potential: &PotentialSpec,
    cfg: &SolverConfig,
) -> Result<Option<Vec<Complex64>>> {
    let grid = *boundary.grid();
    let weight = match potential.tail_weight(edge, &grid)? {
        Some(w) => w,
        None => return Ok(None),
    };
    let xi2 = grid.frequency_squared();
    let mut w = boundary.samples().to_vec();
    fft::forward(&grid, &mut w);
    let q = cfg.nonlinear_exponent();
    let nonlinear_coeff = if cfg.nonlinear {
        if q <= 1.0 {
            return Ok(None);
        }
        (4.0 * PI).powf(-q) * edge.abs().powf(1.0 - q) / (q - 1.0)
    } else {
        0.0
    };
    let sigma = cfg.sign.sigma();
    let half = (cfg.p as i32 - 1) / 2;
    let volume = grid.cell_volume();
    let tail = w
        .iter()
        .enumerate()
        .map(|(k, &wk)| {
            let wk = wk * Complex64::from_polar(1.0, edge * xi2[k]);
            let a = weight.samples()[fft::dual_index(&grid, k)].re;
            // |h|^{p-1} with h = c_k w_k and |c_k| = h^n.
            let h2 = (volume * wk.norm()).powi(2);
            a * wk - sigma * nonlinear_coeff * h2.powi(half) * wk
        })
        .collect();
    Ok(Some(tail))
}

/// Precomputed pieces of `Φ` for one mesh.
pub struct PhiContext<'a> {
    grid: Grid,
    cfg: &'a SolverConfig,
    potential: &'a PotentialSpec,
    mesh: TimeMesh,
    xi2: Vec<f64>,
    /// DFT coefficients of `F^{-1} f`.
    f_dft: Vec<Complex64>,
    potentials: Vec<Option<Field>>,
}

impl<'a> PhiContext<'a> {
    pub fn new(
        f: &ProfileSpec,
        potential: &'a PotentialSpec,
        grid: &Grid,
        mesh: &TimeMesh,
        cfg: &'a SolverConfig,
    ) -> Result<Self> {
        potential.validate(grid.dim())?;
        let lattice = representable_lattice(f, grid)?;
        let f_dft = (0..grid.len())
            .map(|k| lattice.samples()[fft::dual_index(grid, k)] / fft::lattice_factor(grid, k))
            .collect();
        let potentials = mesh
            .nodes
            .iter()
            .map(|&t| if potential.vanishes_at(t) { Ok(None) } else { potential.eval(t, grid).map(Some) })
            .collect::<Result<_>>()?;
        Ok(Self { grid: *grid, cfg, potential, mesh: mesh.clone(), xi2: grid.frequency_squared(), f_dft, potentials })
    }

    pub fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    /// `IDFT[e^{-itΔ}(f_dft + i·acc)]`.
    fn synthesize(&self, t: f64, acc: &[Complex64]) -> Field {
        let i = Complex64::new(0.0, 1.0);
        let mut data: Vec<Complex64> = self
            .f_dft
            .iter()
            .zip(acc)
            .zip(&self.xi2)
            .map(|((f, a), &k2)| (f + i * a) * Complex64::from_polar(1.0, -t * k2))
            .collect();
        fft::inverse(&self.grid, &mut data);
        Field::from_raw(self.grid, data, t)
    }

    /// `P_0 f` at every node.
    pub fn free_solution(&self) -> Vec<Field> {
        let zero = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        self.mesh.nodes.iter().map(|&t| self.synthesize(t, &zero)).collect()
    }

    /// Interaction-picture integrand `e^{isΔ} G(s)` in DFT coefficients.
    fn integrand(&self, j: usize, u: &Field) -> Vec<Complex64> {
        let t = self.mesh.nodes[j];
        let g = self.cfg.forcing(u, self.potentials[j].as_ref());
        let mut data = g.into_samples();
        fft::forward(&self.grid, &mut data);
        for (v, &k2) in data.iter_mut().zip(&self.xi2) {
            *v *= Complex64::from_polar(1.0, t * k2);
        }
        data
    }

    /// `Φ(u)` at every node by a downward trapezoidal sweep.
    pub fn apply(&self, fields: &[Field]) -> Result<Vec<Field>> {
        let m = self.mesh.len() - 1;
        if fields.len() != m + 1 {
            return Err(Error::InvalidArgument("one field per mesh node required".into()));
        }
        let mut acc = if self.cfg.tail_correction {
            asymptotic_tail(&fields[m], self.mesh.t_max, self.potential, self.cfg)?
                .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); self.grid.len()])
        } else {
            vec![Complex64::new(0.0, 0.0); self.grid.len()]
        };
        let mut out = vec![Field::zeros(self.grid, 0.0); m + 1];
        let mut upper = self.integrand(m, &fields[m]);
        out[m] = self.synthesize(self.mesh.t_max, &acc);
        for j in (0..m).rev() {
            let lower = self.integrand(j, &fields[j]);
            let half = 0.5 * (self.mesh.nodes[j + 1] - self.mesh.nodes[j]);
            for ((a, lo), hi) in acc.iter_mut().zip(&lower).zip(&upper) {
                *a += (lo + hi) * half;
            }
            out[j] = self.synthesize(self.mesh.nodes[j], &acc);
            upper = lower;
        }
        if out.iter().any(|u| !u.is_finite()) {
            return Err(Error::NonFinite("Picard iterate".into()));
        }
        Ok(out)
    }

    /// `sup_j ‖G(t_j)‖_{W^k_{M_{t_j}}}` at the last node times `T/(q-1)`.
    fn tail_estimate(&self, fields: &[Field], exponent: f64) -> Result<f64> {
        let m = self.mesh.len() - 1;
        let g = self.cfg.forcing(&fields[m], self.potentials[m].as_ref());
        let norm = module_norm(&g, &ModuleId::physical(self.mesh.t_max, self.cfg.order)?)?;
        if norm == 0.0 {
            return Ok(0.0);
        }
        if exponent <= 1.0 {
            return Ok(f64::INFINITY);
        }
        Ok(norm * self.mesh.t_max / (exponent - 1.0))
    }
}

/// Applies `Φ` once to a trajectory.
pub fn phi_apply(
    traj: &Trajectory,
    f: &ProfileSpec,
    potential: &PotentialSpec,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let ctx = PhiContext::new(f, potential, traj.grid(), &traj.mesh, cfg)?;
    let fields = ctx.apply(&traj.fields)?;
    Ok(Trajectory { mesh: traj.mesh.clone(), fields, iteration: traj.iteration + 1, residual: None })
}

/// One adaptive-S attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub s: f64,
    pub t_max: f64,
    pub iterations: usize,
    pub max_ratio: f64,
    pub outcome: String,
}

/// Diagnostics of the accepted (or last) Picard solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    /// `K = sup_t ‖P_0 f(t)‖_{W^k_{M_t}}` over the mesh.
    #[serde(rename = "K")]
    pub k_radius: f64,
    #[serde(rename = "S_used")]
    pub s_used: f64,
    pub t_max: f64,
    pub mesh_intervals: usize,
    pub order: usize,
    /// `d_m = sup_t ‖u_{m+1} - u_m‖_{W^k_{M_t}}`.
    pub distances: Vec<f64>,
    /// `d_{m+1}/d_m`.
    pub ratios: Vec<f64>,
    /// `sup_t ‖u_m‖_{W^k_{M_t}}` for every iterate, `u_0` included.
    pub iterate_norms: Vec<f64>,
    pub ball_confined: bool,
    /// `sup_t ‖Φ(u) - u‖_{W^k_{M_t}}` for the returned trajectory.
    pub residual: f64,
    pub tail_exponent: f64,
    pub tail_estimate: f64,
    pub tail_corrected: bool,
    /// `S^{1-n(p-1)/2} + S^{-n/2}`.
    pub smallness: f64,
    /// Largest ratio divided by the smallness quantity.
    pub effective_constant: f64,
    pub converged: bool,
    pub attempts: Vec<Attempt>,
}

fn smallness(cfg: &SolverConfig, s: f64) -> f64 {
    s.powf(1.0 - cfg.nonlinear_exponent()) + s.powf(-(cfg.dim as f64) / 2.0)
}

fn sup_module_norm(fields: &[Field], nodes: &[f64], order: usize) -> Result<f64> {
    let mut sup = 0.0f64;
    for (u, &t) in fields.iter().zip(nodes) {
        sup = sup.max(module_norm(u, &ModuleId::physical(t, order)?)?);
    }
    Ok(sup)
}

fn sup_distance(a: &[Field], b: &[Field], nodes: &[f64], order: usize) -> Result<f64> {
    let mut sup = 0.0f64;
    for ((x, y), &t) in a.iter().zip(b).zip(nodes) {
        sup = sup.max(module_norm(&x.sub(y)?, &ModuleId::physical(t, order)?)?);
    }
    Ok(sup)
}

enum AttemptOutcome {
    Converged,
    Failed(&'static str),
}

/// Solves the final-state problem with adaptive `S`.
pub fn solve_final_state(
    f: &ProfileSpec,
    potential: &PotentialSpec,
    grid: &Grid,
    cfg: &SolverConfig,
) -> Result<(Trajectory, ContractionReport)> {
    cfg.validate()?;
    if grid.dim() != cfg.dim {
        return Err(Error::InvalidConfig(format!(
            "grid dimension {} differs from solver dimension {}",
            grid.dim(),
            cfg.dim
        )));
    }
    let q_nl = cfg.nonlinear_exponent();
    let q_v = 1.0 + cfg.dim as f64 / 2.0;
    let tail_exponent = match (cfg.nonlinear, potential.is_zero()) {
        (true, true) => q_nl,
        (true, false) => q_nl.min(q_v),
        (false, false) => q_v,
        (false, true) => f64::INFINITY,
    };
    let mut attempts = Vec::new();
    let mut s = cfg.s_initial;
    loop {
        let t_max = cfg.t_max_factor * s;
        let mesh = TimeMesh::log_uniform(s, t_max, cfg.mesh_intervals, tail_exponent.min(1e6))?;
        let ctx = PhiContext::new(f, potential, grid, &mesh, cfg)?;
        let mut current = ctx.free_solution();
        let k_radius = sup_module_norm(&current, &mesh.nodes, cfg.order)?;
        let mut iterate_norms = vec![k_radius];
        let mut distances = Vec::new();
        let mut ratios: Vec<f64> = Vec::new();
        let mut above = 0usize;
        let outcome = loop {
            let next = match ctx.apply(&current) {
                Ok(next) => next,
                Err(Error::NonFinite(_)) => break AttemptOutcome::Failed("non-finite iterate"),
                Err(e) => return Err(e),
            };
            let d = sup_distance(&next, &current, &mesh.nodes, cfg.order)?;
            let norm = sup_module_norm(&next, &mesh.nodes, cfg.order)?;
            if let Some(&prev) = distances.last() {
                let ratio = if prev > 0.0 { d / prev } else { 0.0 };
                ratios.push(ratio);
                above = if ratio > cfg.contraction_target { above + 1 } else { 0 };
            }
            distances.push(d);
            iterate_norms.push(norm);
            current = next;
            if !(norm <= 2.0 * k_radius) && k_radius > 0.0 {
                break AttemptOutcome::Failed("iterate left the 2K ball");
            }
            if ratios.last().is_some_and(|&r| r > cfg.contraction_target + 0.05) || above >= 2 {
                break AttemptOutcome::Failed("contraction ratio above target");
            }
            if d < cfg.picard_tol {
                break AttemptOutcome::Converged;
            }
            if distances.len() >= cfg.max_iterations {
                break AttemptOutcome::Failed("iteration limit reached");
            }
        };
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let iterations = distances.len();
        let small = smallness(cfg, s);
        let build_report =
            |residual: f64, converged: bool, tail_estimate: f64, attempts: Vec<Attempt>| ContractionReport {
                k_radius,
                s_used: s,
                t_max,
                mesh_intervals: cfg.mesh_intervals,
                order: cfg.order,
                distances: distances.clone(),
                ratios: ratios.clone(),
                iterate_norms: iterate_norms.clone(),
                ball_confined: iterate_norms.iter().all(|&n| n <= 2.0 * k_radius),
                residual,
                tail_exponent,
                tail_estimate,
                tail_corrected: cfg.tail_correction,
                smallness: small,
                effective_constant: max_ratio / small,
                converged,
                attempts,
            };
        match outcome {
            AttemptOutcome::Converged => {
                let check = ctx.apply(&current)?;
                let residual = sup_distance(&check, &current, &mesh.nodes, cfg.order)?;
                let tail_estimate = ctx.tail_estimate(&current, tail_exponent)?;
                attempts.push(Attempt { s, t_max, iterations, max_ratio, outcome: "converged".into() });
                let report = build_report(residual, true, tail_estimate, attempts);
                let traj = Trajectory { mesh, fields: current, iteration: iterations, residual: Some(residual) };
                return Ok((traj, report));
            }
            AttemptOutcome::Failed(reason) => {
                attempts.push(Attempt { s, t_max, iterations, max_ratio, outcome: reason.into() });
                if 2.0 * s > cfg.s_doubling_cap {
                    let report = build_report(f64::NAN, false, f64::NAN, attempts);
                    return Err(Error::NoContraction {
                        s_cap: cfg.s_doubling_cap,
                        smallness: small,
                        report: Box::new(report),
                    });
                }
                s *= 2.0;
            }
        }
    }
}
