//! Orchestration of the subcommands and the artifacts they write.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use scatterlab_core::diagnostics::{
    probe_decay, rate_fit, strichartz_accumulate, DecayMode, DecaySource, ProbeReport, RateFit, StrichartzNorm,
    StrichartzReport,
};
use scatterlab_core::potential::log_uniform_times;
use scatterlab_core::{
    admissibility_bound, compute_f_minus, extend_backward, final_state_error, module_norm_breakdown, observables,
    onecusp_norm, AdmissibilityReport, ContractionReport, Error as CoreError, Extension, Field, ModuleId, Observables,
    PotentialSpec, Trajectory,
};
use serde::Serialize;
use serde_json::json;

use crate::artifacts::{num, write_csv, write_json, SERIES_HEADER};
use crate::config::{ExperimentConfig, ValidationError};
use crate::probes::{run_suite, ProbeSuite};

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Validation(ValidationError),
    Divergence { message: String, report: Box<ContractionReport> },
    Other(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Divergence { .. } => 3,
            Failure::Other(_) => 1,
        }
    }

    /// Machine-readable description for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Validation(e) => {
                json!({"status": "invalid", "field": e.field, "reason": e.reason})
            }
            Failure::Divergence { message, report } => {
                json!({"status": "diverged", "reason": message, "contraction": report})
            }
            Failure::Other(e) => json!({"status": "error", "reason": format!("{e:#}")}),
        }
    }
}

impl From<ValidationError> for Failure {
    fn from(e: ValidationError) -> Self {
        Failure::Validation(e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let message = e.to_string();
        match e {
            CoreError::NoContraction { report, .. } => Failure::Divergence { message, report },
            CoreError::InvalidConfig(reason) => Failure::Validation(ValidationError { field: "config".into(), reason }),
            other => Failure::Other(other.into()),
        }
    }
}

pub type Outcome<T> = Result<T, Failure>;

/// Final-state error fit over the configured window.
#[derive(Debug, Clone, Serialize)]
pub struct RateSummary {
    pub error_order: usize,
    pub window: (f64, f64),
    pub fit: Option<RateFit>,
    /// `-γ`: `-1/2` for `n = 1`, `-1` otherwise.
    pub reference: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: Option<String>,
}

pub struct FinalStateRun {
    pub trajectory: Trajectory,
    pub report: ContractionReport,
    /// `(t, error, in window)` for every mesh node.
    pub errors: Vec<(f64, f64, bool)>,
    pub rate: RateSummary,
    pub forward: Vec<Observables>,
    pub seconds: f64,
}

pub fn reference_slope(dim: usize) -> f64 {
    if dim == 1 {
        -0.5
    } else {
        -1.0
    }
}

pub fn virial_reference(cfg: &ExperimentConfig, s: f64) -> f64 {
    cfg.evolve.virial_reference.unwrap_or(s)
}

pub fn final_state(cfg: &ExperimentConfig) -> Outcome<FinalStateRun> {
    let clock = Instant::now();
    let grid = cfg.grid();
    let (trajectory, report) = scatterlab_core::solve_final_state(&cfg.profile, &cfg.potential, &grid, &cfg.solver)?;
    let s = report.s_used;
    let order = cfg.error_order();
    let t_hi = cfg.rates.window_factor * s;
    let mut errors = Vec::with_capacity(trajectory.fields.len());
    for (t, u) in trajectory.samples() {
        let e = final_state_error(u, t, &cfg.profile, order)?;
        errors.push((t, e, t <= t_hi * (1.0 + 1e-12)));
    }
    let window: Vec<(f64, f64)> = errors.iter().filter(|e| e.2).map(|e| (e.0, e.1)).collect();
    let reference = reference_slope(cfg.dimension);
    let tolerance = cfg.rates.tolerance;
    let (fit, note) = match rate_fit(&window) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let passed = fit.is_some_and(|f| (f.slope - reference).abs() <= tolerance);
    let t_ref = virial_reference(cfg, s);
    let forward = trajectory
        .samples()
        .into_iter()
        .map(|(t, u)| observables(u, t, t_ref, &cfg.solver))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FinalStateRun {
        trajectory,
        report,
        errors,
        rate: RateSummary { error_order: order, window: (s, t_hi), fit, reference, tolerance, passed, note },
        forward,
        seconds: clock.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BackwardSummary {
    pub t_end: f64,
    pub steps: usize,
    pub mass_drift: f64,
    pub energy_ratio: f64,
    /// Largest relative energy change within a stretch where `V = 0`.
    pub energy_drift_free_segments: Option<f64>,
    /// Matching times `t_1` used for `f_-`.
    pub f_minus_times: Vec<f64>,
    /// Largest `‖f_-(t_1) - f_-(S)‖ / ‖f_-(S)‖` over the matching times.
    pub f_minus_spread: f64,
    pub f_minus_norm: f64,
    /// `‖f_- - f_+‖ / ‖f_+‖`.
    pub f_minus_vs_f_plus: f64,
    pub seconds: f64,
}

pub struct BackwardRun {
    pub extension: Extension,
    pub f_minus: Field,
    pub summary: BackwardSummary,
}

fn free_segment_drift(ext: &Extension, potential: &PotentialSpec) -> Option<f64> {
    let mut worst: Option<f64> = None;
    let mut base: Option<f64> = None;
    for s in &ext.snapshots {
        if potential.vanishes_at(s.t) {
            let e = s.observables.energy;
            match base {
                None => base = Some(e),
                Some(b) => {
                    let d = if b != 0.0 { ((e - b) / b).abs() } else { e.abs() };
                    worst = Some(worst.map_or(d, |w| w.max(d)));
                }
            }
        } else {
            base = None;
        }
    }
    worst
}

fn rel_diff(a: &Field, b: &Field) -> anyhow::Result<f64> {
    let d = a.sub(b)?.l2_norm();
    let n = b.l2_norm();
    Ok(if n > 0.0 { d / n } else { d })
}

pub fn backward(cfg: &ExperimentConfig, fs: &FinalStateRun) -> Outcome<BackwardRun> {
    let clock = Instant::now();
    let s = fs.report.s_used;
    let t_end = cfg.extend.t_end_factor * s;
    let mut opts = cfg.evolve.clone();
    opts.virial_reference = Some(virial_reference(cfg, s));
    let extension = extend_backward(&fs.trajectory.fields[0], s, t_end, &cfg.potential, &cfg.solver, &opts)?;
    let count = cfg.extend.f_minus_times.max(1);
    let last = extension.snapshots.len() - 1;
    let mut times: Vec<f64> = (0..count).map(|j| extension.snapshots[j * last / count].t).collect();
    times.dedup();
    let f_minus = compute_f_minus(&extension, s, &cfg.potential, &cfg.solver)?;
    let mut spread = 0.0f64;
    for &t1 in &times[1..] {
        let other = compute_f_minus(&extension, t1, &cfg.potential, &cfg.solver)?;
        spread = spread.max(rel_diff(&other, &f_minus)?);
    }
    let f_plus = cfg.profile.sample_lattice(&cfg.grid());
    let summary = BackwardSummary {
        t_end,
        steps: extension.steps,
        mass_drift: extension.mass_drift(),
        energy_ratio: extension.energy_ratio(),
        energy_drift_free_segments: free_segment_drift(&extension, &cfg.potential),
        f_minus_times: times,
        f_minus_spread: spread,
        f_minus_norm: onecusp_norm(&f_minus, cfg.solver.order)?,
        f_minus_vs_f_plus: rel_diff(&f_minus, &f_plus)?,
        seconds: clock.elapsed().as_secs_f64(),
    };
    Ok(BackwardRun { extension, f_minus, summary })
}

/// `(t, field)` pairs over the whole computed time range, ascending.
pub fn all_samples<'a>(fs: &'a FinalStateRun, bw: Option<&'a BackwardRun>) -> Vec<(f64, &'a Field)> {
    let mut out: Vec<(f64, &Field)> = Vec::new();
    if let Some(bw) = bw {
        out.extend(bw.extension.snapshots.iter().skip(1).map(|s| (s.t, &s.field)));
    }
    out.extend(fs.trajectory.samples());
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct StrichartzSummary {
    /// Share of the late forward decade.
    pub forward: StrichartzReport,
    /// Same accumulation with time reversed: share of the early backward decade.
    pub backward: Option<StrichartzReport>,
    pub stabilized: bool,
}

pub fn strichartz(cfg: &ExperimentConfig, fs: &FinalStateRun, bw: Option<&BackwardRun>) -> Outcome<StrichartzSummary> {
    let samples = all_samples(fs, bw);
    let norm = StrichartzNorm::NonlinearControl { p: cfg.solver.p };
    let forward = strichartz_accumulate(&samples, norm, cfg.dimension)?;
    let backward = match bw {
        Some(_) => {
            let mirrored: Vec<(f64, &Field)> = samples.iter().map(|&(t, u)| (-t, u)).collect();
            Some(strichartz_accumulate(&mirrored, norm, cfg.dimension)?)
        }
        None => None,
    };
    let stabilized = forward.stabilized && backward.as_ref().map_or(true, |b| b.stabilized);
    Ok(StrichartzSummary { forward, backward, stabilized })
}

/// Largest Lebesgue exponent the weighted-data decay rate covers.
pub fn solution_decay_exponent(dim: usize) -> f64 {
    match dim {
        1 => f64::INFINITY,
        2 => 8.0,
        _ => 6.0,
    }
}

/// `L^r` decay of the computed solution against the weighted-data rate.
pub fn solution_decay(cfg: &ExperimentConfig, fs: &FinalStateRun) -> Outcome<Option<ProbeReport>> {
    let stride = (fs.trajectory.fields.len() / 12).max(1);
    let samples: Vec<(f64, &Field)> = fs.trajectory.samples().into_iter().step_by(stride).collect();
    if samples.iter().any(|s| s.1.sup_norm() == 0.0) {
        return Ok(None);
    }
    let r = solution_decay_exponent(cfg.dimension);
    Ok(Some(probe_decay(DecaySource::Series(&samples), r, DecayMode::NlsWeighted)?))
}

pub fn validate_potential(cfg: &ExperimentConfig) -> Outcome<AdmissibilityReport> {
    let a = &cfg.admissibility;
    let times = log_uniform_times(a.t_min, a.t_max, a.samples);
    Ok(admissibility_bound(&cfg.potential, cfg.solver.order, &times, &cfg.grid())?)
}

// Artifact writers.

fn series_row(o: &Observables) -> Vec<String> {
    [o.t, o.mass, o.energy, o.virial, o.linf, o.l4, o.module_norm, o.boundary_mass].iter().map(|&x| num(x)).collect()
}

pub fn write_series(dir: &Path, fs: &FinalStateRun, bw: Option<&BackwardRun>) -> anyhow::Result<()> {
    let mut rows: Vec<&Observables> = Vec::new();
    if let Some(bw) = bw {
        rows.extend(bw.extension.snapshots.iter().skip(1).map(|s| &s.observables));
    }
    rows.extend(&fs.forward);
    rows.sort_by(|a, b| a.t.total_cmp(&b.t));
    write_csv(&dir.join("series.csv"), &SERIES_HEADER, rows.into_iter().map(series_row))
}

pub fn write_errors(dir: &Path, fs: &FinalStateRun) -> anyhow::Result<()> {
    let header = ["t", "error", "in_window"];
    let rows = fs.errors.iter().map(|&(t, e, w)| vec![num(t), num(e), (w as u8).to_string()]);
    write_csv(&dir.join("errors.csv"), &header, rows)
}

pub fn write_breakdown(dir: &Path, cfg: &ExperimentConfig, fs: &FinalStateRun) -> anyhow::Result<()> {
    let s = fs.report.s_used;
    let rows = module_norm_breakdown(&fs.trajectory.fields[0], &ModuleId::physical(s, cfg.solver.order)?)?;
    let header = ["t", "monomial", "contribution"];
    write_csv(
        &dir.join("breakdown.csv"),
        &header,
        rows.into_iter().map(|r| vec![num(s), r.monomial, num(r.contribution)]),
    )
}

/// One row per fitted slope.
pub struct FitRow {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub one_sided: bool,
    pub passed: bool,
}

pub fn fit_rows(rate: Option<&RateSummary>, probes: &[&ProbeReport]) -> Vec<FitRow> {
    let mut out = Vec::new();
    if let Some(rate) = rate {
        if let Some(fit) = rate.fit {
            out.push(FitRow {
                name: format!("final_state_error(order={})", rate.error_order),
                slope: fit.slope,
                intercept: fit.intercept,
                residual: fit.residual,
                reference: rate.reference,
                tolerance: rate.tolerance,
                one_sided: false,
                passed: rate.passed,
            });
        }
    }
    for p in probes {
        if let Some(f) = &p.fit {
            out.push(FitRow {
                name: p.probe.clone(),
                slope: f.slope,
                intercept: f.intercept,
                residual: f.residual,
                reference: f.reference,
                tolerance: f.tolerance,
                one_sided: f.one_sided,
                passed: f.passed,
            });
        }
    }
    out
}

pub fn write_fits(dir: &Path, rows: &[FitRow]) -> anyhow::Result<()> {
    let header = ["name", "slope", "intercept", "residual", "reference", "tolerance", "one_sided", "passed"];
    write_csv(
        &dir.join("fits.csv"),
        &header,
        rows.iter().map(|r| {
            vec![
                r.name.clone(),
                num(r.slope),
                num(r.intercept),
                num(r.residual),
                num(r.reference),
                num(r.tolerance),
                r.one_sided.to_string(),
                r.passed.to_string(),
            ]
        }),
    )
}

/// `ξ` coordinates with `f_+` and `f_-` on the frequency lattice.
pub fn write_profiles(dir: &Path, cfg: &ExperimentConfig, bw: &BackwardRun) -> anyhow::Result<()> {
    let n = cfg.dimension;
    let f_plus = cfg.profile.sample_lattice(&cfg.grid());
    let dual = *f_plus.grid();
    let mut header: Vec<String> = (1..=n).map(|j| if n == 1 { "xi".to_string() } else { format!("xi_{j}") }).collect();
    header.extend(["f_plus_re", "f_plus_im", "f_minus_re", "f_minus_im"].map(String::from));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut point = vec![0.0; n];
    let rows = (0..dual.len()).map(|i| {
        dual.point(i, &mut point);
        let mut row: Vec<String> = point.iter().map(|&x| num(x)).collect();
        let (a, b) = (f_plus.samples()[i], bw.f_minus.samples()[i]);
        row.extend([num(a.re), num(a.im), num(b.re), num(b.im)]);
        row
    });
    write_csv(&dir.join("profiles.csv"), &header_refs, rows)
}

/// Everything a run produced, echoed into `manifest.json`.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub versions: serde_json::Value,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub files: Vec<String>,
    pub reports: serde_json::Map<String, serde_json::Value>,
}

pub fn versions() -> serde_json::Value {
    json!({
        "scatterlab": env!("CARGO_PKG_VERSION"),
        "format": 1,
    })
}

pub struct RunArtifacts {
    pub dir: PathBuf,
    pub reports: serde_json::Map<String, serde_json::Value>,
    pub files: Vec<String>,
}

impl RunArtifacts {
    pub fn new(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), reports: serde_json::Map::new(), files: Vec::new() })
    }

    pub fn report<T: Serialize>(&mut self, key: &str, value: &T) -> anyhow::Result<()> {
        self.reports.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn file(&mut self, name: &str) {
        self.files.push(name.to_string());
    }

    pub fn finish(mut self, command: &str, cfg: &ExperimentConfig) -> anyhow::Result<()> {
        self.files.push("manifest.json".into());
        let manifest = Manifest {
            command,
            versions: versions(),
            seed: cfg.seed,
            config: cfg,
            files: self.files,
            reports: self.reports,
        };
        write_json(&self.dir.join("manifest.json"), &manifest)
    }
}

/// Which stages a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stages {
    pub admissibility: bool,
    pub final_state: bool,
    pub backward: bool,
    pub probes: bool,
}

impl Stages {
    pub const ALL: Stages = Stages { admissibility: true, final_state: true, backward: true, probes: true };
}

/// Runs the requested stages and writes their artifacts into `dir`.
pub fn execute(command: &str, cfg: &ExperimentConfig, dir: &Path, stages: Stages) -> Outcome<()> {
    let mut art = RunArtifacts::new(dir)?;
    let clock = Instant::now();
    let mut timings = serde_json::Map::new();
    if stages.admissibility && cfg.admissibility.enabled {
        let t0 = Instant::now();
        let report = validate_potential(cfg)?;
        art.report("admissibility", &report)?;
        timings.insert("admissibility".into(), json!(t0.elapsed().as_secs_f64()));
        if !report.admissible {
            art.finish(command, cfg)?;
            return Err(Failure::Validation(ValidationError {
                field: "potential".into(),
                reason: format!("not admissible: bound grows by {:.3} over the last decade", report.last_decade_growth),
            }));
        }
    }
    let mut fits: Vec<FitRow> = Vec::new();
    let mut decay_reports: Vec<ProbeReport> = Vec::new();
    let mut rate: Option<RateSummary> = None;
    if stages.final_state {
        let fs = match final_state(cfg) {
            Ok(fs) => fs,
            Err(Failure::Divergence { message, report }) => {
                write_json(&dir.join("contraction.json"), &report)?;
                art.file("contraction.json");
                art.report("contraction", &report)?;
                art.finish(command, cfg)?;
                return Err(Failure::Divergence { message, report });
            }
            Err(e) => return Err(e),
        };
        timings.insert("final_state".into(), json!(fs.seconds));
        write_json(&dir.join("contraction.json"), &fs.report)?;
        art.file("contraction.json");
        art.report("contraction", &fs.report)?;
        art.report("rate", &fs.rate)?;
        write_errors(dir, &fs)?;
        art.file("errors.csv");
        write_breakdown(dir, cfg, &fs)?;
        art.file("breakdown.csv");
        let bw = if stages.backward && cfg.extend.enabled { Some(backward(cfg, &fs)?) } else { None };
        if let Some(bw) = &bw {
            timings.insert("backward".into(), json!(bw.summary.seconds));
            art.report("backward", &bw.summary)?;
            write_profiles(dir, cfg, bw)?;
            art.file("profiles.csv");
        }
        write_series(dir, &fs, bw.as_ref())?;
        art.file("series.csv");
        art.report("strichartz", &strichartz(cfg, &fs, bw.as_ref())?)?;
        if let Some(report) = solution_decay(cfg, &fs)? {
            decay_reports.push(report);
        }
        rate = Some(fs.rate);
    }
    if stages.probes && cfg.probes.enabled {
        let t0 = Instant::now();
        let suite: ProbeSuite = run_suite(cfg)?;
        timings.insert("probes".into(), json!(t0.elapsed().as_secs_f64()));
        write_json(&dir.join("probes.json"), &suite)?;
        art.file("probes.json");
        art.report("probes", &suite)?;
        decay_reports.extend(suite.decay.iter().cloned());
    }
    if !decay_reports.is_empty() {
        art.report("decay", &decay_reports)?;
    }
    let decay_refs: Vec<&ProbeReport> = decay_reports.iter().collect();
    fits.extend(fit_rows(rate.as_ref(), &decay_refs));
    if !fits.is_empty() {
        write_fits(dir, &fits)?;
        art.file("fits.csv");
    }
    timings.insert("total".into(), json!(clock.elapsed().as_secs_f64()));
    art.report("timings_seconds", &timings)?;
    art.finish(command, cfg)?;
    Ok(())
}

/// The `run_experiment` entry point: every stage, artifacts in the
/// configured (or overridden) output directory.
pub fn run_experiment(config_path: &Path, out: Option<&Path>) -> Outcome<PathBuf> {
    let cfg = ExperimentConfig::load(config_path)??;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output_dir.clone());
    execute("run", &cfg, &dir, Stages::ALL)?;
    Ok(dir)
}
