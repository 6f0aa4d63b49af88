use std::sync::OnceLock;

use num_complex::Complex64 as C;
use scatterlab_core::diagnostics::least_squares_loglog;
use scatterlab_core::evolver::COVERAGE_FRACTION;
use scatterlab_core::{
    compute_f_minus, evolve, extend_backward, observables, onecusp_norm, poisson, propagate, solve_final_state,
    strang_step, EvolveOptions, Field, Grid, PotentialSpec, ProfileSpec, Sign, SolverConfig, Trajectory,
};

fn data() -> ProfileSpec {
    ProfileSpec::gaussian(1.0, 0.8)
}

fn potential(a: f64) -> PotentialSpec {
    PotentialSpec::self_similar(a, ProfileSpec::gaussian(1.0, 1.0))
}

fn grid() -> Grid {
    Grid::new(1, 250.0, 1024).unwrap()
}

fn cfg() -> SolverConfig {
    SolverConfig { t_max_factor: 16.0, mesh_intervals: 128, ..SolverConfig::default() }
}

fn adaptive() -> EvolveOptions {
    EvolveOptions { dt: 1e-3, dt_relative: 1e-3, dt_max: 0.02, ..EvolveOptions::default() }
}

/// Picard solution with `V = self_similar(0.5)`, shared by several tests.
fn picard() -> &'static Trajectory {
    static CELL: OnceLock<Trajectory> = OnceLock::new();
    CELL.get_or_init(|| solve_final_state(&data(), &potential(0.5), &grid(), &cfg()).unwrap().0)
}

#[test]
fn linear_free_step_is_the_propagator() {
    let u = poisson(&data(), 1.0, &grid()).unwrap();
    let cfg = SolverConfig { nonlinear: false, ..cfg() };
    let v = strang_step(&u, 1.0, 0.01, &PotentialSpec::zero(), &cfg).unwrap();
    let w = propagate(&u, 0.01).unwrap();
    assert!(v.sub(&w).unwrap().l2_norm() < 1e-12 * w.l2_norm());
    assert_eq!(v.time(), 1.01);
}

#[test]
fn single_step_preserves_mass() {
    let u = poisson(&data(), 0.3, &grid()).unwrap().scale(C::new(3.0, 0.0));
    let m0 = u.l2_norm_sqr();
    for dt in [1e-2, -1e-2] {
        let v = strang_step(&u, 0.3, dt, &potential(1.0), &cfg()).unwrap();
        assert!((v.l2_norm_sqr() - m0).abs() <= 1e-13 * m0);
    }
}

#[test]
fn step_size_violations_are_reported() {
    let u = poisson(&data(), 0.3, &grid()).unwrap();
    assert!(strang_step(&u, 0.3, 5.0, &PotentialSpec::zero(), &cfg()).is_err());
}

#[test]
fn strang_splitting_is_second_order() {
    let u0 = poisson(&data(), 0.5, &grid()).unwrap().scale(C::new(2.5, 0.0));
    let run = |dt: f64| {
        let ext = evolve(&u0, 0.5, 0.7, &potential(1.0), &cfg(), &EvolveOptions::constant(dt)).unwrap();
        ext.last().field.clone()
    };
    let reference = run(2.5e-3 / 16.0);
    let errors: Vec<f64> = [1e-2, 5e-3, 2.5e-3].iter().map(|&dt| run(dt).sub(&reference).unwrap().l2_norm()).collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.5..4.5).contains(&ratio), "{errors:?}");
    }
}

#[test]
fn forward_evolution_reproduces_the_picard_solution() {
    let traj = picard();
    let s = traj.mesh.start;
    let (t2, target) = traj.nearest(2.0 * s);
    assert!((t2 - 2.0 * s).abs() < 1e-12);
    let ext = evolve(&traj.fields[0], s, t2, &potential(0.5), &cfg(), &EvolveOptions::constant(1e-3)).unwrap();
    let err = ext.last().field.sub(target).unwrap().l2_norm();
    assert!(err < 1e-5, "{err:e}");
}

#[test]
fn virial_at_the_reference_time_is_the_weighted_mass() {
    let u = poisson(&data(), 2.0, &grid()).unwrap();
    let obs = observables(&u, 2.0, 2.0, &cfg()).unwrap();
    let zu = u.coordinate_multiply(0).unwrap();
    assert!((obs.virial - zu.l2_norm_sqr()).abs() <= 1e-13 * obs.virial);
    assert!(obs.mass > 0.0 && obs.energy > 0.0 && obs.virial > 0.0);
}

#[test]
fn energy_is_conserved_without_potential() {
    let u0 = poisson(&data(), 1.0, &grid()).unwrap().scale(C::new(2.0, 0.0));
    let ext = evolve(&u0, 1.0, -1.0, &PotentialSpec::zero(), &cfg(), &EvolveOptions::constant(1e-3)).unwrap();
    let e0 = ext.snapshots[0].observables.energy;
    for s in &ext.snapshots {
        assert!((s.observables.energy - e0).abs() <= 1e-7 * e0, "t = {}", s.t);
    }
    assert!(ext.mass_drift() < 1e-12);
}

#[test]
fn energy_is_constant_after_the_cutoff_and_varies_less_for_weak_potentials() {
    let u0 = poisson(&data(), 1.0, &grid()).unwrap().scale(C::new(2.0, 0.0));
    let spec = potential(1.0).with_cutoff(0.5);
    let ext = evolve(&u0, 1.0, -1.0, &spec, &cfg(), &EvolveOptions::constant(1e-3)).unwrap();
    let outside: Vec<f64> = ext.snapshots.iter().filter(|s| s.t < -0.5).map(|s| s.observables.energy).collect();
    assert!(outside.len() > 2);
    for e in &outside {
        assert!((e - outside[0]).abs() <= 1e-8 * outside[0]);
    }
    let variation = |a: f64| {
        evolve(&u0, 1.0, -1.0, &potential(a), &cfg(), &EvolveOptions::constant(1e-3)).unwrap().energy_ratio() - 1.0
    };
    let strong = variation(1.0);
    let weak = variation(0.1);
    assert!(strong.is_finite() && weak < strong, "{weak} vs {strong}");
}

fn virial_slope(v: &PotentialSpec) -> f64 {
    let traj = picard();
    let s = traj.mesh.start;
    let ext =
        evolve(&traj.fields[0], s, 16.0 * s, v, &cfg(), &EvolveOptions { output_every: 50, ..adaptive() }).unwrap();
    let late: Vec<(f64, f64)> =
        ext.snapshots.iter().filter(|x| x.t >= 4.0 * s).map(|x| (x.t - s, x.observables.virial)).collect();
    least_squares_loglog(&late).unwrap().slope
}

#[test]
fn virial_growth() {
    let with_v = virial_slope(&potential(0.5));
    let without = virial_slope(&PotentialSpec::zero());
    assert!(with_v <= 1.1, "{with_v}");
    assert!(without <= 0.1, "{without}");
}

#[test]
fn backward_extension_requires_defocusing() {
    let u = poisson(&data(), 1.0, &grid()).unwrap();
    let focusing = SolverConfig { sign: Sign::Focusing, ..cfg() };
    assert!(extend_backward(&u, 1.0, -1.0, &PotentialSpec::zero(), &focusing, &adaptive()).is_err());
    assert!(extend_backward(&u, 1.0, 2.0, &PotentialSpec::zero(), &cfg(), &adaptive()).is_err());
}

#[test]
fn free_backward_state_equals_the_forward_one() {
    let g = grid();
    let u = poisson(&data(), 1.0, &g).unwrap();
    let cfg = SolverConfig { nonlinear: false, ..cfg() };
    let opts = EvolveOptions { output_every: 1000, ..adaptive() };
    let ext = extend_backward(&u, 1.0, -4.0, &PotentialSpec::zero(), &cfg, &opts).unwrap();
    let f_minus = compute_f_minus(&ext, 1.0, &PotentialSpec::zero(), &cfg).unwrap();
    let f_plus = data().sample_lattice(&g);
    assert!(f_minus.sub(&f_plus).unwrap().sup_norm() < 1e-10);
}

#[test]
fn nonlinear_backward_state_is_consistent() {
    let g = grid();
    let cfg = cfg();
    let traj = picard();
    let s = traj.mesh.start;
    let v = PotentialSpec::zero();
    let (sol, _) = solve_final_state(&data(), &v, &g, &cfg).unwrap();
    let ext = extend_backward(&sol.fields[0], s, -16.0, &v, &cfg, &adaptive()).unwrap();
    let peak = ext.snapshots.iter().map(|x| x.integrand_norm).fold(0.0, f64::max);
    assert!(ext.last().integrand_norm <= COVERAGE_FRACTION * peak);
    assert!(ext.mass_drift() < 1e-9);
    let a = compute_f_minus(&ext, s, &v, &cfg).unwrap();
    let t1 = ext.snapshots[ext.snapshots.len() / 3].t;
    let b = compute_f_minus(&ext, t1, &v, &cfg).unwrap();
    let diff = a.sub(&b).unwrap().l2_norm();
    assert!(diff < 1e-6, "t1 = {t1}: {diff:e}");
    assert!(onecusp_norm(&a, cfg.order).unwrap().is_finite());
    // Too short a run leaves the integrand far from negligible.
    let short = extend_backward(&sol.fields[0], s, -0.5, &v, &cfg, &adaptive()).unwrap();
    assert!(compute_f_minus(&short, s, &v, &cfg).is_err());
}

#[test]
fn blow_up_ceiling_is_enforced() {
    let grid = Grid::new(1, 20.0, 512).unwrap();
    let u0 = Field::from_fn(grid, 0.0, |z| C::new(4.0 * (-z[0] * z[0]).exp(), 0.0));
    let focusing = SolverConfig { sign: Sign::Focusing, ..cfg() };
    let opts = EvolveOptions { blowup_factor: 1.05, ..EvolveOptions::constant(1e-4) };
    let err = evolve(&u0, 0.0, 0.2, &PotentialSpec::zero(), &focusing, &opts);
    assert!(matches!(err, Err(scatterlab_core::Error::BlowUp { .. })), "{:?}", err.map(|e| e.steps));
}
