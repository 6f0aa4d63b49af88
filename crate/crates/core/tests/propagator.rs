mod oracle;

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use scatterlab_core::{poisson, propagate, Field, Grid, ProfileSpec};

fn gaussian(grid: Grid) -> Field {
    Field::from_fn(grid, 0.0, |z| C::new((-z[0] * z[0]).exp(), 0.0))
}

/// Whole-line solution for `e^{-z²}` in closed form.
fn closed_form(z: f64, tau: f64) -> C {
    let s = C::new(0.5, 2.0 * tau);
    (C::new(0.5, 0.0) / s).sqrt() * (-(z * z) / (2.0 * s)).exp()
}

#[test]
fn zero_time_is_the_identity() {
    let grid = Grid::new(1, 20.0, 128).unwrap();
    let u = gaussian(grid);
    let v = propagate(&u, 0.0).unwrap();
    for (a, b) in u.samples().iter().zip(v.samples()) {
        assert!((a - b).norm() < 1e-15);
    }
    assert!(propagate(&u, f64::NAN).is_err());
}

#[test]
fn fourier_integral_oracle_agrees_with_closed_form() {
    let u_hat = |xi: f64| C::new(PI.sqrt() * (-xi * xi / 4.0).exp(), 0.0);
    for &(z, tau) in &[(0.0, 0.5), (1.3, 0.5), (-4.0, 2.0), (7.5, 2.0)] {
        let q = oracle::fourier_evolution(u_hat, z, tau, 14.0, 400);
        assert!((q - closed_form(z, tau)).norm() < 1e-13);
    }
}

#[test]
fn gaussian_evolution_matches_oscillatory_quadrature() {
    let grid = Grid::new(1, 20.0, 1024).unwrap();
    let u0 = gaussian(grid);
    let u_hat = |xi: f64| C::new(PI.sqrt() * (-xi * xi / 4.0).exp(), 0.0);
    for tau in [0.5, 2.0] {
        let u = propagate(&u0, tau).unwrap();
        let reference: Vec<C> = (0..grid.points())
            .map(|i| {
                oracle::periodize(
                    |z| oracle::fourier_evolution(u_hat, z, tau, 14.0, 1200),
                    grid.coordinate(i),
                    grid.half_width(),
                    2,
                )
            })
            .collect();
        let err = oracle::rel_l2(u.samples(), &reference);
        assert!(err < 1e-8, "tau = {tau}: relative error {err:e}");
    }
}

#[test]
fn poisson_of_zero_is_zero() {
    let grid = Grid::new(1, 10.0, 64).unwrap();
    assert_eq!(poisson(&ProfileSpec::Zero, 3.0, &grid).unwrap().sup_norm(), 0.0);
}

#[test]
fn poisson_is_consistent_with_propagation() {
    let grid = Grid::new(1, 40.0, 512).unwrap();
    let f = ProfileSpec::gaussian(1.0, 1.0);
    let at_zero = poisson(&f, 0.0, &grid).unwrap();
    for t in [0.5, 2.0, 5.0] {
        let direct = poisson(&f, t, &grid).unwrap();
        let stepped = propagate(&at_zero, t).unwrap();
        assert!(direct.sub(&stepped).unwrap().l2_norm() < 1e-12 * direct.l2_norm());
    }
}

#[test]
fn unresolved_profile_is_rejected() {
    // Nyquist π/h ≈ 12.6 against a width-10 profile: the lattice tail is O(1).
    let grid = Grid::new(1, 1.0, 8).unwrap();
    assert!(poisson(&ProfileSpec::gaussian(1.0, 10.0), 1.0, &grid).is_err());
}

#[test]
fn poisson_solves_the_free_equation() {
    let grid = Grid::new(1, 40.0, 512).unwrap();
    let f = ProfileSpec::gaussian(1.0, 1.0);
    let t = 1.5;
    let residual = |dt: f64| {
        let up = poisson(&f, t + dt, &grid).unwrap();
        let down = poisson(&f, t - dt, &grid).unwrap();
        let mid = poisson(&f, t, &grid).unwrap();
        // Δ = -∂²: spectrally |ξ|², i.e. D applied twice.
        let lap = mid.spectral_derivative(0).unwrap().spectral_derivative(0).unwrap();
        let dtu = up.sub(&down).unwrap().scale(C::new(0.0, -1.0 / (2.0 * dt)));
        dtu.add(&lap).unwrap().l2_norm() / mid.l2_norm()
    };
    let coarse = residual(1e-2);
    let fine = residual(1e-3);
    let ratio = coarse / fine;
    assert!((80.0..120.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn wrong_sign_fails_the_residual() {
    // The opposite group e^{+itΔ} leaves an O(1) residual.
    let grid = Grid::new(1, 40.0, 512).unwrap();
    let f = ProfileSpec::gaussian(1.0, 1.0);
    let dt = 1e-3;
    let up = poisson(&f, -(1.5 + dt), &grid).unwrap();
    let down = poisson(&f, -(1.5 - dt), &grid).unwrap();
    let mid = poisson(&f, -1.5, &grid).unwrap();
    let lap = mid.spectral_derivative(0).unwrap().spectral_derivative(0).unwrap();
    let dtu = up.sub(&down).unwrap().scale(C::new(0.0, -1.0 / (2.0 * dt)));
    assert!(dtu.add(&lap).unwrap().l2_norm() / mid.l2_norm() > 0.1);
}

fn random_field(grid: Grid, values: &[f64]) -> Field {
    let m = values.len();
    let samples = (0..grid.len()).map(|i| C::new(values[i % m], values[(5 * i + 1) % m])).collect();
    Field::new(grid, samples, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn propagation_is_unitary(values in prop::collection::vec(-1.0f64..1.0, 64), tau in -50.0f64..50.0) {
        let u = random_field(Grid::new(1, 7.0, 128).unwrap(), &values);
        let v = propagate(&u, tau).unwrap();
        prop_assert!((v.l2_norm() - u.l2_norm()).abs() <= 1e-12 * u.l2_norm());
    }

    // White-noise data fills every mode; the rounding of the phase τ|ξ|²
    // alone is about 1e-16 τ ξ_max², so τ ξ_max² stays below ~2e3 here.
    #[test]
    fn group_law(values in prop::collection::vec(-1.0f64..1.0, 64), a in -5.0f64..5.0, b in -5.0f64..5.0, dim in 1usize..=2) {
        let grid = Grid::new(dim, 5.0, if dim == 1 { 64 } else { 16 }).unwrap();
        let u = random_field(grid, &values);
        let two = propagate(&propagate(&u, a).unwrap(), b).unwrap();
        let one = propagate(&u, a + b).unwrap();
        prop_assert!(two.sub(&one).unwrap().l2_norm() <= 1e-12 * u.l2_norm());
    }
}
