mod oracle;

use num_complex::Complex64 as C;
use oracle::Expr;
use scatterlab_core::diagnostics::phase_removed_field;
use scatterlab_core::lens::{add_phase, remove_phase, LensFrame};
use scatterlab_core::module_norm::{effective_time, MAX_ORDER};
use scatterlab_core::{
    apply_generator, module_norm, module_norm_breakdown, onecusp_norm, poisson, propagate, Field, Generator, Grid,
    ModuleFamily, ModuleId, ProfileSpec,
};

fn gauss(grid: Grid, a: f64) -> Field {
    Field::from_fn(grid, 0.0, |z| C::new((-a * z.iter().map(|x| x * x).sum::<f64>()).exp(), 0.0))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn identity_and_invalid_pairings() {
    let grid = Grid::new(1, 10.0, 128).unwrap();
    let u = gauss(grid, 1.0);
    let m = ModuleId::physical(2.0, 1).unwrap();
    assert_eq!(apply_generator(&u, Generator::Identity, &m).unwrap(), u);
    assert!(apply_generator(&u, Generator::ZetaCoord(0), &m).is_err());
    assert!(apply_generator(&u, Generator::Galilean(1), &m).is_err());
    assert!(apply_generator(&u, Generator::Rotation(0, 1), &m).is_err());
    assert!(ModuleId::physical(2.0, MAX_ORDER + 1).is_err());
}

#[test]
fn rotation_kills_radial_fields() {
    let grid = Grid::new(2, 10.0, 128).unwrap();
    let u = gauss(grid, 0.7);
    for family in [ModuleFamily::Mt, ModuleFamily::Mt0, ModuleFamily::Nzeta] {
        let m = ModuleId::new(family, 2.0, 1).unwrap();
        let r = apply_generator(&u, Generator::Rotation(0, 1), &m).unwrap();
        assert!(r.sup_norm() < 1e-10, "{family}: {}", r.sup_norm());
    }
}

#[test]
fn galilean_generator_intertwines_with_the_phase() {
    let t = 2.0;
    let grid = Grid::new(1, 20.0, 512).unwrap();
    let g = Field::from_fn(grid, t, |z| C::from_polar((-z[0] * z[0] / 2.0).exp(), 0.3 * z[0]));
    let u = add_phase(&g, t).unwrap();
    let lhs = apply_generator(&u, Generator::Galilean(0), &ModuleId::physical(t, 1).unwrap()).unwrap();
    let inner = apply_generator(&g, Generator::ScaledDerivative(0), &ModuleId::phase_removed(t, 1).unwrap()).unwrap();
    let rhs = add_phase(&inner, t).unwrap();
    assert!(lhs.sub(&rhs).unwrap().sup_norm() < 1e-9);
}

#[test]
fn order_zero_is_the_l2_norm() {
    let grid = Grid::new(2, 8.0, 64).unwrap();
    let u = gauss(grid, 0.5);
    for family in [ModuleFamily::Mt, ModuleFamily::Mt0, ModuleFamily::Mt0Hat, ModuleFamily::Nzeta] {
        let m = ModuleId::new(family, 3.0, 0).unwrap();
        assert!(rel(module_norm(&u, &m).unwrap(), u.l2_norm()) < 1e-14);
    }
}

#[test]
fn phase_removal_preserves_the_norm() {
    let t = 3.0;
    let grid = Grid::new(1, 30.0, 1024).unwrap();
    let u = Field::from_fn(grid, t, |z| C::from_polar((-(z[0] - 1.0).powi(2) / 8.0).exp(), 0.5 * z[0]));
    let phys = module_norm(&u, &ModuleId::physical(t, 2).unwrap()).unwrap();
    let removed = module_norm(&remove_phase(&u, t).unwrap(), &ModuleId::phase_removed(t, 2).unwrap()).unwrap();
    assert!(rel(phys, removed) < 1e-8, "{phys} vs {removed}");
}

#[test]
fn gaussian_mt_norm_matches_oracle() {
    let grid = Grid::new(1, 20.0, 512).unwrap();
    let value = module_norm(&gauss(grid, 1.0), &ModuleId::physical(2.0, 1).unwrap()).unwrap();
    let e = Expr::gaussian(C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0));
    let reference = oracle::norm_mt(&e, 2.0, 1, 12.0);
    assert!(rel(value, reference) < 1e-7, "{value} vs {reference}");
}

#[test]
fn gaussian_onecusp_norm_matches_oracle() {
    let grid = Grid::new(1, 16.0, 512).unwrap();
    let f = ProfileSpec::GaussianPlanePhase { amplitude: 1.2, width: 0.9, center: vec![0.4], phase: vec![0.8] };
    let value = onecusp_norm(&f.sample(&grid, 0.0), 2).unwrap();
    let reference = oracle::norm_n(&Expr::shifted(1.2, 0.9, 0.4, 0.8), 2, 14.0);
    assert!(rel(value, reference) < 1e-7, "{value} vs {reference}");
    assert_eq!(onecusp_norm(&Field::zeros(grid, 0.0), 2).unwrap(), 0.0);
}

#[test]
fn hat_module_scales_to_the_zeta_norm() {
    for dim in [1, 2] {
        for t in [2.0, 8.0] {
            let points = if dim == 1 { 1024 } else { 256 };
            let grid = Grid::new(dim, 12.0 * 2.0 * t, points).unwrap();
            let g = ProfileSpec::GaussianPlanePhase {
                amplitude: 1.0,
                width: 1.0,
                center: vec![0.3; dim],
                phase: vec![0.5; dim],
            };
            let tilde = phase_removed_field(&g, t, &grid);
            let hat = module_norm(&tilde, &ModuleId::new(ModuleFamily::Mt0Hat, t, 2).unwrap()).unwrap();
            let frame = LensFrame::new(&grid, t).unwrap();
            let profile = frame.relabel_to_zeta(&tilde).unwrap();
            let zeta = onecusp_norm(&profile, 2).unwrap();
            let scale = (2.0 * t).powf(dim as f64 / 2.0);
            assert!(rel(hat, scale * zeta) < 1e-7, "n = {dim}, t = {t}");
        }
    }
}

#[test]
fn free_flow_is_an_isometry_of_the_module_norm() {
    let f = ProfileSpec::GaussianPlanePhase { amplitude: 1.0, width: 0.5, center: Vec::new(), phase: Vec::new() };
    for dim in [1, 2] {
        let points = if dim == 1 { 1024 } else { 512 };
        let grid = Grid::new(dim, 200.0, points).unwrap();
        let start = poisson(&f, 1.0, &grid).unwrap();
        let base = module_norm(&start, &ModuleId::physical(1.0, 2).unwrap()).unwrap();
        for t in [2.0, 8.0, 32.0] {
            let u = propagate(&start, t - 1.0).unwrap();
            let value = module_norm(&u, &ModuleId::physical(t, 2).unwrap()).unwrap();
            assert!(rel(value, base) < 1e-6, "n = {dim}, t = {t}: {value} vs {base}");
        }
    }
}

#[test]
fn norms_are_monotone_in_the_order() {
    let grid = Grid::new(1, 20.0, 256).unwrap();
    let u = Field::from_fn(grid, 0.0, |z| C::from_polar((-z[0] * z[0] / 3.0).exp(), z[0]));
    for family in [ModuleFamily::Mt, ModuleFamily::Mt0, ModuleFamily::Nzeta] {
        let mut prev = 0.0;
        for k in 0..=MAX_ORDER {
            let v = module_norm(&u, &ModuleId::new(family, 1.5, k).unwrap()).unwrap();
            assert!(v >= prev, "{family} k = {k}");
            prev = v;
        }
    }
}

#[test]
fn breakdown_sums_to_the_square() {
    let grid = Grid::new(2, 8.0, 64).unwrap();
    let u = Field::from_fn(grid, 0.0, |z| C::from_polar((-(z[0] * z[0] + 2.0 * z[1] * z[1])).exp(), z[1]));
    let m = ModuleId::new(ModuleFamily::Mt0, 2.0, 2).unwrap();
    let rows = module_norm_breakdown(&u, &m).unwrap();
    // Id, Rot01, TD0, TD1, ConjD0, ConjD1: 6² ordered pairs.
    assert_eq!(rows.len(), 36);
    assert_eq!(rows[0].monomial, "Id*Id");
    let total: f64 = rows.iter().map(|r| r.contribution).sum();
    assert!(rel(total.sqrt(), module_norm(&u, &m).unwrap()) < 1e-13);
}

#[test]
fn small_time_rule() {
    let m = ModuleId::physical(0.2, 1).unwrap();
    assert!(m.small_time_rule());
    assert_eq!(m.effective_time(), 1.2);
    assert!(ModuleId::physical(-0.5, 1).unwrap().small_time_rule());
    assert!(!ModuleId::physical(0.5, 1).unwrap().small_time_rule());
    assert!(!ModuleId::zeta(1).unwrap().small_time_rule());
    assert!(effective_time(0.0, false).is_err());
    assert_eq!(effective_time(0.0, true).unwrap(), 1.0);
}

#[test]
fn dilated_gaussian_matches_oracle() {
    let grid = Grid::new(1, 40.0, 2048).unwrap();
    for lambda in [0.5, 2.0] {
        let value = module_norm(&gauss(grid, lambda * lambda), &ModuleId::physical(2.0, 1).unwrap()).unwrap();
        let e = Expr::gaussian(C::new(1.0, 0.0), C::new(lambda * lambda, 0.0), C::new(0.0, 0.0));
        let reference = oracle::norm_mt(&e, 2.0, 1, 30.0);
        assert!(rel(value, reference) < 1e-7, "lambda = {lambda}");
    }
}

#[test]
fn conjugate_and_hat_modules_are_equivalent() {
    let g = ProfileSpec::gaussian(1.0, 1.0);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for t in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
        let grid = Grid::new(1, 24.0 * t, 1024).unwrap();
        let tilde = phase_removed_field(&g, t, &grid);
        let a = module_norm(&tilde, &ModuleId::new(ModuleFamily::Mt0, t, 2).unwrap()).unwrap();
        let b = module_norm(&tilde, &ModuleId::new(ModuleFamily::Mt0Hat, t, 2).unwrap()).unwrap();
        lo = lo.min(a / b);
        hi = hi.max(a / b);
    }
    let c = hi.max(1.0 / lo);
    println!("measured equivalence constant C = {c:.4} (ratios in [{lo:.4}, {hi:.4}])");
    assert!(c.is_finite() && c < 3.0);
}
