use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use scatterlab_bench::{data, field, grid, potential, solver, trajectory};
use scatterlab_core::{module_norm, phi_apply, propagate, strang_step, ModuleId};

fn propagator(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagate");
    for (dim, points) in [(1, 4096), (2, 256)] {
        let u = field(&grid(dim, points), 1.0);
        group.bench_with_input(BenchmarkId::new(format!("n{dim}"), points), &u, |b, u| {
            b.iter(|| propagate(black_box(u), 0.5).unwrap())
        });
    }
    group.finish();
}

fn module_norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("module_norm");
    let u = field(&grid(1, 4096), 4.0);
    for k in [1, 2, 3] {
        let m = ModuleId::physical(4.0, k).unwrap();
        group.bench_with_input(BenchmarkId::new("n1_k", k), &m, |b, m| {
            b.iter(|| module_norm(black_box(&u), m).unwrap())
        });
    }
    let u = field(&grid(2, 256), 4.0);
    let m = ModuleId::physical(4.0, 2).unwrap();
    group.bench_function("n2_k2", |b| b.iter(|| module_norm(black_box(&u), &m).unwrap()));
    group.finish();
}

fn duhamel_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("phi_apply");
    group.sample_size(10);
    let g = grid(1, 4096);
    for intervals in [64, 192] {
        let traj = trajectory(&g, intervals);
        group.bench_with_input(BenchmarkId::new("n1_M", intervals), &traj, |b, traj| {
            b.iter(|| phi_apply(black_box(traj), &data(), &potential(), &solver(1)).unwrap())
        });
    }
    group.finish();
}

fn split_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("strang_step");
    for (dim, points) in [(1, 4096), (2, 256)] {
        let u = field(&grid(dim, points), 1.0);
        let cfg = solver(dim);
        group.bench_with_input(BenchmarkId::new(format!("n{dim}"), points), &u, |b, u| {
            b.iter(|| strang_step(black_box(u), 1.0, -1e-3, &potential(), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(kernels, propagator, module_norms, duhamel_sweep, split_step);
criterion_main!(kernels);
