//! Fixtures shared by the kernel benchmarks.

use scatterlab_core::solver::TimeMesh;
use scatterlab_core::{poisson, Field, Grid, PotentialSpec, ProfileSpec, SolverConfig, Trajectory};

pub fn data() -> ProfileSpec {
    ProfileSpec::gaussian(1.0, 0.8)
}

pub fn potential() -> PotentialSpec {
    PotentialSpec::self_similar(0.5, ProfileSpec::gaussian(1.0, 1.0))
}

pub fn grid(dim: usize, points: usize) -> Grid {
    let half_width = if dim == 1 { 1000.0 } else { 30.0 };
    Grid::new(dim, half_width, points).expect("benchmark grid")
}

/// Free solution at time `t` on `grid`.
pub fn field(grid: &Grid, t: f64) -> Field {
    poisson(&data(), t, grid).expect("resolved data")
}

/// Free trajectory on a log-uniform mesh from 1 to 64.
pub fn trajectory(grid: &Grid, intervals: usize) -> Trajectory {
    let mesh = TimeMesh::log_uniform(1.0, 64.0, intervals, 2.0).expect("mesh");
    let fields = mesh.nodes.iter().map(|&t| field(grid, t)).collect();
    Trajectory::new(mesh, fields).expect("trajectory")
}

pub fn solver(dim: usize) -> SolverConfig {
    SolverConfig { dim, p: if dim == 1 { 5 } else { 3 }, ..SolverConfig::default() }
}
