//! Pseudo-spectral laboratory for the final-state problem of the defocusing
//! nonlinear Schrödinger equation with a time-dependent potential,
//!
//! `(D_t + Δ + V)u = σ|u|^{p-1}u`, `D_t = -i∂_t`, `Δ = -Σ∂_j²`.
//!
//! Fields live on periodic boxes `[-L, L)^n`. The crate covers the free
//! propagator, module regularity norms, the lens transform, the Picard
//! solver for `u ~ P_0 f` as `t → ∞`, a split-step evolver for backward
//! extension, and probes for the inequalities the analysis relies on.

pub mod diagnostics;
pub mod error;
pub mod evolver;
pub mod fft;
pub mod grid;
pub mod lens;
pub mod module_norm;
pub mod potential;
pub mod profile;
pub mod propagator;
pub mod quadrature;
pub mod solver;

pub use error::{Error, Result};
pub use evolver::{
    compute_f_minus, evolve, extend_backward, observables, strang_step, EvolveOptions, Extension, Observables, Snapshot,
};
pub use grid::{coordinate_multiply, norm, spectral_derivative, Field, Grid, NormKind};
pub use lens::{add_phase, final_state_error, lens_inverse, lens_profile, remove_phase, LensFrame};
pub use module_norm::{
    apply_generator, module_norm, module_norm_breakdown, onecusp_norm, Generator, ModuleFamily, ModuleId,
    MonomialContribution,
};
pub use potential::{admissibility_bound, AdmissibilityReport, PotentialFamily, PotentialSpec};
pub use profile::{PolyTerm, ProfileSpec};
pub use propagator::{poisson, propagate};
pub use solver::{
    admissible_np, phi_apply, solve_final_state, ContractionReport, Sign, SolverConfig, TimeMesh, Trajectory,
};
