use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{Field, Grid};
use crate::profile::{PolyTerm, ProfileSpec};

pub const DEFAULT_SAMPLE_COUNT: usize = 32;

/// Ranges of the random probe family
/// `exp(-|ζ-c|²/(2w²)) · P(ζ-c) · e^{ik·ζ}` with `deg P <= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleFamily {
    pub width_min: f64,
    pub width_max: f64,
    /// Each center component is drawn from `[-center, center]`.
    pub center: f64,
    /// Each phase component is drawn from `[-phase, phase]`.
    pub phase: f64,
    /// Non-constant polynomial coefficients are drawn from `[-c, c]`.
    pub poly_coefficient: f64,
}

impl Default for SampleFamily {
    fn default() -> Self {
        Self { width_min: 0.8, width_max: 1.2, center: 0.5, phase: 1.0, poly_coefficient: 0.5 }
    }
}

/// Exponent vectors of all monomials of degree 1 and 2 in `dim` variables.
fn monomials(dim: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for i in 0..dim {
        let mut p = vec![0; dim];
        p[i] = 1;
        out.push(p);
    }
    for i in 0..dim {
        for j in i..dim {
            let mut p = vec![0; dim];
            p[i] += 1;
            p[j] += 1;
            out.push(p);
        }
    }
    out
}

impl SampleFamily {
    /// `count` profiles drawn deterministically from `seed`.
    pub fn draw(&self, dim: usize, count: usize, seed: u64) -> Vec<ProfileSpec> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sym = |rng: &mut ChaCha8Rng, a: f64| if a > 0.0 { rng.gen_range(-a..=a) } else { 0.0 };
        (0..count)
            .map(|_| {
                let width = rng.gen_range(self.width_min..=self.width_max);
                let center = (0..dim).map(|_| sym(&mut rng, self.center)).collect();
                let phase = (0..dim).map(|_| sym(&mut rng, self.phase)).collect();
                let mut terms = vec![PolyTerm { coefficient: 1.0, powers: vec![0; dim] }];
                for powers in monomials(dim) {
                    terms.push(PolyTerm { coefficient: sym(&mut rng, self.poly_coefficient), powers });
                }
                ProfileSpec::GaussianPolynomial { amplitude: 1.0, width, center, terms, phase }
            })
            .collect()
    }
}

/// Default family, `count` samples from `seed`.
pub fn sample_profiles(dim: usize, count: usize, seed: u64) -> Vec<ProfileSpec> {
    SampleFamily::default().draw(dim, count, seed)
}

/// `ũ(z) = (2t)^{-n/2} g(z/2t)` on the z-grid, tagged with time `t`.
pub fn phase_removed_field(g: &ProfileSpec, t: f64, grid: &Grid) -> Field {
    let n = grid.dim();
    let scale = 1.0 / (2.0 * t);
    let amp = scale.abs().powf(n as f64 / 2.0);
    let mut zeta = [0.0; 3];
    Field::from_fn(*grid, t, |z| {
        for (dst, &x) in zeta.iter_mut().zip(z) {
            *dst = x * scale;
        }
        g.evaluate(&zeta[..n]) * amp
    })
}

/// `u(z) = e^{i|z|²/4t} (2t)^{-n/2} g(z/2t)`, the physical-frame field whose
/// phase-removed form is [`phase_removed_field`].
pub fn physical_field(g: &ProfileSpec, t: f64, grid: &Grid) -> Field {
    phase_removed_field(g, t, grid).map_with_point(|z, v| {
        let r2: f64 = z.iter().map(|x| x * x).sum();
        v * Complex64::from_polar(1.0, r2 / (4.0 * t))
    })
}

/// `g(λζ)` sampled on `grid`.
pub fn dilated_field(g: &ProfileSpec, lambda: f64, grid: &Grid) -> Field {
    let n = grid.dim();
    let mut zeta = [0.0; 3];
    Field::from_fn(*grid, 0.0, |z| {
        for (dst, &x) in zeta.iter_mut().zip(z) {
            *dst = x * lambda;
        }
        g.evaluate(&zeta[..n])
    })
}
