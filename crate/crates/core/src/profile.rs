//! Closed-form final-state profiles `f(ζ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// One monomial `c · Π (ζ_j - c_j)^{p_j}` of a polynomial factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coefficient: f64,
    pub powers: Vec<u32>,
}

/// Analytic profile `f(ζ) = a · exp(-|ζ-c|²/(2w²)) · P(ζ-c) · exp(i k·ζ)`.
///
/// An empty `center` or `phase` means the zero vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProfileSpec {
    Zero,
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    GaussianPolynomial {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
        terms: Vec<PolyTerm>,
        #[serde(default)]
        phase: Vec<f64>,
    },
    GaussianPlanePhase {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
        phase: Vec<f64>,
    },
}

/// Fraction of lattice mass allowed in the outer 10% frequency shell.
pub const LATTICE_TAIL_TOLERANCE: f64 = 1e-10;

impl ProfileSpec {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        ProfileSpec::Gaussian { amplitude, width, center: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ProfileSpec::Zero => true,
            ProfileSpec::Gaussian { amplitude, .. }
            | ProfileSpec::GaussianPolynomial { amplitude, .. }
            | ProfileSpec::GaussianPlanePhase { amplitude, .. } => *amplitude == 0.0,
        }
    }

    /// True when the profile takes real values everywhere.
    pub fn is_real(&self) -> bool {
        match self {
            ProfileSpec::GaussianPolynomial { phase, .. } | ProfileSpec::GaussianPlanePhase { phase, .. } => {
                phase.iter().all(|k| *k == 0.0)
            }
            _ => true,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let check_vec = |name: &str, v: &[f64]| -> Result<()> {
            if !(v.is_empty() || v.len() == dim) {
                return Err(Error::InvalidConfig(format!(
                    "profile {name} has length {} but the dimension is {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidConfig(format!("profile {name} is not finite")));
            }
            Ok(())
        };
        let check_base = |amplitude: f64, width: f64, center: &[f64]| -> Result<()> {
            if !amplitude.is_finite() {
                return Err(Error::InvalidConfig("profile amplitude is not finite".into()));
            }
            if !(width.is_finite() && width > 0.0) {
                return Err(Error::InvalidConfig(format!("profile width {width} must be positive")));
            }
            check_vec("center", center)
        };
        match self {
            ProfileSpec::Zero => Ok(()),
            ProfileSpec::Gaussian { amplitude, width, center } => check_base(*amplitude, *width, center),
            ProfileSpec::GaussianPolynomial { amplitude, width, center, terms, phase } => {
                check_base(*amplitude, *width, center)?;
                check_vec("phase", phase)?;
                for term in terms {
                    if term.powers.len() != dim || !term.coefficient.is_finite() {
                        return Err(Error::InvalidConfig(format!("polynomial term needs {dim} finite powers")));
                    }
                }
                Ok(())
            }
            ProfileSpec::GaussianPlanePhase { amplitude, width, center, phase } => {
                check_base(*amplitude, *width, center)?;
                check_vec("phase", phase)
            }
        }
    }

    /// Value of the profile at `zeta`.
    pub fn evaluate(&self, zeta: &[f64]) -> Complex64 {
        let envelope = |amplitude: f64, width: f64, center: &[f64]| -> f64 {
            let r2: f64 =
                zeta.iter().enumerate().map(|(j, x)| (x - center.get(j).copied().unwrap_or(0.0)).powi(2)).sum();
            amplitude * (-r2 / (2.0 * width * width)).exp()
        };
        match self {
            ProfileSpec::Zero => Complex64::new(0.0, 0.0),
            ProfileSpec::Gaussian { amplitude, width, center } => {
                Complex64::new(envelope(*amplitude, *width, center), 0.0)
            }
            ProfileSpec::GaussianPolynomial { amplitude, width, center, terms, phase } => {
                let poly: f64 = terms
                    .iter()
                    .map(|term| {
                        term.powers.iter().enumerate().fold(term.coefficient, |acc, (j, &p)| {
                            let x = zeta[j] - center.get(j).copied().unwrap_or(0.0);
                            acc * x.powi(p as i32)
                        })
                    })
                    .sum();
                let arg: f64 = phase.iter().zip(zeta).map(|(k, x)| k * x).sum();
                Complex64::from_polar(envelope(*amplitude, *width, center) * poly, arg)
            }
            ProfileSpec::GaussianPlanePhase { amplitude, width, center, phase } => {
                let arg: f64 = phase.iter().zip(zeta).map(|(k, x)| k * x).sum();
                Complex64::from_polar(envelope(*amplitude, *width, center), arg)
            }
        }
    }

    /// Samples the profile at the points of `grid`.
    pub fn sample(&self, grid: &Grid, time: f64) -> Field {
        Field::from_fn(*grid, time, |z| self.evaluate(z))
    }

    /// Samples the profile on the frequency lattice of `grid`, returned as a
    /// field on [`Grid::dual`].
    pub fn sample_lattice(&self, grid: &Grid) -> Field {
        self.sample(&grid.dual(), 0.0)
    }
}

/// Fraction of the discrete L² mass of `profile` (on any grid) sitting in
/// the outer 10% shell of that grid.
pub fn shell_fraction(profile: &Field) -> f64 {
    profile.boundary_mass_fraction()
}

/// Samples `f` on the frequency lattice of `grid`, refusing profiles whose
/// lattice tail exceeds [`LATTICE_TAIL_TOLERANCE`].
pub fn representable_lattice(f: &ProfileSpec, grid: &Grid) -> Result<Field> {
    f.validate(grid.dim())?;
    let lattice = f.sample_lattice(grid);
    let tail = shell_fraction(&lattice);
    if tail > LATTICE_TAIL_TOLERANCE {
        return Err(Error::NotRepresentable(tail));
    }
    Ok(lattice)
}
