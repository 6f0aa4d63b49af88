use serde::{Deserialize, Serialize};

use super::{lebesgue, push_ratio, ProbeReport};
use crate::error::{Error, Result};
use crate::grid::{Field, NormKind};
use crate::module_norm::{derivatives, image, Generator, MAX_ORDER};

/// The three statements of the Gagliardo-Nirenberg chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "statement", rename_all = "snake_case")]
pub enum GnStatement {
    /// `‖V¹u‖²_{L^{2k/p}} <= C ‖u‖_{L^{2k/(p-1)}} ‖V²u‖_{L^{2k/(p+1)}}`, `1 <= p <= k`.
    BaseCase { k: usize, p: usize },
    /// `‖V^l u‖_{L^{2k/l}} <= C ‖u‖_∞^{1-l/k} ‖V^k u‖_{L²}^{l/k}`, `1 <= l <= k`.
    Corollary { k: usize, l: usize },
    /// `‖V^k(u₁u₂)‖_{L²} <= C (‖u₁‖_∞ ‖V^k u₂‖_{L²} + ‖V^k u₁‖_{L²} ‖u₂‖_∞)`.
    ProductBound { k: usize },
}

impl GnStatement {
    fn validate(self) -> Result<()> {
        let ok = match self {
            GnStatement::BaseCase { k, p } => 1 <= p && p <= k,
            GnStatement::Corollary { k, l } => 1 <= l && l <= k && k <= MAX_ORDER,
            GnStatement::ProductBound { k } => 1 <= k && k <= MAX_ORDER,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("exponents out of range for {self:?}")))
        }
    }

    fn name(self) -> String {
        match self {
            GnStatement::BaseCase { k, p } => format!("gn_base_case(k={k},p={p})"),
            GnStatement::Corollary { k, l } => format!("gn_corollary(k={k},l={l})"),
            GnStatement::ProductBound { k } => format!("gn_product(k={k})"),
        }
    }
}

/// A profile on a ζ-grid; `partner` is required by the product bound.
/// Samples are grouped by `parameter` (typically a dilation scale).
#[derive(Debug, Clone)]
pub struct GnSample {
    pub u: Field,
    pub partner: Option<Field>,
    pub parameter: f64,
}

/// `2k/m` as a Lebesgue exponent, `m = 0` meaning `∞`.
fn exponent(k: usize, m: usize) -> f64 {
    if m == 0 {
        f64::INFINITY
    } else {
        2.0 * k as f64 / m as f64
    }
}

/// Vector fields `D_{ζ_j}`, rotations, and multiplication by `⟨ζ⟩`.
#[derive(Clone, Copy)]
enum VField {
    Module(Generator),
    Bracket,
}

fn vfields(dim: usize) -> Vec<VField> {
    let mut out: Vec<VField> = (0..dim).map(|j| VField::Module(Generator::ZetaDerivative(j))).collect();
    for i in 0..dim {
        for j in i + 1..dim {
            out.push(VField::Module(Generator::Rotation(i, j)));
        }
    }
    out.push(VField::Bracket);
    out
}

fn apply_vfield(v: VField, w: &Field, d: &[Field]) -> Field {
    match v {
        VField::Module(gen) => image(gen, w, d, 1.0),
        VField::Bracket => w.map_with_point(|z, x| {
            let r2: f64 = z.iter().map(|c| c * c).sum();
            x * (1.0 + r2).sqrt()
        }),
    }
}

struct Accumulator<'a> {
    kinds: &'a [NormKind],
    by_length: Vec<Vec<f64>>,
}

impl Accumulator<'_> {
    fn visit(&mut self, fields: &[VField], w: &Field, depth: usize, max_len: usize) -> Result<()> {
        for (m, &kind) in self.kinds.iter().enumerate() {
            self.by_length[depth][m] += w.norm(kind)?;
        }
        if depth == max_len {
            return Ok(());
        }
        let d = derivatives(w);
        for &v in fields {
            let next = apply_vfield(v, w, &d);
            self.visit(fields, &next, depth + 1, max_len)?;
        }
        Ok(())
    }
}

/// `out[j][m] = Σ_{|w| <= j} ‖w u‖_{kinds[m]}` over ordered words `w` in the
/// vector fields `D_{ζ_j}`, `ζ_i D_{ζ_j} - ζ_j D_{ζ_i}` and `⟨ζ⟩`.
pub fn v_norms(u: &Field, max_len: usize, kinds: &[NormKind]) -> Result<Vec<Vec<f64>>> {
    if max_len > MAX_ORDER + 1 {
        return Err(Error::OrderTooLarge(max_len));
    }
    let fields = vfields(u.grid().dim());
    let mut acc = Accumulator { kinds, by_length: vec![vec![0.0; kinds.len()]; max_len + 1] };
    acc.visit(&fields, u, 0, max_len)?;
    let mut out = acc.by_length;
    for j in 1..out.len() {
        for m in 0..kinds.len() {
            out[j][m] += out[j - 1][m];
        }
    }
    Ok(out)
}

fn sides(statement: GnStatement, sample: &GnSample) -> Result<(f64, f64)> {
    let u = &sample.u;
    match statement {
        GnStatement::BaseCase { k, p } => {
            let kinds = [lebesgue(exponent(k, p)), lebesgue(exponent(k, p - 1)), lebesgue(exponent(k, p + 1))];
            let s = v_norms(u, 2, &kinds)?;
            Ok((s[1][0].powi(2), s[0][1] * s[2][2]))
        }
        GnStatement::Corollary { k, l } => {
            let kinds = [lebesgue(exponent(k, l)), NormKind::L2];
            let s = v_norms(u, k, &kinds)?;
            let theta = l as f64 / k as f64;
            Ok((s[l][0], u.sup_norm().powf(1.0 - theta) * s[k][1].powf(theta)))
        }
        GnStatement::ProductBound { k } => {
            let partner = sample
                .partner
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("the product bound needs a partner field per sample".into()))?;
            let kinds = [NormKind::L2];
            let lhs = v_norms(&u.mul(partner)?, k, &kinds)?[k][0];
            let vu = v_norms(u, k, &kinds)?[k][0];
            let vp = v_norms(partner, k, &kinds)?[k][0];
            Ok((lhs, u.sup_norm() * vp + vu * partner.sup_norm()))
        }
    }
}

/// Left over right side of `statement` per sample, constant stripped.
/// Group maxima over `parameter` must agree within `spread_limit`.
pub fn probe_gagliardo_nirenberg(
    samples: &[GnSample],
    statement: GnStatement,
    spread_limit: f64,
) -> Result<ProbeReport> {
    statement.validate()?;
    let mut out = Vec::with_capacity(samples.len());
    let mut excluded = Vec::new();
    for (i, sample) in samples.iter().enumerate() {
        let (lhs, rhs) = sides(statement, sample)?;
        let label = format!("sample {i}, parameter = {}", sample.parameter);
        push_ratio(&mut out, &mut excluded, label, sample.parameter, lhs, rhs)?;
    }
    Ok(ProbeReport::build(statement.name(), out, excluded, spread_limit, None))
}
