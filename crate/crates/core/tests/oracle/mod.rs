//! Reference computations that do not touch the crate's FFT or generator
//! code: closed-form Gaussian expressions, composite Gauss-Legendre
//! quadrature, Fornberg finite differences and an oscillatory Fourier
//! integral.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C;

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton on P_m.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=m {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for j in 2..=m {
                    let q2 = ((2 * j - 1) as f64 * z * q1 - (j - 1) as f64 * q0) / j as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = m as f64 * (z * q1 - q0) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
    }
    (x, w)
}

/// Composite 20-point Gauss-Legendre over `panels` equal panels.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(lo + 0.5 * h * (xi + 1.0));
        }
        total += 0.5 * h * s;
    }
    total
}

pub fn quad_c(f: impl Fn(f64) -> C, a: f64, b: f64, panels: usize) -> C {
    let (x, w) = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    let mut total = C::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            total += f(lo + 0.5 * h * (xi + 1.0)) * (0.5 * h * wi);
        }
    }
    total
}

/// Fornberg weights for the `order`-th derivative at `x0` from `nodes`.
pub fn fornberg(order: usize, x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// `Σ c_{m,j} ⟨z⟩^m z^j · exp(-a z² + b z)` in one variable.
#[derive(Debug, Clone)]
pub struct Expr {
    pub a: C,
    pub b: C,
    pub terms: BTreeMap<(i32, u32), C>,
}

fn bracket(z: f64) -> f64 {
    (1.0 + z * z).sqrt()
}

impl Expr {
    /// `amp · exp(-a z² + b z)`.
    pub fn gaussian(amp: C, a: C, b: C) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0), amp);
        Self { a, b, terms }
    }

    /// `amp · exp(-(z-c)²/(2w²) + i k z)`.
    pub fn shifted(amp: f64, w: f64, c: f64, k: f64) -> Self {
        let a = 1.0 / (2.0 * w * w);
        let amp = amp * (-c * c * a).exp();
        Self::gaussian(C::new(amp, 0.0), C::new(a, 0.0), C::new(2.0 * a * c, k))
    }

    fn add_term(&mut self, key: (i32, u32), v: C) {
        *self.terms.entry(key).or_insert(C::new(0.0, 0.0)) += v;
    }

    pub fn eval(&self, z: f64) -> C {
        let e = (-self.a * z * z + self.b * z).exp();
        let mut s = C::new(0.0, 0.0);
        for (&(m, j), &c) in &self.terms {
            s += c * bracket(z).powi(m) * z.powi(j as i32);
        }
        s * e
    }

    pub fn scale(&self, c: C) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &Expr) -> Self {
        assert!((self.a - other.a).norm() < 1e-15 && (self.b - other.b).norm() < 1e-15);
        let mut out = self.clone();
        for (&k, &v) in &other.terms {
            out.add_term(k, v);
        }
        out
    }

    pub fn mul_z(&self) -> Self {
        let mut out = Expr { a: self.a, b: self.b, terms: BTreeMap::new() };
        for (&(m, j), &c) in &self.terms {
            out.add_term((m, j + 1), c);
        }
        out
    }

    pub fn mul_bracket(&self) -> Self {
        let mut out = Expr { a: self.a, b: self.b, terms: BTreeMap::new() };
        for (&(m, j), &c) in &self.terms {
            out.add_term((m + 1, j), c);
        }
        out
    }

    /// `d/dz`.
    pub fn dz(&self) -> Self {
        let mut out = Expr { a: self.a, b: self.b, terms: BTreeMap::new() };
        for (&(m, j), &c) in &self.terms {
            if m != 0 {
                out.add_term((m - 2, j + 1), c * m as f64);
            }
            if j > 0 {
                out.add_term((m, j - 1), c * j as f64);
            }
            out.add_term((m, j + 1), c * (-2.0) * self.a);
            out.add_term((m, j), c * self.b);
        }
        out
    }

    /// `D = -i d/dz`.
    pub fn d(&self) -> Self {
        self.dz().scale(C::new(0.0, -1.0))
    }

    /// Product of two expressions.
    pub fn mul(&self, other: &Expr) -> Self {
        let mut out = Expr { a: self.a + other.a, b: self.b + other.b, terms: BTreeMap::new() };
        for (&(m1, j1), &c1) in &self.terms {
            for (&(m2, j2), &c2) in &other.terms {
                out.add_term((m1 + m2, j1 + j2), c1 * c2);
            }
        }
        out
    }

    /// Multiplication by `exp(i c z²)`.
    pub fn chirp(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.a -= C::new(0.0, c);
        out
    }

    /// `∫ |e|^r dz` over `[-r_max, r_max]`.
    pub fn lr_integral(&self, r: f64, r_max: f64, panels: usize) -> f64 {
        quad(|z| self.eval(z).norm().powf(r), -r_max, r_max, panels)
    }

    pub fn l2_sqr(&self, r_max: f64, panels: usize) -> f64 {
        quad(|z| self.eval(z).norm_sqr(), -r_max, r_max, panels)
    }
}

/// `sqrt(Σ over ordered k-tuples ‖A_1 ⋯ A_k u‖²)` with the identity among
/// the generators.
pub fn generator_norm(u: &Expr, gens: &[&dyn Fn(&Expr) -> Expr], k: usize, r_max: f64) -> f64 {
    fn walk(u: &Expr, gens: &[&dyn Fn(&Expr) -> Expr], depth: usize, r_max: f64) -> f64 {
        if depth == 0 {
            return u.l2_sqr(r_max, 400);
        }
        walk(u, gens, depth - 1, r_max) + gens.iter().map(|g| walk(&g(u), gens, depth - 1, r_max)).sum::<f64>()
    }
    walk(u, gens, k, r_max).sqrt()
}

/// `W^k_{M_t}` in one dimension: `2tD - z`, `D`.
pub fn norm_mt(u: &Expr, t: f64, k: usize, r_max: f64) -> f64 {
    let gal = |e: &Expr| e.d().scale(C::new(2.0 * t, 0.0)).add(&e.mul_z().scale(C::new(-1.0, 0.0)));
    let d = |e: &Expr| e.d();
    generator_norm(u, &[&gal, &d], k, r_max)
}

/// `W^k_{M_{t,0}}` in one dimension: `2tD`, `D + z/2t`.
pub fn norm_mt0(u: &Expr, t: f64, k: usize, r_max: f64) -> f64 {
    let td = |e: &Expr| e.d().scale(C::new(2.0 * t, 0.0));
    let conj = |e: &Expr| e.d().add(&e.mul_z().scale(C::new(1.0 / (2.0 * t), 0.0)));
    generator_norm(u, &[&td, &conj], k, r_max)
}

/// `W^k_N` in one dimension: `D_ζ`, `ζ`.
pub fn norm_n(u: &Expr, k: usize, r_max: f64) -> f64 {
    let d = |e: &Expr| e.d();
    let z = |e: &Expr| e.mul_z();
    generator_norm(u, &[&d, &z], k, r_max)
}

/// All ordered words of length <= `len` in `D`, `⟨ζ⟩` (one dimension).
pub fn v_words(u: &Expr, len: usize) -> Vec<Vec<Expr>> {
    let mut levels = vec![vec![u.clone()]];
    for _ in 0..len {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for e in prev {
            next.push(e.d());
            next.push(e.mul_bracket());
        }
        levels.push(next);
    }
    levels
}

/// `Σ_{|w| <= len} ‖w u‖_{L^r}`.
pub fn v_norm(u: &Expr, len: usize, r: f64, r_max: f64) -> f64 {
    v_words(u, len).iter().flatten().map(|e| e.lr_integral(r, r_max, 400).powf(1.0 / r)).sum()
}

/// `(2π)^{-1} ∫ e^{izξ} e^{-iτξ²} û(ξ) dξ` over `[-xi_max, xi_max]`.
pub fn fourier_evolution(u_hat: impl Fn(f64) -> C, z: f64, tau: f64, xi_max: f64, panels: usize) -> C {
    quad_c(|xi| C::from_polar(1.0, z * xi - tau * xi * xi) * u_hat(xi), -xi_max, xi_max, panels) / (2.0 * PI)
}

/// `Σ_m g(z + 2mL)` for `|m| <= images`.
pub fn periodize(g: impl Fn(f64) -> C, z: f64, half_width: f64, images: i32) -> C {
    (-images..=images).map(|m| g(z + 2.0 * m as f64 * half_width)).sum()
}

/// Relative discrete L² distance between two sample vectors.
pub fn rel_l2(a: &[C], b: &[C]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
