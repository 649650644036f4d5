//! Reference computations that share no code with the library: Gauss–Legendre
//! rules and volume potentials by quadrature in spherical coordinates.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use refract_core::{Domain, Vec3};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫_a^b f` with an `n`-point Gauss rule.
pub fn integrate<T>(f: impl Fn(f64) -> T, a: f64, b: f64, n: usize) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::iter::Sum,
{
    let (x, w) = gauss_legendre(n);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter()
        .zip(&w)
        .map(|(&t, &wt)| f(m + h * t) * (wt * h))
        .sum()
}

/// Parameter interval `[t0, t1]` (with `t ≥ 0`) where the ray `x + t s` lies
/// in the box, if any.
pub fn ray_box(x: Vec3, s: Vec3, domain: &Domain) -> Option<(f64, f64)> {
    let (lo, hi) = (domain.lo(), domain.hi());
    let mut t0 = 0.0f64;
    let mut t1 = f64::INFINITY;
    for ax in 0..3 {
        if s[ax].abs() < 1e-300 {
            if x[ax] < lo[ax] || x[ax] > hi[ax] {
                return None;
            }
            continue;
        }
        let a = (lo[ax] - x[ax]) / s[ax];
        let b = (hi[ax] - x[ax]) / s[ax];
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t1 > t0).then_some((t0, t1))
}

/// Resolution of the spherical quadrature: points in `cos θ`, in `φ` and
/// along each ray.
#[derive(Debug, Clone, Copy)]
pub struct SphericalRule {
    pub polar: usize,
    pub azimuth: usize,
    pub radial: usize,
}

impl Default for SphericalRule {
    fn default() -> Self {
        SphericalRule {
            polar: 48,
            azimuth: 96,
            radial: 16,
        }
    }
}

/// `∫_D e^{ik|x−y|}/(4π|x−y|) f(y) dy` in spherical coordinates centered at
/// `x`, where the `1/r` singularity cancels against the Jacobian.
pub fn volume_potential(
    x: Vec3,
    k: f64,
    domain: &Domain,
    f: impl Fn(Vec3) -> Complex64,
    rule: SphericalRule,
) -> Complex64 {
    let (ct, wt) = gauss_legendre(rule.polar);
    let (ph, wp) = gauss_legendre(rule.azimuth);
    let (rx, rw) = gauss_legendre(rule.radial);
    let mut total = Complex64::new(0.0, 0.0);
    for (&c, &wc) in ct.iter().zip(&wt) {
        let sin = (1.0 - c * c).sqrt();
        for (&p, &wph) in ph.iter().zip(&wp) {
            let phi = PI * (p + 1.0);
            let s = Vec3::new(sin * phi.cos(), sin * phi.sin(), c);
            let Some((t0, t1)) = ray_box(x, s, domain) else {
                continue;
            };
            let (m, h) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
            let mut ray = Complex64::new(0.0, 0.0);
            for (&r, &w) in rx.iter().zip(&rw) {
                let t = m + h * r;
                ray += Complex64::new(0.0, k * t).exp() * t * f(x + s * t) * (w * h);
            }
            total += ray * (wc * wph * PI);
        }
    }
    total / (4.0 * PI)
}

/// `∫_{B(c, a)} e^{ik|x−y|}/(4π|x−y|) dy` by the same quadrature restricted to
/// a ball. `x` must lie inside the ball.
pub fn ball_potential_quadrature(
    x: Vec3,
    c: Vec3,
    a: f64,
    k: f64,
    rule: SphericalRule,
) -> Complex64 {
    let (ct, wt) = gauss_legendre(rule.polar);
    let (ph, wp) = gauss_legendre(rule.azimuth);
    let d = x - c;
    let mut total = Complex64::new(0.0, 0.0);
    for (&cth, &wc) in ct.iter().zip(&wt) {
        let sin = (1.0 - cth * cth).sqrt();
        for (&p, &wph) in ph.iter().zip(&wp) {
            let phi = PI * (p + 1.0);
            let s = Vec3::new(sin * phi.cos(), sin * phi.sin(), cth);
            // Exit distance from |d + t s| = a.
            let b = d.dot(s);
            let t1 = -b + (b * b - d.dot(d) + a * a).sqrt();
            let ray = integrate(
                |t| Complex64::new(0.0, k * t).exp() * t,
                0.0,
                t1,
                rule.radial,
            );
            total += ray * (wc * wph * PI);
        }
    }
    total / (4.0 * PI)
}

/// `∫_cell g(x, y) dy` by a tensor Gauss rule; accurate when `x` is well
/// outside the cell.
pub fn box_integral(x: Vec3, lo: Vec3, hi: Vec3, k: f64, n: usize) -> Complex64 {
    let (t, w) = gauss_legendre(n);
    let mut s = Complex64::new(0.0, 0.0);
    let h = (hi - lo) * 0.5;
    let m = (hi + lo) * 0.5;
    for (&a, &wa) in t.iter().zip(&w) {
        for (&b, &wb) in t.iter().zip(&w) {
            for (&c, &wc) in t.iter().zip(&w) {
                let y = Vec3::new(m[0] + h[0] * a, m[1] + h[1] * b, m[2] + h[2] * c);
                let r = x.distance(y);
                s += Complex64::new(0.0, k * r).exp() / (4.0 * PI * r) * (wa * wb * wc);
            }
        }
    }
    s * (h[0] * h[1] * h[2])
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn gauss_rule_integrates_polynomials() {
        for n in [1, 2, 5, 16] {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            let exact = if deg % 2 == 0 {
                2.0 / (deg as f64 + 1.0)
            } else {
                0.0
            };
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - exact).abs() < 1e-14, "n = {n}");
        }
    }
}
