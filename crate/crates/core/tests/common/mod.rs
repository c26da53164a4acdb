//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fracruin::model::ModelSpec;
use fracruin::quad::{integrate, integrate_to_infinity, QuadOptions};
use fracruin::solver::characteristic_fn;
use num_complex::Complex64;

/// Solves `(1 + λ) ψ(u) = λ ∫₀ᵘ ψ(u − y) f(y) dy + λ (1 − F(u))` on
/// `[0, u_max]` by trapezoidal marching. Returns `(h, values)`.
pub fn volterra_march(
    lambda: f64,
    density: impl Fn(f64) -> f64,
    cdf: impl Fn(f64) -> f64,
    h: f64,
    u_max: f64,
) -> (f64, Vec<f64>) {
    let n = (u_max / h).round() as usize;
    let h = u_max / n as f64;
    let f: Vec<f64> = (0..=n).map(|i| density(i as f64 * h)).collect();
    let mut psi = Vec::with_capacity(n + 1);
    psi.push(lambda / (1.0 + lambda));
    for i in 1..=n {
        // trapezoid over y_j = j h; the j = 0 term holds the unknown ψ_i
        let mut s = 0.5 * f[i] * psi[0];
        for j in 1..i {
            s += f[j] * psi[i - j];
        }
        let known = lambda * h * s + lambda * (1.0 - cdf(i as f64 * h));
        psi.push(known / (1.0 + lambda - lambda * h * 0.5 * f[0]));
    }
    (h, psi)
}

/// Number of zeros of the characteristic function inside the rectangle
/// `[re_lo, re_hi] × [−im_max, im_max]`, by the argument principle with
/// adaptive refinement of the contour.
pub fn count_zeros(spec: &ModelSpec, re_lo: f64, re_hi: f64, im_max: f64) -> usize {
    let g = |z: Complex64| characteristic_fn(spec, z).expect("inside the domain");
    let corners = [
        Complex64::new(re_lo, -im_max),
        Complex64::new(re_hi, -im_max),
        Complex64::new(re_hi, im_max),
        Complex64::new(re_lo, im_max),
    ];
    let mut total = 0.0;
    // Pre-split each side so a full turn cannot hide inside one coarse step.
    let pieces = 4096;
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        for j in 0..pieces {
            let p = a + (b - a) * (j as f64 / pieces as f64);
            let q = a + (b - a) * ((j + 1) as f64 / pieces as f64);
            total += winding_segment(&g, p, q, 0);
        }
    }
    let turns = total / (2.0 * std::f64::consts::PI);
    assert!((turns - turns.round()).abs() < 1e-6, "non-integer winding {turns}");
    turns.round() as usize
}

fn winding_segment(g: &impl Fn(Complex64) -> Complex64, a: Complex64, b: Complex64, depth: u32) -> f64 {
    let d = (g(b) / g(a)).arg();
    if d.abs() < 0.1 || depth > 40 {
        return d;
    }
    let m = 0.5 * (a + b);
    winding_segment(g, a, m, depth + 1) + winding_segment(g, m, b, depth + 1)
}

/// Bisection on a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `∫₀^∞ e^{−st} g(t) dt` by adaptive quadrature, split at 1.
pub fn laplace(g: impl Fn(f64) -> f64, s: f64) -> f64 {
    let opts = QuadOptions::new(1e-14, 1e-11);
    let mut f = |t: f64| if t == 0.0 { 0.0 } else { (-s * t).exp() * g(t) };
    integrate(&mut f, 0.0, 1.0, opts).unwrap().value + integrate_to_infinity(&mut f, 1.0, opts).unwrap().value
}
