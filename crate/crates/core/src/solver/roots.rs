//! Right-half-plane roots of the characteristic equation.
//!
//! For `Re z ≥ 0` we have `|1 + cz/λ₁| ≥ 1` and `|1 + c^μ z^μ/λ₂| ≥ 1`
//! (`|arg z^μ| ≤ μπ/2 ≤ π/2`), so a root needs `∏|1 − z/α_k|^{s_k} ≤ 1`, i.e.
//! it lies in some disk `|z − α_k| ≤ α_k`. The search therefore covers
//! `0 < Re z ≤ 2 max α`, `0 ≤ Im z ≤ max α`; roots below the real axis are
//! the conjugates of those above it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::characteristic::CharEq;
use super::{CharRoot, SolverError};
use crate::model::ModelSpec;

/// Residual tolerance on the normalized characteristic function `P − 1`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

const MAX_LEVELS: usize = 5;

/// Newton iterates that collapse onto the trivial root `z = 0` are discarded.
/// Kept below the start of the real-axis scan so bracketed small roots stay.
const ORIGIN_GAP: f64 = 1e-13;

/// Finds the `N = Σ s_k` roots with positive real part.
///
/// `tol` bounds `|P(z) − 1|`, the characteristic function divided by
/// `Λ ∏ α^s`; [`CharRoot::residual`] reports the undivided value.
pub fn find_roots(spec: &ModelSpec, tol: f64) -> Result<Vec<CharRoot>, SolverError> {
    let shapes = spec.integer_claim_shapes().ok_or_else(|| {
        SolverError::Unsupported("the root solver needs integer claim shapes".into())
    })?;
    let n: usize = shapes.iter().map(|&s| s as usize).sum();
    let eq = CharEq::new(spec);

    let upper = if polynomial_case(&eq) {
        polynomial_roots(&eq)?
    } else {
        search_roots(&eq, n)?
    };

    let mut roots = Vec::with_capacity(n);
    for z in upper {
        let (g, _) = eq.g_and_dg(z);
        if g.norm() > tol {
            continue;
        }
        if eq.simplicity(z) < 1e-7 {
            return Err(SolverError::RepeatedRoot { z });
        }
        let residual = eq.scale * g.norm();
        if z.im == 0.0 {
            roots.push(CharRoot {
                z,
                residual,
                is_conjugate_pair_member: false,
            });
        } else {
            for w in [z, z.conj()] {
                roots.push(CharRoot {
                    z: w,
                    residual,
                    is_conjugate_pair_member: true,
                });
            }
        }
    }
    roots.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(b.z.im.total_cmp(&a.z.im)));
    for w in roots.windows(2) {
        if (w[0].z - w[1].z).norm() <= 1e-8 * eq.max_alpha() {
            return Err(SolverError::RepeatedRoot { z: w[0].z });
        }
    }
    if roots.len() != n {
        return Err(SolverError::RootCount {
            expected: n,
            found: roots.iter().map(|r| r.z).collect(),
        });
    }
    Ok(roots)
}

/// Integer gamma shapes and μ = 1 make the equation polynomial.
fn polynomial_case(eq: &CharEq) -> bool {
    eq.gammas.iter().all(|&(r, _)| r == r.round() && r <= 200.0)
        && eq.mls.iter().all(|&(mu, _)| mu == 1.0)
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Companion-matrix eigenvalues of `(P(z) − 1)/z`, polished by Newton.
fn polynomial_roots(eq: &CharEq) -> Result<Vec<Complex64>, SolverError> {
    let mut poly = vec![1.0];
    for &(s, a) in &eq.claims {
        for _ in 0..s as usize {
            poly = poly_mul(&poly, &[1.0, -1.0 / a]);
        }
    }
    for &(_, l2) in &eq.mls {
        poly = poly_mul(&poly, &[1.0, eq.c / l2]);
    }
    for &(r, l1) in &eq.gammas {
        for _ in 0..r as usize {
            poly = poly_mul(&poly, &[1.0, eq.c / l1]);
        }
    }
    // Constant term cancels exactly; divide by z.
    let q = &poly[1..];
    let deg = q.len() - 1;
    let lead = q[deg];
    if deg == 0 {
        return Ok(vec![]);
    }
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -q[i] / lead;
    }
    let eig = companion.complex_eigenvalues();
    let amax = eq.max_alpha();
    let mut out: Vec<Complex64> = Vec::new();
    for &z0 in eig.iter() {
        if z0.re <= 1e-9 * amax || z0.im < -1e-9 * amax {
            continue;
        }
        let z = if z0.im.abs() <= 1e-9 * z0.norm() {
            newton_real(eq, z0.re)
        } else {
            newton(eq, z0)
        };
        if let Some(z) = z {
            push_unique(&mut out, z, amax);
        }
    }
    Ok(out)
}

fn push_unique(out: &mut Vec<Complex64>, z: Complex64, scale: f64) {
    if !out.iter().any(|w| (w - z).norm() <= 1e-8 * scale) {
        out.push(z);
    }
}

/// Damped Newton iteration on `P − 1`, kept in the upper right quadrant.
fn newton(eq: &CharEq, z0: Complex64) -> Option<Complex64> {
    let amax = eq.max_alpha();
    let max_step = 0.25 * amax;
    let mut z = z0;
    for _ in 0..100 {
        let (g, dg) = eq.g_and_dg(z);
        let mut step = g / dg;
        if !(step.re.is_finite() && step.im.is_finite()) {
            z += Complex64::new(1e-7 * amax, 1e-7 * amax);
            continue;
        }
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        let mut next = z - step;
        if next.re <= 0.0 {
            next.re = 0.5 * z.re;
        }
        if next.im < 0.0 {
            next.im = -next.im;
        }
        let done = (next - z).norm() <= 1e-15 * next.norm();
        z = next;
        if done {
            break;
        }
    }
    if z.im.abs() <= 1e-10 * z.norm() {
        return newton_real(eq, z.re);
    }
    let (g, _) = eq.g_and_dg(z);
    (g.norm() < 1e-8 && z.re > ORIGIN_GAP * amax).then_some(z)
}

/// Newton on the real axis, where `P − 1` is real.
fn newton_real(eq: &CharEq, x0: f64) -> Option<Complex64> {
    let amax = eq.max_alpha();
    let mut x = x0;
    for _ in 0..100 {
        let (g, dg) = eq.g_and_dg(Complex64::new(x, 0.0));
        let mut step = g.re / dg.re;
        if !step.is_finite() {
            x += 1e-7 * amax;
            continue;
        }
        step = step.clamp(-0.25 * amax, 0.25 * amax);
        let mut next = x - step;
        if next <= 0.0 {
            next = 0.5 * x;
        }
        let done = (next - x).abs() <= 1e-15 * next.abs();
        x = next;
        if done {
            break;
        }
    }
    let (g, _) = eq.g_and_dg(Complex64::new(x, 0.0));
    (g.norm() < 1e-8 && x > ORIGIN_GAP * amax).then_some(Complex64::new(x, 0.0))
}

fn count_with_conjugates(roots: &[Complex64]) -> usize {
    roots.iter().map(|z| if z.im == 0.0 { 1 } else { 2 }).sum()
}

/// Sign-change scan on the real axis plus Newton from a rectangular seed grid,
/// refined until `n` roots (conjugates included) are located.
fn search_roots(eq: &CharEq, n: usize) -> Result<Vec<Complex64>, SolverError> {
    let amax = eq.max_alpha();
    let (re_max, im_max) = (2.0 * amax, amax);
    let mut found: Vec<Complex64> = Vec::new();

    let scan = 2000;
    // Start just right of the origin so a root close to 0 is bracketed too.
    let x0 = 1e-12 * re_max;
    let mut prev = Some((x0, eq.g_and_dg(Complex64::new(x0, 0.0)).0.re));
    for i in 1..=scan {
        let x = re_max * i as f64 / scan as f64;
        let g = eq.g_and_dg(Complex64::new(x, 0.0)).0.re;
        if let Some((xp, gp)) = prev {
            if gp.signum() != g.signum() && g.is_finite() && gp.is_finite() {
                if let Some(z) = bisect_real(eq, xp, x) {
                    push_unique(&mut found, z, amax);
                }
            }
        }
        prev = Some((x, g));
    }
    if count_with_conjugates(&found) == n {
        return Ok(found);
    }

    for level in 0..MAX_LEVELS {
        let m = 12 << level;
        for i in 1..=m {
            for j in 0..=m / 2 {
                let seed = Complex64::new(
                    re_max * i as f64 / m as f64,
                    im_max * j as f64 / (m / 2) as f64,
                );
                if let Some(z) = newton(eq, seed) {
                    push_unique(&mut found, z, amax);
                }
            }
        }
        if count_with_conjugates(&found) >= n {
            break;
        }
    }
    Ok(found)
}

fn bisect_real(eq: &CharEq, mut lo: f64, mut hi: f64) -> Option<Complex64> {
    let g = |x: f64| eq.g_and_dg(Complex64::new(x, 0.0)).0.re;
    let glo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    newton_real(eq, 0.5 * (lo + hi))
}
