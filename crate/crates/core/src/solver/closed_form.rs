//! Closed forms for three model families and the small-μ limit, used as
//! independent cross-checks of the general pipeline.
//!
//! Roots here are in solver coordinates (the `z_p` of `e^{−z_p u}`). The
//! gamma-time formulas are often written with shifted roots `x = z + λ₁/c`;
//! [`example1_psi`] and [`example2_psi`] use that form internally.

use super::{RuinSolution, SolverError};
use crate::model::{GammaComponent, ModelSpec};

fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn check_positive(pairs: &[(&'static str, f64)]) -> Result<(), SolverError> {
    for &(name, value) in pairs {
        if !(value.is_finite() && value > 0.0) {
            return Err(SolverError::Argument { name, value });
        }
    }
    Ok(())
}

fn gamma_time_net_profit(r: f64, lambda1: f64, mean_claim: f64, c: f64) -> Result<(), SolverError> {
    if c * r / lambda1 <= mean_claim {
        return Err(SolverError::Unsupported(format!(
            "net profit fails: c·r/λ₁ = {} <= E[X] = {mean_claim}",
            c * r / lambda1
        )));
    }
    Ok(())
}

/// Positive root of `(1 − z/α)(1 + cz/λ₁)^r = 1` (Γ(r, λ₁) waiting times,
/// Exp(α) claims).
pub fn example1_root(r: f64, lambda1: f64, alpha: f64, c: f64) -> Result<f64, SolverError> {
    check_positive(&[("r", r), ("lambda1", lambda1), ("alpha", alpha), ("c", c)])?;
    gamma_time_net_profit(r, lambda1, 1.0 / alpha, c)?;
    let h = |z: f64| (1.0 - z / alpha).ln() + r * (1.0 + c * z / lambda1).ln();
    // h is concave with h(0) = 0; its maximizer separates 0 from the root.
    let zmax = (r * c * alpha - lambda1) / (c * (r + 1.0));
    Ok(bisect(h, zmax, alpha))
}

/// `ψ(u) = (λ₁/(c x₂))^r e^{−(x₂ − λ₁/c)u}` with `x₂ = z + λ₁/c`.
pub fn example1_psi(r: f64, lambda1: f64, alpha: f64, c: f64, u: f64) -> Result<f64, SolverError> {
    let z = example1_root(r, lambda1, alpha, c)?;
    let x2 = z + lambda1 / c;
    Ok((lambda1 / (c * x2)).powf(r) * (-(x2 - lambda1 / c) * u).exp())
}

/// The two positive roots `z₁ < α < z₂` of `(1 − z/α)²(1 + cz/λ₁)^r = 1`
/// (Γ(r, λ₁) waiting times, Γ(2, α) claims).
pub fn example2_roots(r: f64, lambda1: f64, alpha: f64, c: f64) -> Result<(f64, f64), SolverError> {
    check_positive(&[("r", r), ("lambda1", lambda1), ("alpha", alpha), ("c", c)])?;
    gamma_time_net_profit(r, lambda1, 2.0 / alpha, c)?;
    let below = |z: f64| 2.0 * (1.0 - z / alpha).ln() + r * (1.0 + c * z / lambda1).ln();
    let zmax = (r * c * alpha - 2.0 * lambda1) / (c * (r + 2.0));
    let z1 = bisect(below, zmax, alpha);
    let above = |z: f64| 2.0 * (z / alpha - 1.0).ln() + r * (1.0 + c * z / lambda1).ln();
    let z2 = bisect(above, alpha, 2.0 * alpha);
    Ok((z1, z2))
}

/// Two-exponential closed form for Γ(2, α) claims, written with the shifted
/// roots `x₂ = z₁ + λ₁/c`, `x₃ = z₂ + λ₁/c`:
/// `ψ(u) = (λ₁/c − x₃)/(x₂ − x₃)·(λ₁/(c x₂))^r e^{(λ₁/c − x₂)u}
///       + (λ₁/c − x₂)/(x₃ − x₂)·(λ₁/(c x₃))^r e^{(λ₁/c − x₃)u}`.
pub fn example2_psi(r: f64, lambda1: f64, alpha: f64, c: f64, u: f64) -> Result<f64, SolverError> {
    let (z1, z2) = example2_roots(r, lambda1, alpha, c)?;
    let shift = lambda1 / c;
    let (x2, x3) = (z1 + shift, z2 + shift);
    let t2 = (shift - x3) / (x2 - x3) * (lambda1 / (c * x2)).powf(r) * ((shift - x2) * u).exp();
    let t3 = (shift - x2) / (x3 - x2) * (lambda1 / (c * x3)).powf(r) * ((shift - x3) * u).exp();
    Ok(t2 + t3)
}

/// Checks that a solved Γ(r, λ₁)/Γ(2, α) model has two real roots ordered as
/// `x₃ > λ₁/c + α > x₂ > λ₁/c` in shifted coordinates, and returns `(x₂, x₃)`.
pub fn example2_bracketing(solution: &RuinSolution) -> Result<(f64, f64), SolverError> {
    let spec = &solution.model;
    let (g, claims) = (spec.interarrival_gammas(), spec.claim_gammas());
    if g.len() != 1 || !spec.interarrival_mls().is_empty() || claims.len() != 1 || claims[0].shape != 2.0 {
        return Err(SolverError::Unsupported(
            "ordering check needs one gamma waiting time and Γ(2, α) claims".into(),
        ));
    }
    let (lambda1, alpha, c) = (g[0].rate, claims[0].rate, spec.premium_rate());
    let shift = lambda1 / c;
    if solution.roots.len() != 2 || solution.roots.iter().any(|r| r.z.im != 0.0) {
        return Err(SolverError::Bracketing(format!(
            "expected two real roots, got {:?}",
            solution.roots.iter().map(|r| r.z).collect::<Vec<_>>()
        )));
    }
    let x2 = solution.roots[0].z.re + shift;
    let x3 = solution.roots[1].z.re + shift;
    if x3 > shift + alpha && shift + alpha > x2 && x2 > shift {
        Ok((x2, x3))
    } else {
        Err(SolverError::Bracketing(format!(
            "x₃ = {x3}, λ₁/c + α = {}, x₂ = {x2}, λ₁/c = {shift}",
            shift + alpha
        )))
    }
}

/// `c^μ x − α c^μ + λ₂ x^{1−μ}` (ML(μ, λ₂) waiting times, Exp(α) claims).
pub fn example3_residual(mu: f64, lambda2: f64, alpha: f64, c: f64, x: f64) -> f64 {
    let cm = c.powf(mu);
    cm * x - alpha * cm + lambda2 * x.powf(1.0 - mu)
}

/// Unique root of [`example3_residual`] in `(0, α)`.
pub fn example3_root(mu: f64, lambda2: f64, alpha: f64, c: f64) -> Result<f64, SolverError> {
    check_positive(&[("mu", mu), ("lambda2", lambda2), ("alpha", alpha), ("c", c)])?;
    if mu > 1.0 {
        return Err(SolverError::Argument { name: "mu", value: mu });
    }
    if mu == 1.0 && c <= lambda2 / alpha {
        return Err(SolverError::Unsupported("net profit fails for μ = 1".into()));
    }
    Ok(bisect(|x| example3_residual(mu, lambda2, alpha, c, x), 0.0, alpha))
}

/// `ψ(u) = (1 − x/α) e^{−x u}`.
pub fn example3_psi(mu: f64, lambda2: f64, alpha: f64, c: f64, u: f64) -> Result<f64, SolverError> {
    let x = example3_root(mu, lambda2, alpha, c)?;
    Ok((1.0 - x / alpha) * (-x * u).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LundbergReport {
    /// Adjustment coefficient taken from the solver's root.
    pub s: f64,
    /// `M_X(s) M_T(−cs) − 1`.
    pub value: f64,
    pub passed: bool,
}

/// Evaluates `M_X(s) M_T(−cs) − 1` at the solver's root for a Γ(r, λ₁)
/// waiting time with Exp(α) claims; passes when below 1e-8.
pub fn lundberg_check(spec: &ModelSpec, solution: &RuinSolution) -> Result<LundbergReport, SolverError> {
    let (g, claims) = (spec.interarrival_gammas(), spec.claim_gammas());
    if g.len() != 1 || !spec.interarrival_mls().is_empty() || claims.len() != 1 || claims[0].shape != 1.0 {
        return Err(SolverError::Unsupported(
            "adjustment-coefficient check needs one gamma waiting time and exponential claims".into(),
        ));
    }
    let root = solution
        .roots
        .first()
        .ok_or_else(|| SolverError::Unsupported("solution has no roots".into()))?;
    let (r, lambda1, alpha, c) = (g[0].shape, g[0].rate, claims[0].rate, spec.premium_rate());
    let s = root.z.re;
    let mx = alpha / (alpha - s);
    let mt = (lambda1 / (lambda1 + c * s)).powf(r);
    let value = mx * mt - 1.0;
    Ok(LundbergReport {
        s,
        value,
        passed: value.abs() < 1e-8 && root.z.im == 0.0,
    })
}

/// `lim_{μ→0} ψ_μ(0) = λ₂/(λ₂ + 1)`, for any claim law.
pub fn psi_zero_at_origin(lambda2: f64) -> f64 {
    lambda2 / (lambda2 + 1.0)
}

/// Small-μ limit of the ruin probability for Exp(α) claims:
/// `ψ₀(u) = λ₂/(λ₂ + 1) · e^{−αu/(λ₂ + 1)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiZero {
    pub lambda2: f64,
    pub alpha: f64,
}

impl PsiZero {
    pub fn at(&self, u: f64) -> f64 {
        psi_zero_at_origin(self.lambda2) * (-self.alpha * u / (self.lambda2 + 1.0)).exp()
    }
}

pub fn psi_zero_limit(claims: &[GammaComponent], lambda2: f64) -> Result<PsiZero, SolverError> {
    check_positive(&[("lambda2", lambda2)])?;
    match claims {
        [g] if g.shape == 1.0 && g.rate > 0.0 => Ok(PsiZero {
            lambda2,
            alpha: g.rate,
        }),
        _ => Err(SolverError::Unsupported(
            "the small-μ limit curve is only available for exponential claims".into(),
        )),
    }
}
