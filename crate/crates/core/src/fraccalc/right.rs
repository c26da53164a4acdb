//! Right-sided operators on analytic operands.

use std::sync::Arc;

use statrs::function::gamma::gamma_ur;

use super::FracError;
use crate::quad::{integrate_with_breaks, QuadOptions};
use crate::specialfn::gamma;

/// A function on `[0, ∞)` with derivatives of every order the operators ask for.
pub trait SmoothFn: Send + Sync {
    fn deriv(&self, k: u32, x: f64) -> Result<f64, FracError>;

    /// An upper bound for `∫_y^∞ |f^{(k)}(t)| dt`, or `None` when it diverges.
    fn tail_bound(&self, k: u32, y: f64) -> Option<f64>;

    /// A rate `δ > 0` with `|f^{(k)}(x)|` decaying at least like `e^{−δx}`
    /// up to polynomial factors; 0 when there is no such rate.
    fn decay_rate(&self) -> f64;
}

/// `Σ_m P_m(x) e^{−λ_m x}` with polynomials `P_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpPolynomial {
    /// `(coefficients in ascending powers, λ)`.
    terms: Vec<(Vec<f64>, f64)>,
}

impl ExpPolynomial {
    pub fn new(terms: Vec<(Vec<f64>, f64)>) -> Result<Self, FracError> {
        for (c, l) in &terms {
            if !l.is_finite() || c.iter().any(|v| !v.is_finite()) {
                return Err(FracError::InvalidArgument {
                    name: "term",
                    value: *l,
                    reason: "coefficients and rates must be finite",
                });
            }
        }
        Ok(Self { terms })
    }

    /// `a e^{−λx}`.
    pub fn exp(a: f64, lambda: f64) -> Result<Self, FracError> {
        Self::new(vec![(vec![a], lambda)])
    }

    fn derived_terms(&self, k: u32) -> Vec<(Vec<f64>, f64)> {
        self.terms
            .iter()
            .map(|(c, l)| {
                let mut c = c.clone();
                for _ in 0..k {
                    // (P e^{−λx})' = (P' − λP) e^{−λx}
                    let mut d: Vec<f64> = c.iter().map(|v| -l * v).collect();
                    for j in 1..c.len() {
                        d[j - 1] += j as f64 * c[j];
                    }
                    c = d;
                }
                (c, *l)
            })
            .collect()
    }
}

impl SmoothFn for ExpPolynomial {
    fn deriv(&self, k: u32, x: f64) -> Result<f64, FracError> {
        Ok(self
            .derived_terms(k)
            .iter()
            .map(|(c, l)| c.iter().rev().fold(0.0, |acc, v| acc * x + v) * (-l * x).exp())
            .sum())
    }

    fn tail_bound(&self, k: u32, y: f64) -> Option<f64> {
        let mut total = 0.0;
        for (c, l) in self.derived_terms(k) {
            if c.iter().all(|v| *v == 0.0) {
                continue;
            }
            if l <= 0.0 {
                return None;
            }
            for (j, v) in c.iter().enumerate() {
                if *v == 0.0 {
                    continue;
                }
                // ∫_y^∞ t^j e^{−λt} dt = Γ(j+1, λy) / λ^{j+1}
                let full = gamma(j as f64 + 1.0) / l.powi(j as i32 + 1);
                let part = if y >= 0.0 {
                    full * gamma_ur(j as f64 + 1.0, l * y)
                } else {
                    full + (-y).powi(j as i32 + 1) * (-l * y).exp()
                };
                total += v.abs() * part;
            }
        }
        Some(total)
    }

    fn decay_rate(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, l)| *l)
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn is_integer(r: f64) -> bool {
    (r - r.round()).abs() < 1e-12
}

/// `ᵅ_xR_b^r g(x) = e^{αx} ᶜ_xD_b^r[e^{−αy} g(y)](x)` for `α ≥ 0`; `α = 0`
/// is the right Caputo derivative. `b` may be infinite, in which case the
/// integral is truncated once `g`'s tail bound drops below `tail_tol`.
pub fn right_op(
    g: &dyn SmoothFn,
    r: f64,
    alpha: f64,
    x: f64,
    upper: f64,
    tail_tol: f64,
) -> Result<f64, FracError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(FracError::InvalidArgument {
            name: "order",
            value: r,
            reason: "must be positive",
        });
    }
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(FracError::InvalidArgument {
            name: "shift",
            value: alpha,
            reason: "right operators need a non-negative tilt",
        });
    }
    if !x.is_finite() {
        return Err(FracError::Domain {
            x,
            reason: "point must be finite",
        });
    }
    if is_integer(r) {
        // (α − d/dx)^m g
        let m = r.round() as u32;
        let mut acc = 0.0;
        for i in 0..=m {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += binom(m, i) * alpha.powi((m - i) as i32) * sign * g.deriv(i, x)?;
        }
        return Ok(acc);
    }
    let n = r.floor() as u32 + 1;
    let nu = n as f64 - r;
    let coef: Vec<f64> = (0..=n)
        .map(|i| binom(n, i) * (-alpha).powi((n - i) as i32))
        .collect();
    let t_end = if upper.is_finite() {
        upper - x
    } else {
        tail_cutoff(g, n, nu, alpha, x, tail_tol)?
    };
    if t_end <= 0.0 {
        return Ok(0.0);
    }
    // t = w^{1/ν} removes the t^{ν−1} endpoint singularity.
    let mut failure = None;
    let integrand = |w: f64| {
        let t = w.powf(1.0 / nu);
        let mut s = 0.0;
        for (i, c) in coef.iter().enumerate() {
            match g.deriv(i as u32, x + t) {
                Ok(v) => s += c * v,
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        s * (-alpha * t).exp()
    };
    let mut breaks = vec![0.0];
    let mut t = 1.0;
    while t < t_end {
        breaks.push(t.powf(nu));
        t *= 2.0;
    }
    breaks.push(t_end.powf(nu));
    let scale = gamma(nu + 1.0);
    let opts = QuadOptions::new(tail_tol * scale, 1e-12);
    let v = integrate_with_breaks(integrand, &breaks, opts)?.value;
    if let Some(e) = failure {
        return Err(e);
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * v / scale)
}

fn tail_cutoff(
    g: &dyn SmoothFn,
    n: u32,
    nu: f64,
    alpha: f64,
    x: f64,
    tail_tol: f64,
) -> Result<f64, FracError> {
    let mut t = 1.0;
    loop {
        let mut bound = 0.0;
        for i in 0..=n {
            let tb = g.tail_bound(i, x + t).ok_or_else(|| {
                FracError::ContractViolation(format!("derivative {i} of the operand has no finite tail"))
            })?;
            bound += binom(n, i) * alpha.powi((n - i) as i32) * tb;
        }
        bound *= t.powf(nu - 1.0) * (-alpha * t).exp() / gamma(nu);
        if bound <= tail_tol {
            return Ok(t);
        }
        t *= 2.0;
        if t > 1e6 {
            return Err(FracError::ContractViolation(
                "operand tail does not decay below the tolerance".into(),
            ));
        }
    }
}

/// `ᶜ_xD_∞^r g(x)`.
pub fn right_caputo_deriv(g: &dyn SmoothFn, r: f64, x: f64, tail_tol: f64) -> Result<f64, FracError> {
    right_op(g, r, 0.0, x, f64::INFINITY, tail_tol)
}

/// `scale · ᵅ_xR_∞^r[inner] + offset · inner`, itself a [`SmoothFn`] so that
/// right operators compose. Derivatives commute with the operator because the
/// upper limit is infinite.
#[derive(Clone)]
pub struct RightApplied {
    pub inner: Arc<dyn SmoothFn>,
    pub order: f64,
    pub shift: f64,
    pub scale: f64,
    pub offset: f64,
    pub tail_tol: f64,
}

struct Shifted<'a> {
    inner: &'a dyn SmoothFn,
    k: u32,
}

impl SmoothFn for Shifted<'_> {
    fn deriv(&self, i: u32, x: f64) -> Result<f64, FracError> {
        self.inner.deriv(i + self.k, x)
    }

    fn tail_bound(&self, i: u32, y: f64) -> Option<f64> {
        self.inner.tail_bound(i + self.k, y)
    }

    fn decay_rate(&self) -> f64 {
        self.inner.decay_rate()
    }
}

impl SmoothFn for RightApplied {
    fn deriv(&self, k: u32, x: f64) -> Result<f64, FracError> {
        let shifted = Shifted {
            inner: self.inner.as_ref(),
            k,
        };
        let main = right_op(&shifted, self.order, self.shift, x, f64::INFINITY, self.tail_tol)?;
        let rest = if self.offset != 0.0 {
            self.offset * self.inner.deriv(k, x)?
        } else {
            0.0
        };
        Ok(self.scale * main + rest)
    }

    /// Heuristic: bounds the inner tail at `y + s` by its value at `y` damped
    /// with half the inner decay rate.
    fn tail_bound(&self, k: u32, y: f64) -> Option<f64> {
        let r = self.order;
        let a = self.shift;
        let mut total = 0.0;
        if is_integer(r) {
            let m = r.round() as u32;
            for i in 0..=m {
                total += binom(m, i) * a.powi((m - i) as i32) * self.inner.tail_bound(i + k, y)?;
            }
        } else {
            let n = r.floor() as u32 + 1;
            let nu = n as f64 - r;
            let rate = a + 0.5 * self.inner.decay_rate();
            if rate <= 0.0 {
                return None;
            }
            for i in 0..=n {
                total += binom(n, i) * a.powi((n - i) as i32) * self.inner.tail_bound(i + k, y)?;
            }
            total /= rate.powf(nu);
        }
        let off = if self.offset != 0.0 {
            self.offset.abs() * self.inner.tail_bound(k, y)?
        } else {
            0.0
        };
        Some(self.scale.abs() * total + off)
    }

    fn decay_rate(&self) -> f64 {
        self.inner.decay_rate()
    }
}
