//! Two-parameter Mittag-Leffler function, its derivatives, gamma helpers and
//! the Mittag-Leffler waiting-time distribution.
//!
//! `E_{α,β}(z) = Σ_k z^k / Γ(αk + β)` is evaluated on the real line by one of
//! four methods:
//!
//! * power series for positive `z` and for small negative `z`
//!   (`|z|^{1/α} ≤ 4`, where the alternating series loses at most a couple of
//!   digits);
//! * the real-line integral representation
//!   `E_{α,β}(−x) = (1/π) ∫₀^∞ e^{−r} r^{α−β} [r^α sin(πβ) − x sin(π(α−β))]
//!   / (r^{2α} + 2x r^α cos(πα) + x²) dr` for `β < 1 + α`;
//! * the algebraic asymptotic expansion `−Σ_{k≥1} z^{−k}/Γ(β − αk)` once the
//!   exponentially small remainder is below double precision;
//! * Kummer's transformation for `α = 1`.
//!
//! For `α > 1` the poles `t_j = x^{1/α} e^{±ijπ/α}` (odd `j < α`) of the Hankel
//! integrand lie on the principal sheet, and the last two methods are
//! completed by their residues `(2/α) Re[t_j^{1−β} e^{t_j}]`.

use std::f64::consts::PI;

use statrs::function::gamma as sgamma;
use thiserror::Error;

use crate::quad::{integrate_with_breaks, QuadOptions};

/// `|z|^{1/α}` below which the alternating power series is used for `z < 0`.
pub const SERIES_RADIUS: f64 = 4.0;

const MAX_TERMS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PowerSeries,
    IntegralRepresentation,
    Asymptotic,
    Kummer,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::PowerSeries => "power series",
            Method::IntegralRepresentation => "integral representation",
            Method::Asymptotic => "asymptotic expansion",
            Method::Kummer => "Kummer series",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("argument {name} = {value} is outside the domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("{method} failed at z = {z}: {reason}")]
    Evaluation {
        method: Method,
        z: f64,
        reason: String,
    },
}

type Result<T> = std::result::Result<T, SpecialFnError>;

/// Gamma function (Lanczos approximation with reflection for `x < 0.5`).
pub fn gamma(x: f64) -> f64 {
    sgamma::gamma(x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    sgamma::ln_gamma(x)
}

/// `1/Γ(x)`, which is entire: exactly zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

/// Order parameters of `E_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParams {
    alpha: f64,
    beta: f64,
}

impl MlParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(SpecialFnError::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must be finite and positive",
            });
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(SpecialFnError::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must be finite and positive",
            });
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Parameters of the Mittag-Leffler waiting-time law ML(μ, λ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlDistParams {
    mu: f64,
    lambda: f64,
}

impl MlDistParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(SpecialFnError::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "must lie in (0, 1]",
            });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(SpecialFnError::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must be finite and positive",
            });
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// `E_{α,β}(z)` for real `z`.
pub fn ml_eval(params: MlParams, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(SpecialFnError::Domain {
            name: "z",
            value: z,
            reason: "must be finite",
        });
    }
    ml_real(params.alpha, params.beta, z)
}

/// k-th derivative `E^{(k)}_{α,β}(z)` for `k ≤ 4`.
///
/// Uses the term-wise differentiated series wherever the plain series would be
/// used, and otherwise the recursion
/// `αz E^{(k)}_{α,β} = E^{(k−1)}_{α,β−1} − (β − 1 + α(k−1)) E^{(k−1)}_{α,β}`.
pub fn ml_deriv(params: MlParams, z: f64, k: u32) -> Result<f64> {
    if k > 4 {
        return Err(SpecialFnError::InvalidParameter {
            name: "k",
            value: k as f64,
            reason: "derivative order above 4 is not supported",
        });
    }
    if k == 0 {
        return ml_eval(params, z);
    }
    if !z.is_finite() {
        return Err(SpecialFnError::Domain {
            name: "z",
            value: z,
            reason: "must be finite",
        });
    }
    deriv_real(params.alpha, params.beta, z, k)
}

fn deriv_real(a: f64, b: f64, z: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return ml_real(a, b, z);
    }
    if series_preferred(a, z) {
        return series(a, b, z, k);
    }
    let lower = deriv_real(a, b - 1.0, z, k - 1)?;
    let same = deriv_real(a, b, z, k - 1)?;
    Ok((lower - (b - 1.0 + a * (k - 1) as f64) * same) / (a * z))
}

fn series_preferred(a: f64, z: f64) -> bool {
    z >= 0.0 || (a != 1.0 && (-z).powf(1.0 / a) <= SERIES_RADIUS)
}

/// Real-line evaluation for any `α > 0` and any real `β`.
fn ml_real(a: f64, b: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        return Ok(rgamma(b));
    }
    if series_preferred(a, z) {
        return series(a, b, z, 0);
    }
    let x = -z;
    if a == 1.0 {
        return ml_alpha_one(b, x);
    }
    if a.fract() == 0.0 && a % 2.0 == 1.0 {
        return Err(SpecialFnError::Evaluation {
            method: Method::IntegralRepresentation,
            z,
            reason: format!("odd integer α = {a} puts a pole on the branch cut"),
        });
    }
    if asymptotic_regime(a, x) {
        if let Ok(v) = asymptotic(a, b, z) {
            return Ok(v + pole_terms(a, b, x));
        }
    }
    integral_representation(a, b, x)
}

/// `Σ_j (2/α) Re[t_j^{1−β} e^{t_j}]` over `t_j = x^{1/α} e^{ijπ/α}`, odd `j < α`.
fn pole_terms(a: f64, b: f64, x: f64) -> f64 {
    let (ln_r, r) = (x.ln() / a, x.powf(1.0 / a));
    let mut sum = 0.0;
    let mut j = 1.0;
    while j < a {
        let theta = j * PI / a;
        let magnitude = ((1.0 - b) * ln_r + r * theta.cos()).exp();
        sum += 2.0 / a * magnitude * ((1.0 - b) * theta + r * theta.sin()).cos();
        j += 2.0;
    }
    sum
}

/// Σ_m (m+k)!/m! z^m / Γ(α(m+k) + β): the k-th derivative series.
fn series(a: f64, b: f64, z: f64, k: u32) -> Result<f64> {
    let kf = k as f64;
    if z == 0.0 {
        return Ok(rgamma(a * kf + b) * (1..=k).map(f64::from).product::<f64>());
    }
    let lnz = z.abs().ln();
    let mut sum = 0.0_f64;
    let mut max_term = 0.0_f64;
    let mut small_run = 0;
    let mut zpow = 1.0_f64;
    // Terms grow until roughly m ≈ |z|^{1/α}/α; do not stop before that.
    let peak = (z.abs().powf(1.0 / a) / a).min(MAX_TERMS as f64) as usize;
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        if m > 0 {
            zpow *= z;
        }
        let arg = a * (mf + kf) + b;
        let falling: f64 = (1..=k).map(|j| mf + j as f64).product();
        let term = if arg <= 170.0 && zpow.is_finite() && zpow.abs() < 1e300 {
            zpow * falling * rgamma(arg)
        } else {
            let mag = (mf * lnz + falling.ln() - ln_gamma(arg)).exp();
            if z < 0.0 && m % 2 == 1 {
                -mag
            } else {
                mag
            }
        };
        if !term.is_finite() {
            return Err(SpecialFnError::Evaluation {
                method: Method::PowerSeries,
                z,
                reason: "term overflow".into(),
            });
        }
        sum += term;
        max_term = max_term.max(term.abs());
        if m > peak && term.abs() < 1e-16 * sum.abs() {
            small_run += 1;
            if small_run >= 2 {
                if z < 0.0 && max_term * f64::EPSILON > 1e-8 {
                    return Err(SpecialFnError::Evaluation {
                        method: Method::PowerSeries,
                        z,
                        reason: format!(
                            "cancellation: largest term {max_term:e} against sum {sum:e}"
                        ),
                    });
                }
                if !sum.is_finite() {
                    return Err(SpecialFnError::Evaluation {
                        method: Method::PowerSeries,
                        z,
                        reason: "sum overflow".into(),
                    });
                }
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
        if sum == 0.0 && m > peak && term == 0.0 {
            return Ok(0.0);
        }
    }
    Err(SpecialFnError::Evaluation {
        method: Method::PowerSeries,
        z,
        reason: format!("no convergence within {MAX_TERMS} terms"),
    })
}

/// `E_{1,β}(−x)` via `E_{1,β}(−x) = e^{−x} M(β−1, β, x) / Γ(β)`.
fn ml_alpha_one(b: f64, x: f64) -> Result<f64> {
    if b <= 0.0 && b == b.floor() {
        // E_{1,−n}(z) = z^{n+1} e^z.
        let z = -x;
        return Ok(z.powi((1.0 - b) as i32) * z.exp());
    }
    if x > 700.0 {
        return asymptotic(1.0, b, -x);
    }
    let mut t = (-x).exp();
    let mut sum = t;
    let kmax = (x + 40.0 * x.sqrt() + 60.0) as usize;
    for k in 1..=kmax.min(MAX_TERMS) {
        let kf = k as f64;
        t *= x / kf;
        let c = (b - 1.0) / (b - 1.0 + kf);
        sum += c * t;
        if kf > x && t < 1e-17 * sum.abs() {
            return Ok(sum * rgamma(b));
        }
    }
    Err(SpecialFnError::Evaluation {
        method: Method::Kummer,
        z: -x,
        reason: "no convergence".into(),
    })
}

fn asymptotic_regime(a: f64, x: f64) -> bool {
    if x.powf(1.0 / a) < 60.0 {
        return false;
    }
    let ca = (PI * a).cos();
    if ca >= 0.0 {
        return true;
    }
    // With cos(πα) < 0 the integrand has a near-pole at r_p whose
    // contribution, of relative size e^{−r_p}/|sin(πα)|, is dropped by the
    // expansion.
    let rp = (-x * ca).powf(1.0 / a);
    rp >= 45.0 + (1.0 / (PI * a).sin().abs()).ln()
}

/// `−Σ_{k≥1} z^{−k}/Γ(β − αk)`, truncated at the smallest term.
fn asymptotic(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut sum = 0.0_f64;
    let mut zpow = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..=200 {
        zpow /= z;
        let rg = rgamma(b - a * k as f64);
        let term = -zpow * rg;
        if rg == 0.0 {
            continue;
        }
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if term.abs() <= 1e-17 * sum.abs() {
            return Ok(sum);
        }
    }
    if last <= 1e-15 * sum.abs().max(1e-300) || last < 1e-300 || sum == 0.0 {
        return Ok(sum);
    }
    Err(SpecialFnError::Evaluation {
        method: Method::Asymptotic,
        z,
        reason: format!("smallest term {last:e} too large relative to sum {sum:e}"),
    })
}

/// Integral representation for `x > 0` and `α` not an odd integer.
fn integral_representation(a: f64, b: f64, x: f64) -> Result<f64> {
    if b >= 1.0 + a {
        // E_{α,β} = (E_{α,β−α} − 1/Γ(β−α)) / z
        let lower = integral_representation(a, b - a, x)?;
        return Ok((lower - rgamma(b - a)) / (-x));
    }
    let e = a - b;
    let p = 1.0 / (1.0 + e);
    let (sb, sab, ca, sa) = ((PI * b).sin(), (PI * e).sin(), (PI * a).cos(), (PI * a).sin());
    let rp = if ca < 0.0 { (-x * ca).powf(1.0 / a) } else { 0.0 };
    let rmax = rp + 60.0;
    let integrand = |w: f64| {
        let r = w.powf(p);
        if r > rmax + 1.0 {
            return 0.0;
        }
        let ra = r.powf(a);
        // Sum of squares rather than the expanded quadratic, which cancels
        // near the pole when α is close to 1.
        let den = (ra + x * ca).powi(2) + (x * sa).powi(2);
        p * (-r).exp() * (ra * sb - x * sab) / den
    };
    let to_w = |r: f64| r.powf(1.0 + e);
    let mut pts = vec![0.0];
    if rp > 0.0 {
        let width = x * sa.abs() / (a * rp.powf(a - 1.0));
        for r in [rp - 3.0 * width, rp, rp + 3.0 * width] {
            if r > 0.0 && r < rmax {
                pts.push(to_w(r));
            }
        }
    }
    pts.push(to_w(rmax));
    pts.dedup();
    let opts = QuadOptions {
        abs_tol: 1e-18,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    integrate_with_breaks(integrand, &pts, opts)
        .map(|r| r.value / PI + pole_terms(a, b, x))
        .map_err(|err| SpecialFnError::Evaluation {
            method: Method::IntegralRepresentation,
            z: -x,
            reason: err.to_string(),
        })
}

/// Density `λ t^{μ−1} E_{μ,μ}(−λ t^μ)` of ML(μ, λ).
pub fn ml_density(params: MlDistParams, t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(SpecialFnError::Domain {
            name: "t",
            value: t,
            reason: "density is defined for finite t > 0",
        });
    }
    let (mu, lambda) = (params.mu, params.lambda);
    if mu == 1.0 {
        return Ok(lambda * (-lambda * t).exp());
    }
    let x = lambda * t.powf(mu);
    let e = ml_real(mu, mu, -x)?;
    Ok((lambda * t.powf(mu - 1.0) * e).max(0.0))
}

/// Distribution function `1 − E_{μ,1}(−λ t^μ)`, computed as
/// `x E_{μ,μ+1}(−x)` with `x = λ t^μ` to avoid cancellation near `t = 0`.
pub fn ml_cdf(params: MlDistParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(SpecialFnError::Domain {
            name: "t",
            value: t,
            reason: "distribution function is defined for t >= 0",
        });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let (mu, lambda) = (params.mu, params.lambda);
    if mu == 1.0 {
        return Ok(-(-lambda * t).exp_m1());
    }
    let x = lambda * t.powf(mu);
    let e = ml_real(mu, mu + 1.0, -x)?;
    Ok((x * e).clamp(0.0, 1.0))
}
