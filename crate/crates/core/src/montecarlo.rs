//! Simulation estimates of ruin probabilities, fractional Poisson moments and
//! the renewal-equation residual of analytic solutions.
//!
//! Paths follow the embedded random walk `S_k = Σ_{i≤k} (c T_i − X_i)`; ruin
//! from capital `u` happens iff `u + S_k < 0` for some `k`, so one walk and its
//! running minimum serve every `u` at once.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{sample_ml, ModelSampler, ModelSpec};
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::rng::path_stream;
use crate::solver::{capital_for_level, solve, RuinSolution, SolverError};
use crate::specialfn::gamma;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("evaluation failed at u = {u}: {reason}")]
    Evaluation { u: f64, reason: String },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Truncation {
    /// Stop after this many claims.
    ClaimCount(u64),
    /// Ignore claims after this time.
    TimeHorizon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub paths: u64,
    pub truncation: Truncation,
    pub seed: u64,
    /// Without an analytic solution, a path counts as survived once its
    /// surplus exceeds `u + survival_margin · E[X]`.
    pub survival_margin: f64,
}

impl SimConfig {
    pub fn new(paths: u64, truncation: Truncation, seed: u64) -> Result<Self, MonteCarloError> {
        if paths == 0 {
            return Err(MonteCarloError::InvalidArgument {
                name: "paths",
                value: 0.0,
                reason: "need at least one path",
            });
        }
        match truncation {
            Truncation::ClaimCount(0) => {
                return Err(MonteCarloError::InvalidArgument {
                    name: "max_claims_per_path",
                    value: 0.0,
                    reason: "must be positive",
                })
            }
            Truncation::TimeHorizon(h) if !(h.is_finite() && h > 0.0) => {
                return Err(MonteCarloError::InvalidArgument {
                    name: "horizon",
                    value: h,
                    reason: "must be positive and finite",
                })
            }
            _ => {}
        }
        Ok(Self {
            paths,
            truncation,
            seed,
            survival_margin: 50.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McEstimate {
    pub u: f64,
    pub p_hat: f64,
    /// Normal-approximation 95% half width; 0 when `p_hat` is 0 or 1, where
    /// only the Wilson bounds are meaningful.
    pub ci_half_width: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub paths_run: u64,
    pub ruined_paths: u64,
    /// Paths that hit the truncation neither ruined nor past the survival
    /// level. They count as survivors, so `p_hat` is then a lower bound.
    pub truncated_paths: u64,
    pub lower_bound: bool,
    pub warning: Option<String>,
    pub seed: u64,
    pub model: ModelSpec,
}

impl McEstimate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }

    /// Whether `value` lies within `k` half widths (or the Wilson interval at
    /// the extremes).
    pub fn covers(&self, value: f64, k: f64) -> bool {
        if self.ci_half_width == 0.0 {
            value >= self.ci_lower - 1e-15 && value <= self.ci_upper + 1e-15
        } else {
            (value - self.p_hat).abs() <= k * self.ci_half_width
        }
    }
}

fn wilson(successes: u64, n: u64) -> (f64, f64) {
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Result of one simulated walk.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PathOutcome {
    /// Running minimum of `S_k` over the simulated claims.
    min: f64,
    /// The walk stopped at the truncation rather than by an exit rule.
    truncated: bool,
}

struct Walker<'a> {
    spec: &'a ModelSpec,
    sampler: ModelSampler,
    config: &'a SimConfig,
    /// Stop as survived once `S ≥ exit_high`.
    exit_high: f64,
    /// Stop as ruined for every `u` once `S < exit_low`.
    exit_low: f64,
}

impl Walker<'_> {
    fn walk(&self, path: u64) -> PathOutcome {
        let mut rng = path_stream(self.config.seed, path);
        let c = self.spec.premium_rate();
        let (mut s, mut min, mut time, mut k) = (0.0f64, 0.0f64, 0.0f64, 0u64);
        loop {
            if s >= self.exit_high || min < self.exit_low {
                return PathOutcome { min, truncated: false };
            }
            if let Truncation::ClaimCount(m) = self.config.truncation {
                if k >= m {
                    return PathOutcome { min, truncated: true };
                }
            }
            let t = self.sampler.sample_interarrival(&mut rng);
            time += t;
            if let Truncation::TimeHorizon(h) = self.config.truncation {
                if time > h {
                    return PathOutcome { min, truncated: true };
                }
            }
            s += c * t - self.sampler.sample_claim(&mut rng);
            min = min.min(s);
            k += 1;
        }
    }
}

fn survival_exit(spec: &ModelSpec, u_min: f64, margin: f64) -> f64 {
    if let Ok(sol) = solve(spec) {
        if let Ok(v) = capital_for_level(&sol, 1e-12) {
            return v - u_min;
        }
    }
    margin * spec.mean_claim()
}

fn check_us(us: &[f64]) -> Result<(), MonteCarloError> {
    if us.is_empty() {
        return Err(MonteCarloError::InvalidArgument {
            name: "u",
            value: 0.0,
            reason: "need at least one capital level",
        });
    }
    if let Some(&u) = us.iter().find(|u| !(u.is_finite() && **u >= 0.0)) {
        return Err(MonteCarloError::InvalidArgument {
            name: "u",
            value: u,
            reason: "must be finite and non-negative",
        });
    }
    Ok(())
}

fn walker<'a>(spec: &'a ModelSpec, us: &[f64], config: &'a SimConfig) -> Walker<'a> {
    let u_min = us.iter().copied().fold(f64::INFINITY, f64::min);
    let u_max = us.iter().copied().fold(0.0, f64::max);
    Walker {
        spec,
        sampler: ModelSampler::new(spec),
        config,
        exit_high: survival_exit(spec, u_min, config.survival_margin),
        exit_low: -u_max,
    }
}

/// Ruin indicators of a single path for each capital in `us`.
pub fn path_ruin_indicators(spec: &ModelSpec, us: &[f64], config: &SimConfig, path: u64) -> Result<Vec<bool>, MonteCarloError> {
    check_us(us)?;
    let out = walker(spec, us, config).walk(path);
    Ok(us.iter().map(|&u| u + out.min < 0.0).collect())
}

/// Estimates `ψ(u)` for every `u` in `us` from the same set of paths.
pub fn estimate_ruin_curve(spec: &ModelSpec, us: &[f64], config: &SimConfig) -> Result<Vec<McEstimate>, MonteCarloError> {
    check_us(us)?;
    let w = walker(spec, us, config);
    let m = us.len();
    let (ruined, truncated) = (0..config.paths)
        .into_par_iter()
        .fold(
            || (vec![0u64; m], vec![0u64; m]),
            |(mut ruined, mut truncated), path| {
                let out = w.walk(path);
                for (j, &u) in us.iter().enumerate() {
                    if u + out.min < 0.0 {
                        ruined[j] += 1;
                    } else if out.truncated {
                        truncated[j] += 1;
                    }
                }
                (ruined, truncated)
            },
        )
        .reduce(
            || (vec![0u64; m], vec![0u64; m]),
            |(mut a, mut b), (c, d)| {
                for j in 0..m {
                    a[j] += c[j];
                    b[j] += d[j];
                }
                (a, b)
            },
        );
    let n = config.paths;
    Ok(us
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            let p = ruined[j] as f64 / n as f64;
            let (lo, hi) = wilson(ruined[j], n);
            let (half, lo, hi) = if ruined[j] == 0 || ruined[j] == n {
                (0.0, lo, hi)
            } else {
                let half = Z95 * (p * (1.0 - p) / n as f64).sqrt();
                (half, (p - half).max(0.0), (p + half).min(1.0))
            };
            let frac = truncated[j] as f64 / n as f64;
            let warning = (frac > 0.1).then(|| {
                format!("{:.1}% of paths were truncated; the estimate is a lower bound", 100.0 * frac)
            });
            McEstimate {
                u,
                p_hat: p,
                ci_half_width: half,
                ci_lower: lo,
                ci_upper: hi,
                paths_run: n,
                ruined_paths: ruined[j],
                truncated_paths: truncated[j],
                lower_bound: truncated[j] > 0,
                warning,
                seed: config.seed,
                model: spec.clone(),
            }
        })
        .collect())
}

pub fn estimate_ruin(spec: &ModelSpec, u: f64, config: &SimConfig) -> Result<McEstimate, MonteCarloError> {
    Ok(estimate_ruin_curve(spec, &[u], config)?.remove(0))
}

/// `E N_μ(t) = λ t^μ / Γ(μ+1)`.
pub fn fractional_poisson_mean(mu: f64, lambda: f64, t: f64) -> f64 {
    lambda * t.powf(mu) / gamma(mu + 1.0)
}

/// `Var N_μ(t) = 2(λt^μ)²/Γ(2μ+1) − (λt^μ)²/Γ(μ+1)² + λt^μ/Γ(μ+1)`.
pub fn fractional_poisson_variance(mu: f64, lambda: f64, t: f64) -> f64 {
    let a = lambda * t.powf(mu);
    2.0 * a * a / gamma(2.0 * mu + 1.0) - (a / gamma(mu + 1.0)).powi(2) + a / gamma(mu + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoissonMoments {
    pub mean: f64,
    /// Standard error of `mean`.
    pub mean_se: f64,
    pub variance: f64,
    /// Standard error of `variance` from the fourth central moment.
    pub variance_se: f64,
    pub paths: u64,
}

/// Empirical mean and variance of `N_μ(t)`, counting Mittag-Leffler
/// inter-arrivals until their sum exceeds `t`.
pub fn fractional_poisson_moments(mu: f64, lambda: f64, t: f64, paths: u64, seed: u64) -> Result<PoissonMoments, MonteCarloError> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(MonteCarloError::InvalidArgument {
            name: "mu",
            value: mu,
            reason: "must lie in (0, 1]",
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(MonteCarloError::InvalidArgument {
            name: "lambda",
            value: lambda,
            reason: "must be positive",
        });
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(MonteCarloError::InvalidArgument {
            name: "t",
            value: t,
            reason: "must be positive",
        });
    }
    if paths < 2 {
        return Err(MonteCarloError::InvalidArgument {
            name: "paths",
            value: paths as f64,
            reason: "need at least two paths",
        });
    }
    let counts: Vec<u64> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = path_stream(seed, p);
            let (mut s, mut n) = (0.0, 0u64);
            loop {
                s += sample_ml(mu, lambda, &mut rng);
                if s > t {
                    return n;
                }
                n += 1;
            }
        })
        .collect();
    let np = paths as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / np;
    let m = |k: i32| counts.iter().map(|&c| (c as f64 - mean).powi(k)).sum::<f64>() / np;
    let (m2, m4) = (m(2), m(4));
    let variance = m2 * np / (np - 1.0);
    Ok(PoissonMoments {
        mean,
        mean_se: (variance / np).sqrt(),
        variance,
        variance_se: ((m4 - m2 * m2).max(0.0) / np).sqrt(),
        paths,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenewalResidual {
    /// `(u, ψ(u), right-hand side)` per capital level.
    pub points: Vec<(f64, f64, f64)>,
    pub max_abs: f64,
}

const RENEWAL_OPTS: QuadOptions = QuadOptions {
    abs_tol: 1e-12,
    rel_tol: 1e-10,
    max_intervals: 2000,
};

/// Evaluates the renewal equation
/// `ψ(u) = ∫ f_T(t) [∫₀^{u+ct} ψ(u+ct−y) f_X(y) dy + 1 − F_X(u+ct)] dt`
/// with nested quadrature and reports `max |ψ(u) − RHS|` over `us`.
pub fn renewal_equation_residual(spec: &ModelSpec, solution: &RuinSolution, us: &[f64]) -> Result<RenewalResidual, MonteCarloError> {
    check_us(us)?;
    let c = spec.premium_rate();
    let psi = |v: f64| solution.psi_raw(v);
    let mut points = Vec::with_capacity(us.len());
    for &u in us {
        let fail = |reason: String| MonteCarloError::Evaluation { u, reason };
        let mut failure: Option<String> = None;
        let mut outer = |t: f64| {
            let ft = match spec.interarrival_density(t) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e.to_string());
                    return 0.0;
                }
            };
            if ft == 0.0 || !ft.is_finite() {
                return 0.0;
            }
            let w = u + c * t;
            let mut inner_fail = None;
            let inner = integrate(
                |y| match spec.claim_density(y) {
                    Ok(f) => psi(w - y) * f,
                    Err(e) => {
                        inner_fail.get_or_insert(e.to_string());
                        0.0
                    }
                },
                0.0,
                w,
                RENEWAL_OPTS,
            );
            match (inner, inner_fail) {
                (Ok(r), None) => ft * (r.value + 1.0 - spec.claim_cdf(w)),
                (Err(e), _) => {
                    failure.get_or_insert(e.to_string());
                    0.0
                }
                (_, Some(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        let head = integrate(&mut outer, 0.0, 1.0, RENEWAL_OPTS).map_err(|e| fail(e.to_string()))?;
        let tail = integrate_to_infinity(&mut outer, 1.0, RENEWAL_OPTS).map_err(|e| fail(e.to_string()))?;
        if let Some(e) = failure {
            return Err(fail(e));
        }
        points.push((u, psi(u), head.value + tail.value));
    }
    let max_abs = points.iter().map(|(_, a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(RenewalResidual { points, max_abs })
}
