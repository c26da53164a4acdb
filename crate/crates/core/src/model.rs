//! Model definition: the premium rate, the inter-arrival law (a sum of
//! independent gamma and Mittag-Leffler variables) and the claim law (a sum of
//! independent gamma variables), with validation, densities and samplers.
//!
//! The JSON form is
//!
//! ```json
//! {
//!   "premium_rate": 1.2,
//!   "interarrival": {"gammas": [{"shape": 1, "rate": 1}], "mittag_lefflers": []},
//!   "claims": {"gammas": [{"shape": 1, "rate": 1}]}
//! }
//! ```

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;
use thiserror::Error;

use crate::quad::{integrate, QuadError, QuadOptions};
use crate::specialfn::{ln_gamma, ml_cdf, ml_density, MlDistParams, SpecialFnError};

const RATE_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("malformed model spec: {0}")]
    Parse(String),
    #[error("`{field}` must be positive and finite, got {value}")]
    NonPositive { field: String, value: f64 },
    #[error("`{field}` must lie in (0, 1], got {value}")]
    MuOutOfRange { field: String, value: f64 },
    #[error("`{field}` needs at least one component")]
    MissingComponent { field: &'static str },
    #[error(
        "net profit condition c·E[T] > E[X] violated: c·E[T] = {lhs} <= E[X] = {rhs} \
         (premium_rate = {premium_rate}, E[T] = {mean_interarrival})"
    )]
    NetProfit {
        premium_rate: f64,
        mean_interarrival: f64,
        lhs: f64,
        rhs: f64,
    },
    #[error("unknown override key `{0}` (expected one of r, lambda1, mu, lambda2, alpha, s, c)")]
    UnknownOverride(String),
    #[error("override `{key}` has no target: {reason}")]
    OverrideTarget { key: String, reason: &'static str },
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
    #[error("numerical convolution failed: {0}")]
    Convolution(#[from] QuadError),
}

/// Γ(shape, rate) with density `rate^shape x^{shape−1} e^{−rate x} / Γ(shape)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaComponent {
    pub shape: f64,
    pub rate: f64,
}

/// ML(μ, λ) waiting time of a fractional Poisson process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlComponent {
    pub mu: f64,
    pub rate: f64,
}

impl GammaComponent {
    pub fn new(shape: f64, rate: f64) -> Self {
        Self { shape, rate }
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.shape.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => self.rate,
                _ => 0.0,
            };
        }
        let (r, l) = (self.shape, self.rate);
        (r * l.ln() + (r - 1.0) * x.ln() - l * x - ln_gamma(r)).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            gamma_lr(self.shape, self.rate * x)
        }
    }

    fn validate(&self, path: &str) -> Result<(), ModelError> {
        positive(&format!("{path}.shape"), self.shape)?;
        positive(&format!("{path}.rate"), self.rate)
    }
}

impl MlComponent {
    pub fn new(mu: f64, rate: f64) -> Self {
        Self { mu, rate }
    }

    /// Mean waiting time; infinite unless μ = 1.
    pub fn mean(&self) -> f64 {
        if self.mu == 1.0 {
            1.0 / self.rate
        } else {
            f64::INFINITY
        }
    }

    pub fn params(&self) -> MlDistParams {
        MlDistParams::new(self.mu, self.rate).expect("validated component")
    }

    fn validate(&self, path: &str) -> Result<(), ModelError> {
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(ModelError::MuOutOfRange {
                field: format!("{path}.mu"),
                value: self.mu,
            });
        }
        positive(&format!("{path}.rate"), self.rate)
    }
}

fn positive(field: &str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::NonPositive {
            field: field.to_string(),
            value,
        })
    }
}

/// One term of a sum of independent waiting times or claims.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    Gamma(GammaComponent),
    Ml(MlComponent),
}

impl Component {
    pub fn density(&self, x: f64) -> Result<f64, ModelError> {
        match self {
            Component::Gamma(g) => Ok(g.density(x)),
            Component::Ml(m) => {
                if x <= 0.0 {
                    return Ok(if x == 0.0 && m.mu < 1.0 { f64::INFINITY } else if x == 0.0 { m.rate } else { 0.0 });
                }
                Ok(ml_density(m.params(), x)?)
            }
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64, ModelError> {
        match self {
            Component::Gamma(g) => Ok(g.cdf(x)),
            Component::Ml(m) => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                Ok(ml_cdf(m.params(), x)?)
            }
        }
    }

    /// Sum of the shape (or μ) parameters: the density behaves like
    /// `x^{order−1}` at the origin.
    pub fn order(&self) -> f64 {
        match self {
            Component::Gamma(g) => g.shape,
            Component::Ml(m) => m.mu,
        }
    }
}

const CONV_OPTS: QuadOptions = QuadOptions {
    abs_tol: 1e-14,
    rel_tol: 1e-11,
    max_intervals: 2000,
};

/// Density at `x` of the sum of independent components, by nested quadrature
/// of the convolution integral.
pub fn sum_density(components: &[Component], x: f64) -> Result<f64, ModelError> {
    match components {
        [] => Ok(0.0),
        [c] => c.density(x),
        [rest @ .., last] => {
            if x <= 0.0 {
                return Ok(0.0);
            }
            let mut failure = None;
            let mut f = |y: f64| match (sum_density(rest, x - y), last.density(y)) {
                (Ok(a), Ok(b)) => a * b,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            // Split so both possible endpoint singularities sit at a panel edge.
            let half = 0.5 * x;
            let v = integrate(&mut f, 0.0, half, CONV_OPTS)?.value
                + integrate(&mut f, half, x, CONV_OPTS)?.value;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(v)
        }
    }
}

/// Distribution function at `x` of the sum of independent components:
/// `F(x) = ∫₀ˣ F_rest(x − y) f_last(y) dy`.
pub fn sum_cdf(components: &[Component], x: f64) -> Result<f64, ModelError> {
    match components {
        [] => Ok(1.0),
        [c] => c.cdf(x),
        [rest @ .., last] => {
            if x <= 0.0 {
                return Ok(0.0);
            }
            let mut failure = None;
            let mut f = |y: f64| match (sum_cdf(rest, x - y), last.density(y)) {
                (Ok(a), Ok(b)) => a * b,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            let half = 0.5 * x;
            let v = integrate(&mut f, 0.0, half, CONV_OPTS)?.value
                + integrate(&mut f, half, x, CONV_OPTS)?.value;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(v.clamp(0.0, 1.0))
        }
    }
}

/// Unvalidated JSON form of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModelSpec {
    pub premium_rate: f64,
    pub interarrival: RawInterarrival,
    pub claims: RawClaims,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInterarrival {
    #[serde(default)]
    pub gammas: Vec<GammaComponent>,
    #[serde(default)]
    pub mittag_lefflers: Vec<MlComponent>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawClaims {
    #[serde(default)]
    pub gammas: Vec<GammaComponent>,
}

impl RawModelSpec {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    /// Sets one scalar parameter by its short name:
    ///
    /// | key | target |
    /// |-----|--------|
    /// | `r` | `interarrival.gammas[0].shape` |
    /// | `lambda1` | `interarrival.gammas[0].rate` |
    /// | `mu` | `interarrival.mittag_lefflers[0].mu` |
    /// | `lambda2` | `interarrival.mittag_lefflers[0].rate` |
    /// | `s` | `claims.gammas[0].shape` |
    /// | `alpha` | `claims.gammas[0].rate` |
    /// | `c` | `premium_rate` |
    pub fn apply_override(&mut self, key: &str, value: f64) -> Result<(), ModelError> {
        let missing = |reason| ModelError::OverrideTarget {
            key: key.to_string(),
            reason,
        };
        match key {
            "c" => self.premium_rate = value,
            "r" | "lambda1" => {
                let g = self
                    .interarrival
                    .gammas
                    .first_mut()
                    .ok_or_else(|| missing("no gamma inter-arrival component"))?;
                if key == "r" {
                    g.shape = value;
                } else {
                    g.rate = value;
                }
            }
            "mu" | "lambda2" => {
                let m = self
                    .interarrival
                    .mittag_lefflers
                    .first_mut()
                    .ok_or_else(|| missing("no Mittag-Leffler inter-arrival component"))?;
                if key == "mu" {
                    m.mu = value;
                } else {
                    m.rate = value;
                }
            }
            "s" | "alpha" => {
                let g = self
                    .claims
                    .gammas
                    .first_mut()
                    .ok_or_else(|| missing("no claim component"))?;
                if key == "s" {
                    g.shape = value;
                } else {
                    g.rate = value;
                }
            }
            other => return Err(ModelError::UnknownOverride(other.to_string())),
        }
        Ok(())
    }
}

/// `Λ = ∏ λ₁ᵢ^{rᵢ} ∏ λ₂ⱼ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaProduct(pub f64);

/// A validated model. Inter-arrival gamma rates are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelSpec", into = "RawModelSpec")]
pub struct ModelSpec {
    interarrival_gammas: Vec<GammaComponent>,
    interarrival_mls: Vec<MlComponent>,
    claim_gammas: Vec<GammaComponent>,
    premium_rate: f64,
}

impl TryFrom<RawModelSpec> for ModelSpec {
    type Error = ModelError;

    fn try_from(raw: RawModelSpec) -> Result<Self, ModelError> {
        validate(&raw)
    }
}

impl From<ModelSpec> for RawModelSpec {
    fn from(spec: ModelSpec) -> Self {
        spec.to_raw()
    }
}

/// Checks a raw spec and merges gamma inter-arrival components of equal rate
/// (their sum is again gamma with the shapes added).
pub fn validate(raw: &RawModelSpec) -> Result<ModelSpec, ModelError> {
    positive("premium_rate", raw.premium_rate)?;
    if raw.interarrival.gammas.is_empty() && raw.interarrival.mittag_lefflers.is_empty() {
        return Err(ModelError::MissingComponent {
            field: "interarrival",
        });
    }
    if raw.claims.gammas.is_empty() {
        return Err(ModelError::MissingComponent { field: "claims" });
    }
    for (i, g) in raw.interarrival.gammas.iter().enumerate() {
        g.validate(&format!("interarrival.gammas[{i}]"))?;
    }
    for (i, m) in raw.interarrival.mittag_lefflers.iter().enumerate() {
        m.validate(&format!("interarrival.mittag_lefflers[{i}]"))?;
    }
    for (i, g) in raw.claims.gammas.iter().enumerate() {
        g.validate(&format!("claims.gammas[{i}]"))?;
    }

    let mut merged: Vec<GammaComponent> = Vec::new();
    for g in &raw.interarrival.gammas {
        match merged
            .iter_mut()
            .find(|m| (m.rate - g.rate).abs() <= RATE_MERGE_TOL * m.rate.max(g.rate))
        {
            Some(m) => m.shape += g.shape,
            None => merged.push(*g),
        }
    }

    let spec = ModelSpec {
        interarrival_gammas: merged,
        interarrival_mls: raw.interarrival.mittag_lefflers.clone(),
        claim_gammas: raw.claims.gammas.clone(),
        premium_rate: raw.premium_rate,
    };
    if let Some(et) = spec.mean_interarrival() {
        let lhs = spec.premium_rate * et;
        let rhs = spec.mean_claim();
        if lhs <= rhs {
            return Err(ModelError::NetProfit {
                premium_rate: spec.premium_rate,
                mean_interarrival: et,
                lhs,
                rhs,
            });
        }
    }
    Ok(spec)
}

impl ModelSpec {
    pub fn new(
        interarrival_gammas: Vec<GammaComponent>,
        interarrival_mls: Vec<MlComponent>,
        claim_gammas: Vec<GammaComponent>,
        premium_rate: f64,
    ) -> Result<Self, ModelError> {
        validate(&RawModelSpec {
            premium_rate,
            interarrival: RawInterarrival {
                gammas: interarrival_gammas,
                mittag_lefflers: interarrival_mls,
            },
            claims: RawClaims {
                gammas: claim_gammas,
            },
        })
    }

    /// Γ(r, λ₁) waiting times with Exp(α) claims.
    pub fn gamma_exponential(r: f64, lambda1: f64, alpha: f64, c: f64) -> Result<Self, ModelError> {
        Self::new(
            vec![GammaComponent::new(r, lambda1)],
            vec![],
            vec![GammaComponent::new(1.0, alpha)],
            c,
        )
    }

    /// ML(μ, λ₂) waiting times with Exp(α) claims.
    pub fn ml_exponential(mu: f64, lambda2: f64, alpha: f64, c: f64) -> Result<Self, ModelError> {
        Self::new(
            vec![],
            vec![MlComponent::new(mu, lambda2)],
            vec![GammaComponent::new(1.0, alpha)],
            c,
        )
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        validate(&RawModelSpec::from_json(text)?)
    }

    pub fn to_raw(&self) -> RawModelSpec {
        RawModelSpec {
            premium_rate: self.premium_rate,
            interarrival: RawInterarrival {
                gammas: self.interarrival_gammas.clone(),
                mittag_lefflers: self.interarrival_mls.clone(),
            },
            claims: RawClaims {
                gammas: self.claim_gammas.clone(),
            },
        }
    }

    pub fn premium_rate(&self) -> f64 {
        self.premium_rate
    }

    pub fn interarrival_gammas(&self) -> &[GammaComponent] {
        &self.interarrival_gammas
    }

    pub fn interarrival_mls(&self) -> &[MlComponent] {
        &self.interarrival_mls
    }

    pub fn claim_gammas(&self) -> &[GammaComponent] {
        &self.claim_gammas
    }

    pub fn interarrival_components(&self) -> Vec<Component> {
        self.interarrival_gammas
            .iter()
            .map(|g| Component::Gamma(*g))
            .chain(self.interarrival_mls.iter().map(|m| Component::Ml(*m)))
            .collect()
    }

    pub fn claim_components(&self) -> Vec<Component> {
        self.claim_gammas.iter().map(|g| Component::Gamma(*g)).collect()
    }

    /// `E[T]`, or `None` when a Mittag-Leffler component with μ < 1 makes it
    /// infinite.
    pub fn mean_interarrival(&self) -> Option<f64> {
        let mut m: f64 = self.interarrival_gammas.iter().map(GammaComponent::mean).sum();
        for ml in &self.interarrival_mls {
            m += ml.mean();
        }
        m.is_finite().then_some(m)
    }

    pub fn mean_claim(&self) -> f64 {
        self.claim_gammas.iter().map(GammaComponent::mean).sum()
    }

    pub fn lambda_product(&self) -> LambdaProduct {
        let g: f64 = self
            .interarrival_gammas
            .iter()
            .map(|g| g.shape * g.rate.ln())
            .sum();
        let m: f64 = self.interarrival_mls.iter().map(|m| m.rate.ln()).sum();
        LambdaProduct((g + m).exp())
    }

    /// Claim shapes as integers, if they all are.
    pub fn integer_claim_shapes(&self) -> Option<Vec<u32>> {
        self.claim_gammas
            .iter()
            .map(|g| {
                let s = g.shape.round();
                (g.shape == s && s >= 1.0 && s < u32::MAX as f64).then_some(s as u32)
            })
            .collect()
    }

    pub fn interarrival_density(&self, t: f64) -> Result<f64, ModelError> {
        sum_density(&self.interarrival_components(), t)
    }

    pub fn claim_density(&self, y: f64) -> Result<f64, ModelError> {
        sum_density(&self.claim_components(), y)
    }

    /// Claim distribution function. Single components use the regularized
    /// incomplete gamma function; sums use adaptive quadrature of the
    /// convolution at relative tolerance 1e-11.
    pub fn claim_cdf(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match sum_cdf(&self.claim_components(), y) {
            Ok(v) => v,
            Err(ModelError::Convolution(QuadError::NoConvergence { value, .. })) => value.clamp(0.0, 1.0),
            Err(_) => f64::NAN,
        }
    }
}

/// Draws from ML(μ, λ): `T = −λ^{−1/μ} ln U · [sin(μπ)/tan(μπV) − cos(μπ)]^{1/μ}`,
/// with the bracket evaluated as `sin(μπ(1−V)) / sin(μπV)`.
pub fn sample_ml<R: Rng + ?Sized>(mu: f64, lambda: f64, rng: &mut R) -> f64 {
    let u = 1.0 - rng.random::<f64>();
    if mu == 1.0 {
        return -u.ln() / lambda;
    }
    let v = loop {
        let v = rng.random::<f64>();
        if v > 0.0 {
            break v;
        }
    };
    let ratio = (mu * PI * (1.0 - v)).sin() / (mu * PI * v).sin();
    -u.ln() * (ratio / lambda).powf(1.0 / mu)
}

/// Samplers prebuilt from a validated spec. Draws consume the supplied stream
/// in a fixed order: inter-arrival gamma components, then Mittag-Leffler
/// components; claims in component order.
#[derive(Debug, Clone)]
pub struct ModelSampler {
    interarrival_gammas: Vec<Gamma<f64>>,
    interarrival_mls: Vec<MlComponent>,
    claim_gammas: Vec<Gamma<f64>>,
}

impl ModelSampler {
    pub fn new(spec: &ModelSpec) -> Self {
        let build = |g: &GammaComponent| Gamma::new(g.shape, 1.0 / g.rate).expect("validated gamma");
        Self {
            interarrival_gammas: spec.interarrival_gammas.iter().map(build).collect(),
            interarrival_mls: spec.interarrival_mls.clone(),
            claim_gammas: spec.claim_gammas.iter().map(build).collect(),
        }
    }

    pub fn sample_interarrival<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut t = 0.0;
        for g in &self.interarrival_gammas {
            t += g.sample(rng);
        }
        for m in &self.interarrival_mls {
            t += sample_ml(m.mu, m.rate, rng);
        }
        t
    }

    pub fn sample_claim<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.claim_gammas.iter().map(|g| g.sample(rng)).sum()
    }
}

pub fn sample_interarrival<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> f64 {
    ModelSampler::new(spec).sample_interarrival(rng)
}

pub fn sample_claim<R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> f64 {
    ModelSampler::new(spec).sample_claim(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::path_stream;

    fn classical() -> RawModelSpec {
        RawModelSpec::from_json(
            r#"{"premium_rate": 1.2,
                "interarrival": {"gammas": [{"shape": 1, "rate": 1}]},
                "claims": {"gammas": [{"shape": 1, "rate": 1}]}}"#,
        )
        .unwrap()
    }

    #[test]
    fn accepts_classical_and_rejects_low_premium() {
        assert!(validate(&classical()).is_ok());
        let mut raw = classical();
        raw.premium_rate = 0.9;
        let err = validate(&raw).unwrap_err();
        match &err {
            ModelError::NetProfit { lhs, rhs, .. } => {
                assert!((lhs - 0.9).abs() < 1e-15 && (rhs - 1.0).abs() < 1e-15)
            }
            e => panic!("unexpected {e:?}"),
        }
        assert!(err.to_string().contains("c·E[T] > E[X]"));
    }

    #[test]
    fn merges_equal_rates() {
        let spec = ModelSpec::new(
            vec![GammaComponent::new(0.5, 2.0), GammaComponent::new(1.5, 2.0)],
            vec![],
            vec![GammaComponent::new(1.0, 1.0)],
            1.2,
        )
        .unwrap();
        assert_eq!(spec.interarrival_gammas(), &[GammaComponent::new(2.0, 2.0)]);
        let again = validate(&spec.to_raw()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn field_names_in_errors() {
        let mut raw = classical();
        raw.claims.gammas[0].rate = -1.0;
        let msg = validate(&raw).unwrap_err().to_string();
        assert!(msg.contains("claims.gammas[0].rate"), "{msg}");
        let bad = r#"{"premium_rate": 1.2, "interarrival": {"gammas": []}, "claims": {"gammas": [{"shape":1,"rate":1}]}, "extra": 1}"#;
        assert!(matches!(RawModelSpec::from_json(bad), Err(ModelError::Parse(_))));
    }

    #[test]
    fn infinite_mean_skips_net_profit() {
        assert!(ModelSpec::ml_exponential(0.5, 1.0, 1.0, 0.01).is_ok());
        assert!(ModelSpec::ml_exponential(1.0, 1.0, 1.0, 0.9).is_err());
        assert!(ModelSpec::ml_exponential(1.2, 1.0, 1.0, 1.2).is_err());
    }

    #[test]
    fn overrides() {
        let mut raw = classical();
        raw.apply_override("lambda1", 2.0).unwrap();
        raw.apply_override("c", 3.0).unwrap();
        assert_eq!(raw.interarrival.gammas[0].rate, 2.0);
        assert_eq!(raw.premium_rate, 3.0);
        assert!(raw.apply_override("mu", 0.5).is_err());
        assert!(raw.apply_override("zeta", 0.5).is_err());
    }

    #[test]
    fn claim_cdf_cases() {
        let spec = validate(&classical()).unwrap();
        assert!((spec.claim_cdf(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
        let erl = ModelSpec::new(
            vec![GammaComponent::new(1.0, 1.0)],
            vec![],
            vec![GammaComponent::new(2.0, 3.0)],
            10.0,
        )
        .unwrap();
        assert_eq!(erl.claim_cdf(0.0), 0.0);
        let hypo = ModelSpec::new(
            vec![GammaComponent::new(1.0, 1.0)],
            vec![],
            vec![GammaComponent::new(1.0, 1.0), GammaComponent::new(1.0, 2.0)],
            10.0,
        )
        .unwrap();
        let e1 = (-1.0f64).exp();
        let want = 1.0 - 2.0 * e1 + e1 * e1;
        assert!((hypo.claim_cdf(1.0) - want).abs() < 1e-10);
    }

    #[test]
    fn lambda_product() {
        let spec = ModelSpec::new(
            vec![GammaComponent::new(2.0, 3.0)],
            vec![MlComponent::new(0.5, 5.0)],
            vec![GammaComponent::new(1.0, 1.0)],
            1.0,
        )
        .unwrap();
        assert!((spec.lambda_product().0 - 45.0).abs() < 1e-12);
    }

    #[test]
    fn draws_are_reproducible() {
        let spec = ModelSpec::ml_exponential(0.7, 1.0, 1.0, 1.2).unwrap();
        let s = ModelSampler::new(&spec);
        let mut a = path_stream(7, 3);
        let mut b = path_stream(7, 3);
        for _ in 0..100 {
            assert_eq!(s.sample_interarrival(&mut a), s.sample_interarrival(&mut b));
            assert_eq!(s.sample_claim(&mut a), s.sample_claim(&mut b));
        }
    }
}
