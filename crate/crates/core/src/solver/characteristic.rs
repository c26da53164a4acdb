//! The characteristic function
//! `∏(α_k − z)^{s_k} ∏(c^{μ_j} z^{μ_j} + λ₂ⱼ) ∏(cz + λ₁ᵢ)^{rᵢ} − Λ ∏ α_k^{s_k}`
//! and its normalized form.
//!
//! Dividing through by `Λ ∏ α^s` gives `P(z) − 1` with
//! `P(z) = ∏(1 − z/α)^s ∏(1 + c^μ z^μ/λ₂) ∏(1 + cz/λ₁)^r`, which has unit
//! scale, vanishes exactly at `z = 0`, and has the log-derivative
//! `P'/P = Σ −s/(α − z) + Σ μ c^μ z^{μ−1}/(c^μ z^μ + λ₂) + Σ r c/(cz + λ₁)`.

use num_complex::Complex64;

use super::SolverError;
use crate::model::ModelSpec;

/// Parameters unpacked once for repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) struct CharEq {
    pub claims: Vec<(f64, f64)>,
    pub gammas: Vec<(f64, f64)>,
    pub mls: Vec<(f64, f64)>,
    pub c: f64,
    /// `Λ ∏ α^s`.
    pub scale: f64,
}

fn cpow(z: Complex64, p: f64) -> Complex64 {
    if p == p.round() && p.abs() < 64.0 {
        z.powi(p as i32)
    } else if z == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        z.powf(p)
    }
}

impl CharEq {
    pub fn new(spec: &ModelSpec) -> Self {
        let claims: Vec<_> = spec.claim_gammas().iter().map(|g| (g.shape, g.rate)).collect();
        let gammas: Vec<_> = spec
            .interarrival_gammas()
            .iter()
            .map(|g| (g.shape, g.rate))
            .collect();
        let mls: Vec<_> = spec.interarrival_mls().iter().map(|m| (m.mu, m.rate)).collect();
        let log_alpha: f64 = claims.iter().map(|(s, a)| s * a.ln()).sum();
        let scale = spec.lambda_product().0 * log_alpha.exp();
        Self {
            claims,
            gammas,
            mls,
            c: spec.premium_rate(),
            scale,
        }
    }

    pub fn max_alpha(&self) -> f64 {
        self.claims.iter().map(|&(_, a)| a).fold(0.0, f64::max)
    }

    /// `P(z)`.
    pub fn p(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for &(s, a) in &self.claims {
            v *= cpow(1.0 - z / a, s);
        }
        for &(mu, l2) in &self.mls {
            v *= 1.0 + cpow(self.c * z, mu) / l2;
        }
        for &(r, l1) in &self.gammas {
            v *= cpow(1.0 + self.c * z / l1, r);
        }
        v
    }

    /// `P'(z)/P(z)`.
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for &(s, a) in &self.claims {
            v -= s / (a - z);
        }
        for &(mu, l2) in &self.mls {
            let czm = cpow(self.c * z, mu);
            v += mu * czm / (z * (czm + l2));
        }
        for &(r, l1) in &self.gammas {
            v += r * self.c / (self.c * z + l1);
        }
        v
    }

    /// `|z P'/P|` relative to the sum of the magnitudes of its terms; close
    /// to 0 only when the terms cancel, i.e. near a multiple root.
    pub fn simplicity(&self, z: Complex64) -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut size = 0.0;
        let mut add = |t: Complex64| {
            sum += t;
            size += t.norm();
        };
        for &(s, a) in &self.claims {
            add(-s * z / (a - z));
        }
        for &(mu, l2) in &self.mls {
            let czm = cpow(self.c * z, mu);
            add(mu * czm / (czm + l2));
        }
        for &(r, l1) in &self.gammas {
            add(r * self.c * z / (self.c * z + l1));
        }
        sum.norm() / size
    }

    /// `P(z) − 1` and its derivative.
    pub fn g_and_dg(&self, z: Complex64) -> (Complex64, Complex64) {
        let p = self.p(z);
        (p - 1.0, p * self.log_derivative(z))
    }

    /// `Δ(z) = ∏(c^μ z^μ + λ₂) ∏(cz + λ₁)^r`.
    pub fn delta(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(1.0, 0.0);
        for &(mu, l2) in &self.mls {
            v *= cpow(self.c * z, mu) + l2;
        }
        for &(r, l1) in &self.gammas {
            v *= cpow(self.c * z + l1, r);
        }
        v
    }

    pub fn lambda(&self) -> f64 {
        let g: f64 = self.gammas.iter().map(|(r, l)| r * l.ln()).sum();
        let m: f64 = self.mls.iter().map(|(_, l)| l.ln()).sum();
        (g + m).exp()
    }
}

/// Value of the characteristic function at `z` (principal branches).
pub fn characteristic_fn(spec: &ModelSpec, z: Complex64) -> Result<Complex64, SolverError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SolverError::Domain { z });
    }
    let eq = CharEq::new(spec);
    if z.re < 0.0 && z.im == 0.0 && !eq.mls.iter().all(|&(mu, _)| mu == 1.0) {
        return Err(SolverError::Domain { z });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(eq.scale * (eq.p(z) - 1.0))
}
