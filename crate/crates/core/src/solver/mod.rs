//! Characteristic-equation solution of the ruin probability.
//!
//! With integer claim shapes `s_k` and `N = Σ s_k`, the non-ruin probability is
//! `φ(u) = 1 + Σ_{p=1}^{N} K_p e^{−z_p u}` where `z_p` are the roots with
//! positive real part of the characteristic equation
//! (see [`characteristic_fn`]) and `K_p` solve a linear system built from the
//! boundary conditions ([`solve_coefficients`]). The ruin probability is
//! `ψ = 1 − φ`.

mod capital;
mod characteristic;
mod closed_form;
mod coefficients;
mod roots;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LambdaProduct, ModelError, ModelSpec};

pub use capital::{capital_for_level, u5, u5_grid, GridAxis, GridCell, U5Grid};
pub use characteristic::characteristic_fn;
pub use closed_form::{
    example1_psi, example1_root, example2_bracketing, example2_psi, example2_roots, example3_psi,
    example3_residual, example3_root, lundberg_check, psi_zero_at_origin, psi_zero_limit,
    LundbergReport, PsiZero,
};
pub use coefficients::{solve_coefficients, CONDITION_WARNING};
pub use roots::{find_roots, DEFAULT_ROOT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("z = {z} lies on the branch cut of the characteristic function")]
    Domain { z: Complex64 },
    #[error("expected {expected} roots with positive real part, found {}: {found:?}", found.len())]
    RootCount {
        expected: usize,
        found: Vec<Complex64>,
    },
    #[error("repeated root near z = {z}; only distinct roots are supported")]
    RepeatedRoot { z: Complex64 },
    #[error("coefficient system is singular")]
    SingularSystem,
    #[error("φ(0) = {phi0} outside [0, 1]; the root set is inconsistent")]
    PostCheck { phi0: Complex64 },
    #[error("imaginary residue {imag:e} at u = {u} exceeds 1e-10; roots are not conjugate-closed")]
    ConjugatePairing { u: f64, imag: f64 },
    #[error("unclamped ruin probability {psi} at u = {u} is outside [0, 1] by more than 1e-8")]
    SanityBand { u: f64, psi: f64 },
    #[error("argument {name} = {value} is outside the domain")]
    Argument { name: &'static str, value: f64 },
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("root ordering check failed: {0}")]
    Bracketing(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub(crate) mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Repr {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Repr { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let r = Repr::deserialize(d)?;
        Ok(Complex64::new(r.re, r.im))
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(|z| Repr { re: z.re, im: z.im })
                .collect::<Vec<_>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
            Ok(Vec::<Repr>::deserialize(d)?
                .into_iter()
                .map(|r| Complex64::new(r.re, r.im))
                .collect())
        }
    }
}

/// A root of the characteristic equation with `Re z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharRoot {
    #[serde(with = "complex_serde")]
    pub z: Complex64,
    /// `|characteristic_fn(z)|`.
    pub residual: f64,
    pub is_conjugate_pair_member: bool,
}

/// Roots, coefficients and the model they solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuinSolution {
    pub model: ModelSpec,
    pub lambda_product: LambdaProduct,
    pub roots: Vec<CharRoot>,
    #[serde(with = "complex_serde::vec")]
    pub coefficients: Vec<Complex64>,
    #[serde(with = "complex_serde::vec")]
    pub delta: Vec<Complex64>,
    pub condition_number: f64,
    pub warnings: Vec<String>,
}

/// Root finding followed by the coefficient solve.
pub fn solve(spec: &ModelSpec) -> Result<RuinSolution, SolverError> {
    let roots = find_roots(spec, DEFAULT_ROOT_TOL)?;
    solve_coefficients(spec, &roots)
}

impl RuinSolution {
    /// `Σ K_p e^{−z_p u}`; equals `−ψ(u)`.
    pub fn exponential_sum(&self, u: f64) -> Complex64 {
        self.roots
            .iter()
            .zip(&self.coefficients)
            .map(|(r, k)| k * (-r.z * u).exp())
            .sum()
    }

    /// `ψ(u)` without the imaginary-part check or clamping.
    pub fn psi_raw(&self, u: f64) -> f64 {
        -self.exponential_sum(u).re
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }
}

/// Ruin probability `ψ(u)`, clamped to `[0, 1]` after the sanity checks.
pub fn eval_ruin(solution: &RuinSolution, u: f64) -> Result<f64, SolverError> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(SolverError::Argument {
            name: "u",
            value: u,
        });
    }
    let s = solution.exponential_sum(u);
    if s.im.abs() >= 1e-10 {
        return Err(SolverError::ConjugatePairing { u, imag: s.im });
    }
    let psi = -s.re;
    if !(-1e-8..=1.0 + 1e-8).contains(&psi) {
        return Err(SolverError::SanityBand { u, psi });
    }
    Ok(psi.clamp(0.0, 1.0))
}
