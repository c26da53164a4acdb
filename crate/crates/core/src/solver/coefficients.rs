//! The linear system for the coefficients `K_p` of
//! `φ(u) = 1 + Σ K_p e^{−z_p u}`.
//!
//! Rows follow the claim-shape ladder: for claim component `L` and
//! `j = 0, …, s_L − 1` the row polynomial is
//! `ℓ(z) = ∏_{k<L} (α_k − z)^{s_k} (α_L − z)^j`, and the row reads
//! `Σ_p K_p Δ_p ℓ(z_p) = −Λ ℓ(0)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::characteristic::CharEq;
use super::{CharRoot, RuinSolution, SolverError};
use crate::model::ModelSpec;

pub const CONDITION_WARNING: f64 = 1e10;

fn ladder(shapes: &[u32]) -> Vec<(usize, u32)> {
    shapes
        .iter()
        .enumerate()
        .flat_map(|(l, &s)| (0..s).map(move |j| (l, j)))
        .collect()
}

fn ladder_value(eq: &CharEq, shapes: &[u32], (l, j): (usize, u32), z: Complex64) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for k in 0..l {
        v *= (eq.claims[k].1 - z).powi(shapes[k] as i32);
    }
    v * (eq.claims[l].1 - z).powi(j as i32)
}

/// Builds and solves the coefficient system for the given roots.
pub fn solve_coefficients(spec: &ModelSpec, roots: &[CharRoot]) -> Result<RuinSolution, SolverError> {
    let shapes = spec.integer_claim_shapes().ok_or_else(|| {
        SolverError::Unsupported("coefficients need integer claim shapes".into())
    })?;
    let n: usize = shapes.iter().map(|&s| s as usize).sum();
    if roots.len() != n {
        return Err(SolverError::RootCount {
            expected: n,
            found: roots.iter().map(|r| r.z).collect(),
        });
    }
    let eq = CharEq::new(spec);
    let lambda = eq.lambda();
    let rows = ladder(&shapes);
    let delta: Vec<Complex64> = roots.iter().map(|r| eq.delta(r.z)).collect();

    let a = DMatrix::from_fn(n, n, |q, p| delta[p] * ladder_value(&eq, &shapes, rows[q], roots[p].z));
    let b = DVector::from_fn(n, |q, _| -lambda * ladder_value(&eq, &shapes, rows[q], Complex64::new(0.0, 0.0)));

    let sv = a.clone().svd(false, false).singular_values;
    let (smax, smin) = sv
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition_number.is_finite() {
        return Err(SolverError::SingularSystem);
    }
    let k = a.lu().solve(&b).ok_or(SolverError::SingularSystem)?;
    let coefficients: Vec<Complex64> = k.iter().copied().collect();

    let mut warnings = Vec::new();
    if condition_number > CONDITION_WARNING {
        warnings.push(format!(
            "coefficient system condition number {condition_number:.3e} exceeds {CONDITION_WARNING:e}"
        ));
    }
    let phi0: Complex64 = coefficients.iter().sum::<Complex64>() + 1.0;
    if !(phi0.re >= -1e-8 && phi0.re <= 1.0 + 1e-8) || phi0.im.abs() > 1e-8 {
        return Err(SolverError::PostCheck { phi0 });
    }
    Ok(RuinSolution {
        model: spec.clone(),
        lambda_product: spec.lambda_product(),
        roots: roots.to_vec(),
        coefficients,
        delta,
        condition_number,
        warnings,
    })
}
