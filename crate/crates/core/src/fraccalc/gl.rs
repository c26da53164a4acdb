//! Grünwald-Letnikov sums `h^{−q} Σ_{j≤i} w_j f_{i−j}` with
//! `w_j = (−1)^j binom(q, j)`. Negative `q` gives fractional integrals.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{FracError, FracOp, FracOpKind, GridFn, Representation};

/// Above this many nodes the sums switch from direct summation to FFT
/// convolution. The FFT error is spread evenly over the grid instead of staying
/// relative to the local magnitude, which hurts tilted and high-order sums, so
/// direct summation is kept as long as it is affordable.
const FFT_THRESHOLD: usize = 70_000;

/// The first `n` weights `w_j = (−1)^j binom(q, j)`.
pub fn gl_weights(q: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n);
    let mut cur = 1.0;
    for j in 0..n {
        if j > 0 {
            cur *= 1.0 - (q + 1.0) / j as f64;
        }
        w.push(cur);
    }
    w
}

/// Applies the order-`q` sum to every node.
pub fn gl_apply(values: &[f64], q: f64, h: f64) -> Vec<f64> {
    let n = values.len();
    let scale = h.powf(-q);
    // Non-negative integer orders have finitely many nonzero weights.
    let support = if q >= 0.0 && q.fract() == 0.0 {
        (q as usize + 1).min(n)
    } else {
        n
    };
    let w = gl_weights(q, support);
    if support == n && n > FFT_THRESHOLD {
        return fft_convolve(&w, values).into_iter().map(|v| v * scale).collect();
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let m = support.min(i + 1);
            let mut acc = 0.0;
            for j in 0..m {
                acc += w[j] * values[i - j];
            }
            acc * scale
        })
        .collect()
}

fn fft_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let m = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let pad = |x: &[f64]| {
        let mut v: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        v.resize(m, Complex64::new(0.0, 0.0));
        v
    };
    let mut fa = pad(a);
    let mut fb = pad(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    fa.iter().take(n).map(|z| z.re / m as f64).collect()
}

/// `₀D_x^r f` at the grid node `x`.
pub fn gl_left_deriv(f: &GridFn, r: f64, x: f64) -> Result<f64, FracError> {
    if !r.is_finite() {
        return Err(FracError::InvalidArgument {
            name: "order",
            value: r,
            reason: "must be finite",
        });
    }
    let i = f.index_of(x)?;
    let q = match f.representation() {
        Representation::Values => r,
        Representation::Integrated => r + 1.0,
    };
    let w = gl_weights(q, i + 1);
    let v = f.values();
    let acc: f64 = (0..=i).map(|j| w[j] * v[i - j]).sum();
    Ok(acc * f.h().powf(-q))
}

/// `ᵅ₀R_x^r f` on the whole grid.
pub fn lfdo_on_grid(f: &GridFn, r: f64, alpha: f64) -> Result<GridFn, FracError> {
    apply_left(f, &FracOp::lfdo(r, alpha)?, 1.0)
}

/// `scale·K[f] + offset·f` for a left operator `K`; the result holds values.
pub(crate) fn apply_left(f: &GridFn, op: &FracOp, scale: f64) -> Result<GridFn, FracError> {
    if op.kind.is_right() {
        return Err(FracError::ContractViolation(
            "right operators need an analytic operand".into(),
        ));
    }
    if op.lower_limit != 0.0 {
        return Err(FracError::InvalidArgument {
            name: "lower_limit",
            value: op.lower_limit,
            reason: "grids start at 0",
        });
    }
    let alpha = match op.kind {
        FracOpKind::Lfdo => op.shift,
        _ => 0.0,
    };
    let h = f.h();
    if (alpha * f.t_max()).abs() > 700.0 {
        return Err(FracError::Evaluation(format!(
            "tilt e^({alpha}·{}) overflows",
            f.t_max()
        )));
    }
    let n = f.len();
    let tilt: Vec<f64> = (0..n).map(|i| (alpha * f.node(i)).exp()).collect();
    let v = f.values();
    let (tilted, q) = match f.representation() {
        Representation::Values => (
            v.iter().zip(&tilt).map(|(a, b)| a * b).collect::<Vec<_>>(),
            op.gl_order(),
        ),
        Representation::Integrated => {
            // ∫₀ˣ e^{αy} f = e^{αx} F(x) − α ∫₀ˣ e^{αy} F(y) dy
            let mut cum = 0.0;
            let mut g = Vec::with_capacity(n);
            for i in 0..n {
                if i > 0 {
                    cum += 0.5 * h * (tilt[i - 1] * v[i - 1] + tilt[i] * v[i]);
                }
                g.push(tilt[i] * v[i] - alpha * cum);
            }
            (g, op.gl_order() + 1.0)
        }
    };
    let k = gl_apply(&tilted, q, h);
    let pointwise = pointwise_values(f);
    let out = (0..n)
        .map(|i| scale * k[i] / tilt[i] + op.offset * pointwise[i])
        .collect();
    GridFn::new(h, out)
}

/// Function values at the nodes; central differences of the primitive for an
/// integrated grid (one-sided at the ends).
fn pointwise_values(f: &GridFn) -> Vec<f64> {
    let v = f.values();
    match f.representation() {
        Representation::Values => v.to_vec(),
        Representation::Integrated => {
            let n = v.len();
            let h = f.h();
            if n == 1 {
                return vec![0.0];
            }
            (0..n)
                .map(|i| {
                    if i == 0 {
                        (v[1] - v[0]) / h
                    } else if i + 1 == n {
                        (v[i] - v[i - 1]) / h
                    } else {
                        (v[i + 1] - v[i - 1]) / (2.0 * h)
                    }
                })
                .collect()
        }
    }
}
