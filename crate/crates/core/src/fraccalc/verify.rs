//! Numerical checks: the adjoint identity between the tilted operators and
//! the fractional differential equation satisfied by densities.

use rayon::prelude::*;

use super::chain::{apply_chain, ChainInput};
use super::gl::apply_left;
use super::right::{right_op, SmoothFn};
use super::{grid_len, FracError, FracOp, GridFn, OperatorChain};
use crate::model::{sum_density, Component};
use crate::quad::{integrate, integrate_to_infinity, QuadError, QuadOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointReport {
    /// `∫₀^∞ (ᵅ₀R^r f) g`, extrapolated from three grids.
    pub lhs: f64,
    /// `∫₀^∞ f (ᵅ_xR_∞^r g)` by adaptive quadrature.
    pub rhs: f64,
    /// `|lhs − rhs| / |rhs|`.
    pub discrepancy: f64,
    pub passed: bool,
    /// End of the truncated left-hand integration range.
    pub x_max: f64,
}

const PRIMITIVE_OPTS: QuadOptions = QuadOptions {
    abs_tol: 1e-16,
    rel_tol: 1e-13,
    max_intervals: 2000,
};

/// `∫₀^{x_i} f` at every node, one adaptive quadrature per cell.
fn primitive(f: &(dyn Fn(f64) -> f64 + Sync), h: f64, n: usize) -> Result<Vec<f64>, FracError> {
    let cells: Result<Vec<f64>, QuadError> = (1..n)
        .into_par_iter()
        .map(|i| Ok(integrate(f, (i - 1) as f64 * h, i as f64 * h, PRIMITIVE_OPTS)?.value))
        .collect();
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    for c in cells? {
        acc += c;
        out.push(acc);
    }
    Ok(out)
}

fn operand_grid(f: &(dyn Fn(f64) -> f64 + Sync), h: f64, n: usize) -> Result<GridFn, FracError> {
    if f(0.0).is_finite() {
        GridFn::new(h, (0..n).into_par_iter().map(|i| f(i as f64 * h)).collect())
    } else {
        GridFn::integrated(h, primitive(f, h, n)?)
    }
}

/// Checks `∫₀^∞ (ᵅ₀R^r f)(x) g(x) dx = ∫₀^∞ f(x) (ᵅ_xR_∞^r g)(x) dx`.
///
/// The left side is computed with Grünwald-Letnikov sums on three nested grids
/// and extrapolated to remove the `O(h)` and `O(h²)` terms; `f` should vanish
/// at 0 fast enough that `ᵅ₀R^r f` stays integrable. An `f` unbounded at 0 is
/// handled through its primitive. The right side uses quadrature.
pub fn check_adjoint(
    r: f64,
    alpha: f64,
    f: &(dyn Fn(f64) -> f64 + Sync),
    g: &dyn SmoothFn,
    tol: f64,
) -> Result<AdjointReport, FracError> {
    let op = FracOp::lfdo(r, alpha)?;
    let mut x_max = 1.0;
    while g.tail_bound(0, x_max).ok_or_else(|| {
        FracError::ContractViolation("g has no finite tail".into())
    })? > 1e-14
    {
        x_max *= 2.0;
        if x_max > 1e4 {
            return Err(FracError::ContractViolation("g decays too slowly".into()));
        }
    }
    if alpha * x_max > 700.0 {
        return Err(FracError::Evaluation("tilt overflows on the integration range".into()));
    }
    let levels = [1usize << 14, 1 << 15, 1 << 16];
    let mut estimates = Vec::new();
    for &cells in &levels {
        let h = x_max / cells as f64;
        let n = cells + 1;
        let grid = operand_grid(f, h, n)?;
        let left = apply_left(&grid, &op, 1.0)?;
        let gv: Result<Vec<f64>, FracError> = (0..n).into_par_iter().map(|i| g.deriv(0, i as f64 * h)).collect();
        let gv = gv?;
        let lv = left.values();
        let mut s = 0.5 * (lv[0] * gv[0] + lv[n - 1] * gv[n - 1]);
        for i in 1..n - 1 {
            s += lv[i] * gv[i];
        }
        estimates.push(s * h);
    }
    let r1 = 2.0 * estimates[1] - estimates[0];
    let r2 = 2.0 * estimates[2] - estimates[1];
    let lhs = (4.0 * r2 - r1) / 3.0;

    let mut failure = None;
    let mut integrand = |x: f64| {
        let fx = f(x);
        if fx == 0.0 {
            return 0.0;
        }
        match right_op(g, r, alpha, x, f64::INFINITY, 1e-15) {
            Ok(v) => fx * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let opts = QuadOptions::new(1e-15, 1e-12);
    let rhs = integrate(&mut integrand, 0.0, 1.0, opts)?.value + integrate_to_infinity(&mut integrand, 1.0, opts)?.value;
    if let Some(e) = failure {
        return Err(e);
    }
    let discrepancy = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(AdjointReport {
        lhs,
        rhs,
        discrepancy,
        passed: discrepancy < tol,
        x_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// The operator applied to the density on the whole grid.
    pub residual: GridFn,
    /// `max |residual|` over the window.
    pub max_abs: f64,
    pub window: (f64, f64),
}

/// Applies [`OperatorChain::density_operator`] to the density of the sum of
/// `components` on `[0, t_max]` and reports the largest residual on
/// `[window_lo, t_max]`. Densities unbounded at 0 go through their primitive.
pub fn residual_density_fde(
    components: &[Component],
    h: f64,
    t_max: f64,
    window_lo: f64,
) -> Result<ResidualReport, FracError> {
    if components.is_empty() {
        return Err(FracError::InvalidArgument {
            name: "components",
            value: 0.0,
            reason: "need at least one component",
        });
    }
    let n = grid_len(h, t_max)?;
    let h = t_max / (n - 1) as f64;
    let order: f64 = components.iter().map(Component::order).sum();
    let bounded = match components {
        [c] => c.order() >= 1.0,
        _ => order > 1.0,
    };
    let grid = if bounded {
        let v: Result<Vec<f64>, _> = (0..n)
            .into_par_iter()
            .map(|i| sum_density(components, i as f64 * h))
            .collect();
        GridFn::new(h, v?)?
    } else if let [c] = components {
        let v: Result<Vec<f64>, _> = (0..n).into_par_iter().map(|i| c.cdf(i as f64 * h)).collect();
        GridFn::integrated(h, v?)?
    } else {
        let mut failure = std::sync::Mutex::new(None);
        let dens = |x: f64| {
            sum_density(components, x).unwrap_or_else(|e| {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            })
        };
        let v = primitive(&dens, h, n)?;
        if let Some(e) = failure.get_mut().unwrap().take() {
            return Err(e.into());
        }
        GridFn::integrated(h, v)?
    };
    if grid.values().iter().all(|v| *v == 0.0) {
        return Err(FracError::Evaluation("density underflows on the whole grid".into()));
    }
    let chain = OperatorChain::density_operator(components)?;
    let residual = apply_chain(&chain, ChainInput::Grid(grid))?;
    let max_abs = (0..residual.len())
        .filter(|&i| residual.node(i) >= window_lo)
        .map(|i| residual.values()[i].abs())
        .fold(0.0, f64::max);
    Ok(ResidualReport {
        residual,
        max_abs,
        window: (window_lo, t_max),
    })
}

/// `(K * f)(x_i) = ∫₀^{x_i} K(x_i − y) f(y) dy` at every node; `K` may have an
/// integrable singularity at 0.
pub fn convolve_on_grid(
    kernel: &(dyn Fn(f64) -> f64 + Sync),
    f: &(dyn Fn(f64) -> f64 + Sync),
    h: f64,
    t_max: f64,
) -> Result<GridFn, FracError> {
    let n = grid_len(h, t_max)?;
    let h = t_max / (n - 1) as f64;
    let v: Result<Vec<f64>, QuadError> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 * h;
            if i == 0 {
                return Ok(0.0);
            }
            // The half next to the kernel's singularity runs over s = x − y so
            // that the kernel is never evaluated at a rounded-off 0.
            Ok(integrate(|y| kernel(x - y) * f(y), 0.0, 0.5 * x, PRIMITIVE_OPTS)?.value
                + integrate(|s| kernel(s) * f(x - s), 0.0, 0.5 * x, PRIMITIVE_OPTS)?.value)
        })
        .collect();
    GridFn::new(h, v?)
}
