//! Fractional integrals and derivatives, the exponentially tilted operators
//! built from them, and numerical checks of the identities they satisfy.
//!
//! Left operators act on uniform grids starting at 0 through Grünwald-Letnikov
//! sums (first order in `h`). Right operators act on analytic callables
//! ([`SmoothFn`]) through quadrature of the right Caputo integral
//! `ᶜ_xD_∞^r f(x) = ((−1)^n/Γ(n−r)) ∫_x^∞ (y−x)^{n−r−1} f^{(n)}(y) dy`,
//! `n = ⌊r⌋ + 1`. The sign factor makes `e^{−λx}` an eigenfunction with
//! eigenvalue `λ^r`.
//!
//! The tilted operators are `ᵅ₀R_x^r f = e^{−αx} ₀D_x^r[e^{αx} f]` (LFDO) and
//! `ᵅ_xR_∞^r g = e^{αx} ᶜ_xD_∞^r[e^{−αx} g]` (RFDO).

mod chain;
mod gl;
mod right;
mod verify;

use thiserror::Error;

use crate::model::{Component, ModelError};
use crate::quad::QuadError;

pub use chain::{apply_chain, ChainInput};
pub use gl::{gl_apply, gl_left_deriv, gl_weights, lfdo_on_grid};
pub use right::{right_caputo_deriv, right_op, ExpPolynomial, RightApplied, SmoothFn};
pub use verify::{check_adjoint, convolve_on_grid, residual_density_fde, AdjointReport, ResidualReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("x = {x} is outside the grid or not a grid node: {reason}")]
    Domain { x: f64, reason: &'static str },
    #[error("operand contract violated: {0}")]
    ContractViolation(String),
    #[error("numerical evaluation failed: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How the stored values relate to the function being represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `values[i] = f(i h)`.
    Values,
    /// `values[i] = ∫₀^{ih} f`, used when `f` is unbounded at 0.
    Integrated,
}

/// A function sampled on the uniform grid `x_i = i h`, `i = 0..n`, on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    h: f64,
    values: Vec<f64>,
    representation: Representation,
}

impl GridFn {
    pub fn new(h: f64, values: Vec<f64>) -> Result<Self, FracError> {
        Self::with_representation(h, values, Representation::Values)
    }

    pub fn integrated(h: f64, values: Vec<f64>) -> Result<Self, FracError> {
        Self::with_representation(h, values, Representation::Integrated)
    }

    fn with_representation(h: f64, values: Vec<f64>, representation: Representation) -> Result<Self, FracError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(FracError::InvalidArgument {
                name: "h",
                value: h,
                reason: "grid spacing must be positive",
            });
        }
        if values.is_empty() {
            return Err(FracError::InvalidArgument {
                name: "len",
                value: 0.0,
                reason: "grid needs at least one node",
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(FracError::InvalidArgument {
                name: "value",
                value: *v,
                reason: "grid values must be finite",
            });
        }
        Ok(Self {
            h,
            values,
            representation,
        })
    }

    /// Samples `f` at the nodes of `[0, t_max]` with spacing close to `h`
    /// (rounded so that `t_max` is a node).
    pub fn sample(f: impl Fn(f64) -> f64, h: f64, t_max: f64) -> Result<Self, FracError> {
        let n = grid_len(h, t_max)?;
        let h = t_max / (n - 1) as f64;
        Self::new(h, (0..n).map(|i| f(i as f64 * h)).collect())
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        self.h * (self.values.len() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.h * i as f64
    }

    /// Index of the node at `x`.
    pub fn index_of(&self, x: f64) -> Result<usize, FracError> {
        if !(x >= 0.0) || x > self.t_max() * (1.0 + 1e-12) {
            return Err(FracError::Domain {
                x,
                reason: "outside [0, T]",
            });
        }
        let pos = x / self.h;
        let i = pos.round();
        if (pos - i).abs() > 1e-6 {
            return Err(FracError::Domain {
                x,
                reason: "not a grid node",
            });
        }
        Ok(i as usize)
    }

    /// `a·self + b·other` on a common grid.
    pub fn linear_combination(&self, a: f64, other: &GridFn, b: f64) -> Result<GridFn, FracError> {
        if self.len() != other.len()
            || (self.h - other.h).abs() > 1e-15 * self.h
            || self.representation != other.representation
        {
            return Err(FracError::InvalidArgument {
                name: "h",
                value: other.h,
                reason: "grids differ",
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::with_representation(self.h, values, self.representation)
    }
}

pub(crate) fn grid_len(h: f64, t_max: f64) -> Result<usize, FracError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(FracError::InvalidArgument {
            name: "h",
            value: h,
            reason: "grid spacing must be positive",
        });
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(FracError::InvalidArgument {
            name: "t_max",
            value: t_max,
            reason: "grid end must be positive",
        });
    }
    Ok((t_max / h).round().max(1.0) as usize + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracOpKind {
    /// `₀D_x^r`
    LeftRlDerivative,
    /// `₀I_x^r`
    LeftRlIntegral,
    /// `ᶜ_xD_b^r`
    RightCaputoDerivative,
    /// `ᵅ₀R_x^r`
    Lfdo,
    /// `ᵅ_xR_b^r`
    Rfdo,
}

impl FracOpKind {
    pub fn is_right(self) -> bool {
        matches!(self, FracOpKind::RightCaputoDerivative | FracOpKind::Rfdo)
    }
}

/// One operator `f ↦ K[f] + offset·f`, where `K` is given by `kind`, `order`
/// and the exponential tilt `shift`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOp {
    pub kind: FracOpKind,
    pub order: f64,
    pub shift: f64,
    /// Left operators integrate from here; grids start at 0, so it must be 0.
    pub lower_limit: f64,
    /// Right operators integrate up to here (`f64::INFINITY` allowed).
    pub upper_limit: f64,
    pub offset: f64,
}

impl FracOp {
    fn build(kind: FracOpKind, order: f64, shift: f64) -> Result<Self, FracError> {
        if !(order.is_finite() && order > 0.0) {
            return Err(FracError::InvalidArgument {
                name: "order",
                value: order,
                reason: "must be positive",
            });
        }
        if !shift.is_finite() {
            return Err(FracError::InvalidArgument {
                name: "shift",
                value: shift,
                reason: "must be finite",
            });
        }
        Ok(Self {
            kind,
            order,
            shift,
            lower_limit: 0.0,
            upper_limit: f64::INFINITY,
            offset: 0.0,
        })
    }

    pub fn left_rl_derivative(order: f64) -> Result<Self, FracError> {
        Self::build(FracOpKind::LeftRlDerivative, order, 0.0)
    }

    pub fn left_rl_integral(order: f64) -> Result<Self, FracError> {
        Self::build(FracOpKind::LeftRlIntegral, order, 0.0)
    }

    pub fn right_caputo(order: f64) -> Result<Self, FracError> {
        Self::build(FracOpKind::RightCaputoDerivative, order, 0.0)
    }

    pub fn lfdo(order: f64, shift: f64) -> Result<Self, FracError> {
        Self::build(FracOpKind::Lfdo, order, shift)
    }

    pub fn rfdo(order: f64, shift: f64) -> Result<Self, FracError> {
        Self::build(FracOpKind::Rfdo, order, shift)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_upper_limit(mut self, b: f64) -> Self {
        self.upper_limit = b;
        self
    }

    /// Order of the Grünwald-Letnikov sum realizing a left operator.
    fn gl_order(&self) -> f64 {
        match self.kind {
            FracOpKind::LeftRlIntegral => -self.order,
            _ => self.order,
        }
    }
}

/// Composition `ops[0] ∘ ops[1] ∘ … ∘ ops[last]`: the last operator is applied
/// first. Operator `i` is multiplied by `scales[i]` (its offset is not).
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorChain {
    ops: Vec<FracOp>,
    scales: Vec<f64>,
}

impl OperatorChain {
    pub fn new(ops: Vec<FracOp>, scales: Vec<f64>) -> Result<Self, FracError> {
        if ops.is_empty() {
            return Err(FracError::InvalidArgument {
                name: "ops",
                value: 0.0,
                reason: "chain must be nonempty",
            });
        }
        if scales.len() != ops.len() {
            return Err(FracError::InvalidArgument {
                name: "scales",
                value: scales.len() as f64,
                reason: "one scale per operator",
            });
        }
        Ok(Self { ops, scales })
    }

    pub fn unscaled(ops: Vec<FracOp>) -> Result<Self, FracError> {
        let n = ops.len();
        Self::new(ops, vec![1.0; n])
    }

    /// `⊙_j (₀D^{μ_j} + λ₂ⱼ) ⊙_i ^{λ₁ᵢ}₀R^{rᵢ}`, which annihilates the density of
    /// the sum of the components on `t > 0`.
    pub fn density_operator(components: &[Component]) -> Result<Self, FracError> {
        let mut ops = Vec::new();
        for c in components.iter().rev() {
            if let Component::Ml(m) = c {
                ops.push(FracOp::left_rl_derivative(m.mu)?.with_offset(m.rate));
            }
        }
        for c in components.iter().rev() {
            if let Component::Gamma(g) = c {
                ops.push(FracOp::lfdo(g.shape, g.rate)?);
            }
        }
        Self::unscaled(ops)
    }

    /// `⊙_j (c^{μ_j} ᶜ_xD_∞^{μ_j} + λ₂ⱼ) ⊙_i c^{rᵢ} ^{λ₁ᵢ/c}_xR_∞^{rᵢ}`, the formal
    /// adjoint of [`OperatorChain::density_operator`] with `d/dt → c d/du`.
    pub fn adjoint_operator(components: &[Component], c: f64) -> Result<Self, FracError> {
        let mut ops = Vec::new();
        let mut scales = Vec::new();
        for comp in components.iter().rev() {
            if let Component::Ml(m) = comp {
                ops.push(FracOp::right_caputo(m.mu)?.with_offset(m.rate));
                scales.push(c.powf(m.mu));
            }
        }
        for comp in components.iter().rev() {
            if let Component::Gamma(g) = comp {
                ops.push(FracOp::rfdo(g.shape, g.rate / c)?);
                scales.push(c.powf(g.shape));
            }
        }
        Self::new(ops, scales)
    }

    pub fn ops(&self) -> &[FracOp] {
        &self.ops
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }
}
