use std::sync::Arc;

use super::gl::apply_left;
use super::right::{RightApplied, SmoothFn};
use super::{grid_len, FracError, FracOpKind, GridFn, OperatorChain};

/// Tail tolerance used by right operators inside chains.
const CHAIN_TAIL_TOL: f64 = 1e-13;

pub enum ChainInput {
    Grid(GridFn),
    /// An analytic operand; the result is sampled on `[0, t_max]` with step `h`.
    Analytic {
        f: Arc<dyn SmoothFn>,
        h: f64,
        t_max: f64,
    },
}

enum State {
    Grid(GridFn),
    Analytic(Arc<dyn SmoothFn>),
}

fn sample(f: &dyn SmoothFn, h: f64, t_max: f64) -> Result<GridFn, FracError> {
    let n = grid_len(h, t_max)?;
    let h = t_max / (n - 1) as f64;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let x = i as f64 * h;
        let v = f.deriv(0, x)?;
        if !v.is_finite() {
            return Err(FracError::ContractViolation(format!(
                "operand is not finite at x = {x}"
            )));
        }
        values.push(v);
    }
    GridFn::new(h, values)
}

/// Applies the chain right to left. Right operators need an analytic operand
/// and keep it analytic; left operators sample it on the grid first.
pub fn apply_chain(chain: &OperatorChain, input: ChainInput) -> Result<GridFn, FracError> {
    let (mut state, h, t_max) = match input {
        ChainInput::Grid(g) => {
            let (h, t) = (g.h(), g.t_max());
            (State::Grid(g), h, t)
        }
        ChainInput::Analytic { f, h, t_max } => (State::Analytic(f), h, t_max),
    };
    for (op, &scale) in chain.ops().iter().zip(chain.scales()).rev() {
        state = if op.kind.is_right() {
            let State::Analytic(f) = state else {
                return Err(FracError::ContractViolation(
                    "right operators need an analytic operand".into(),
                ));
            };
            if op.upper_limit.is_finite() {
                return Err(FracError::ContractViolation(
                    "right operators inside a chain need an infinite upper limit".into(),
                ));
            }
            let shift = match op.kind {
                FracOpKind::Rfdo => op.shift,
                _ => 0.0,
            };
            State::Analytic(Arc::new(RightApplied {
                inner: f,
                order: op.order,
                shift,
                scale,
                offset: op.offset,
                tail_tol: CHAIN_TAIL_TOL,
            }))
        } else {
            let grid = match state {
                State::Grid(g) => g,
                State::Analytic(f) => sample(f.as_ref(), h, t_max)?,
            };
            State::Grid(apply_left(&grid, op, scale)?)
        };
    }
    match state {
        State::Grid(g) => Ok(g),
        State::Analytic(f) => sample(f.as_ref(), h, t_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fraccalc::{ExpPolynomial, FracOp};
    use crate::model::{Component, GammaComponent, MlComponent};

    #[test]
    fn adjoint_chain_multiplies_exponentials_by_delta() {
        // 𝒜*(c d/du) e^{−zu} = (c^μ z^μ + λ₂)(cz + λ₁)^r e^{−zu}
        let comps = [
            Component::Gamma(GammaComponent::new(1.5, 2.0)),
            Component::Ml(MlComponent::new(0.6, 1.0)),
        ];
        let c = 1.3;
        let chain = OperatorChain::adjoint_operator(&comps, c).unwrap();
        let z = 0.9;
        let out = apply_chain(
            &chain,
            ChainInput::Analytic {
                f: Arc::new(ExpPolynomial::exp(1.0, z).unwrap()),
                h: 0.5,
                t_max: 2.0,
            },
        )
        .unwrap();
        let delta = ((c * z).powf(0.6) + 1.0) * (c * z + 2.0).powf(1.5);
        for (i, v) in out.values().iter().enumerate() {
            let u = out.node(i);
            let want = delta * (-z * u).exp();
            assert!((v - want).abs() < 1e-7 * want, "u={u} {v} {want}");
        }
    }

    #[test]
    fn right_operator_on_grid_is_rejected() {
        let chain = OperatorChain::unscaled(vec![FracOp::right_caputo(0.5).unwrap()]).unwrap();
        let g = GridFn::sample(|x| x, 0.1, 1.0).unwrap();
        assert!(matches!(
            apply_chain(&chain, ChainInput::Grid(g)),
            Err(FracError::ContractViolation(_))
        ));
    }

    #[test]
    fn linearity_on_grids() {
        let chain = OperatorChain::unscaled(vec![
            FracOp::left_rl_derivative(0.4).unwrap().with_offset(0.7),
            FracOp::lfdo(1.3, 0.5).unwrap(),
        ])
        .unwrap();
        let f = GridFn::sample(|x| x * x * (-x).exp(), 1e-3, 3.0).unwrap();
        let g = GridFn::sample(|x| x.powf(1.5), 1e-3, 3.0).unwrap();
        let (a, b) = (2.5, -0.75);
        let lhs = apply_chain(&chain, ChainInput::Grid(f.linear_combination(a, &g, b).unwrap())).unwrap();
        let af = apply_chain(&chain, ChainInput::Grid(f)).unwrap();
        let bg = apply_chain(&chain, ChainInput::Grid(g)).unwrap();
        let rhs = af.linear_combination(a, &bg, b).unwrap();
        for (x, y) in lhs.values().iter().zip(rhs.values()) {
            assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }
}
