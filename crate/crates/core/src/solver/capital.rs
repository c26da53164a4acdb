//! Capital requirements: `u₅ = inf{u ≥ 0 : ψ(u) ≤ 0.05}` and grids of `ln u₅`
//! over two model parameters.

use rayon::prelude::*;

use super::{eval_ruin, solve, RuinSolution, SolverError};
use crate::model::{validate, ModelError, RawModelSpec};

/// Smallest `u` with `ψ(u) ≤ level`, by bisection on the decreasing `ψ`.
/// Stops when `|ψ(u) − level| < 1e-10` or the bracket is narrower than 1e-12.
pub fn capital_for_level(solution: &RuinSolution, level: f64) -> Result<f64, SolverError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(SolverError::Argument {
            name: "level",
            value: level,
        });
    }
    if eval_ruin(solution, 0.0)? <= level {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while eval_ruin(solution, hi)? >= level {
        hi *= 2.0;
        if hi > 1e15 {
            return Err(SolverError::Unsupported(
                "ruin probability does not fall below the level".into(),
            ));
        }
    }
    let mut lo = if hi == 1.0 { 0.0 } else { 0.5 * hi };
    loop {
        let mid = 0.5 * (lo + hi);
        let v = eval_ruin(solution, mid)? - level;
        if v.abs() < 1e-10 || hi - lo < 1e-12 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

pub fn u5(solution: &RuinSolution) -> Result<f64, SolverError> {
    capital_for_level(solution, 0.05)
}

/// One grid axis: override key, inclusive range and number of points.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub key: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridAxis {
    /// Parses `key:lo:hi:n`.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let bad = || ModelError::Parse(format!("grid axis `{text}` is not key:lo:hi:n"));
        let parts: Vec<&str> = text.split(':').collect();
        let [key, lo, hi, n] = parts.as_slice() else {
            return Err(bad());
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() || (n > 1 && hi < lo) {
            return Err(bad());
        }
        Ok(Self {
            key: key.trim().to_string(),
            lo,
            hi,
            n,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| if i + 1 == self.n { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridCell {
    /// `ln u₅` (`−∞` when `ψ(0) ≤ 0.05`).
    Value(f64),
    /// The parameter combination violates the net profit condition.
    Missing,
    /// Any other validation or solver failure.
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct U5Grid {
    pub x: GridAxis,
    pub y: GridAxis,
    /// Row-major: `cells[iy][ix]`.
    pub cells: Vec<Vec<GridCell>>,
}

impl U5Grid {
    /// CSV with the x values as header and one row per y value. Missing cells
    /// are empty; failed cells read `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\\{}", self.y.key, self.x.key);
        for x in self.x.values() {
            out.push(',');
            out.push_str(&format!("{x:.16e}"));
        }
        out.push('\n');
        for (y, row) in self.y.values().iter().zip(&self.cells) {
            out.push_str(&format!("{y:.16e}"));
            for cell in row {
                out.push(',');
                match cell {
                    GridCell::Value(v) => out.push_str(&format!("{v:.16e}")),
                    GridCell::Missing => {}
                    GridCell::Failed(_) => out.push_str("NaN"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn failures(&self) -> Vec<(f64, f64, String)> {
        let (xs, ys) = (self.x.values(), self.y.values());
        let mut out = Vec::new();
        for (iy, row) in self.cells.iter().enumerate() {
            for (ix, cell) in row.iter().enumerate() {
                if let GridCell::Failed(msg) = cell {
                    out.push((xs[ix], ys[iy], msg.clone()));
                }
            }
        }
        out
    }
}

fn grid_cell(base: &RawModelSpec, x: &GridAxis, xv: f64, y: &GridAxis, yv: f64) -> GridCell {
    let mut raw = base.clone();
    if let Err(e) = raw
        .apply_override(&x.key, xv)
        .and_then(|_| raw.apply_override(&y.key, yv))
    {
        return GridCell::Failed(e.to_string());
    }
    let spec = match validate(&raw) {
        Ok(s) => s,
        Err(ModelError::NetProfit { .. }) => return GridCell::Missing,
        Err(e) => return GridCell::Failed(e.to_string()),
    };
    match solve(&spec).and_then(|sol| u5(&sol)) {
        Ok(u) => GridCell::Value(u.ln()),
        Err(e) => GridCell::Failed(e.to_string()),
    }
}

/// Evaluates `ln u₅` on the grid spanned by two override keys. Cells are
/// computed in parallel; per-cell failures are recorded, not propagated.
pub fn u5_grid(base: &RawModelSpec, x: GridAxis, y: GridAxis) -> Result<U5Grid, ModelError> {
    let mut probe = base.clone();
    probe.apply_override(&x.key, x.lo)?;
    probe.apply_override(&y.key, y.lo)?;
    let (xs, ys) = (x.values(), y.values());
    let cells = ys
        .par_iter()
        .map(|&yv| xs.iter().map(|&xv| grid_cell(base, &x, xv, &y, yv)).collect())
        .collect();
    Ok(U5Grid { x, y, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelSpec;

    #[test]
    fn classical_u5() {
        let sol = solve(&ModelSpec::gamma_exponential(1.0, 1.0, 1.0, 1.2).unwrap()).unwrap();
        let u = u5(&sol).unwrap();
        let want = ((1.0 / 1.2) / 0.05f64).ln() / (1.0 - 1.0 / 1.2);
        assert!((u - want).abs() < 1e-9, "{u} {want}");
    }

    #[test]
    fn zero_when_already_safe() {
        let sol = solve(&ModelSpec::gamma_exponential(1.0, 1.0, 1.0, 40.0).unwrap()).unwrap();
        assert_eq!(u5(&sol).unwrap(), 0.0);
    }

    #[test]
    fn axis_parsing() {
        let a = GridAxis::parse("r:0.5:2.5:5").unwrap();
        assert_eq!(a.values(), vec![0.5, 1.0, 1.5, 2.0, 2.5]);
        assert!(GridAxis::parse("r:1:2").is_err());
        assert!(GridAxis::parse("r:1:2:0").is_err());
    }
}
