//! `fracruin` command-line front end: solve models, run simulations and
//! numerical checks, and write plot-ready CSV/JSON.
//!
//! Exit codes: 0 on success, 2 for invalid input (spec, overrides, flags,
//! unwritable output), 3 when a solver, simulation or check fails.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracruin::fraccalc::{residual_density_fde, FracError};
use fracruin::model::{validate, ModelError, ModelSpec, RawModelSpec};
use fracruin::montecarlo::{estimate_ruin_curve, renewal_equation_residual, MonteCarloError, SimConfig, Truncation};
use fracruin::solver::{eval_ruin, solve, u5_grid, GridAxis, RuinSolution, SolverError};

#[derive(Parser, Debug)]
#[command(name = "fracruin", version, about = "Ruin probabilities for gamma-time and fractional Poisson risk models")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model spec in JSON.
    #[arg(long)]
    spec: PathBuf,
    /// Replace one parameter, e.g. `--override r=2.5`. Keys: r, lambda1, mu,
    /// lambda2, s, alpha, c. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    /// Largest initial capital on the output grid.
    #[arg(long, default_value_t = 30.0)]
    u_max: f64,
    /// Number of grid steps; the grid has `u_steps + 1` points.
    #[arg(long, default_value_t = 300)]
    u_steps: usize,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Solve for ψ(u); writes solution.json and psi.csv.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Monte Carlo estimates of ψ(u); writes estimates.json and estimates.csv.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10.0)]
        u_max: f64,
        #[arg(long, default_value_t = 10)]
        u_steps: usize,
        #[arg(long, default_value_t = 100_000)]
        paths: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Claims per path before a path is cut off.
        #[arg(long, default_value_t = 100_000, conflicts_with = "horizon")]
        max_claims: u64,
        /// Cut paths off at this time instead of after a claim count.
        #[arg(long)]
        horizon: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// ln(u₅) over two parameters; writes u5_grid.csv.
    U5Grid {
        #[command(flatten)]
        model: ModelArgs,
        /// Two axes `key:lo:hi:n,key:lo:hi:n` (columns, then rows).
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Residual of the fractional equation satisfied by the waiting-time and
    /// claim densities; writes density_residual.csv and density_residual.json.
    VerifyDensity {
        #[command(flatten)]
        model: ModelArgs,
        /// Grid step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        /// Residuals are reported on [window_lo, t_max].
        #[arg(long, default_value_t = 0.1)]
        window_lo: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Residual of the renewal equation at the solved ψ; writes
    /// renewal_residual.csv.
    VerifyRenewal {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 5.0)]
        u_max: f64,
        #[arg(long, default_value_t = 5)]
        u_steps: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Gamma-time curves with λ₁ = r ∈ {0.5, 1, 1.5, 2, 2.5}, Exp(1) claims,
    /// c = 1.2; writes figure1a.csv.
    Figure1a {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Fractional Poisson curves for μ ∈ {0.25, 0.5, 0.75, 1} and
    /// λ₂ ∈ {0.5, 1}, Exp(1) claims, c = 1.2; writes figure2a.csv.
    Figure2a {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Failed(_) => 3,
        }
    }
}

impl Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Argument { .. } => CliError::Invalid(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<MonteCarloError> for CliError {
    fn from(e: MonteCarloError) -> Self {
        match e {
            MonteCarloError::InvalidArgument { .. } => CliError::Invalid(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<FracError> for CliError {
    fn from(e: FracError) -> Self {
        match e {
            FracError::InvalidArgument { .. } => CliError::Invalid(e.to_string()),
            e => CliError::Failed(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn load_raw(model: &ModelArgs) -> Result<RawModelSpec> {
    let text = fs::read_to_string(&model.spec)
        .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", model.spec.display())))?;
    let mut raw = RawModelSpec::from_json(&text)?;
    for item in &model.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Invalid(format!("override `{item}` is not KEY=VALUE")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Invalid(format!("override `{item}`: `{value}` is not a number")))?;
        raw.apply_override(key.trim(), value)?;
    }
    Ok(raw)
}

fn load(model: &ModelArgs) -> Result<ModelSpec> {
    Ok(validate(&load_raw(model)?)?)
}

fn u_grid(u_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(u_max.is_finite() && u_max >= 0.0) {
        return Err(CliError::Invalid(format!("u-max must be finite and >= 0, got {u_max}")));
    }
    if steps == 0 {
        return Err(CliError::Invalid("u-steps must be positive".into()));
    }
    Ok((0..=steps).map(|i| u_max * i as f64 / steps as f64).collect())
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Invalid(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn curve(sol: &RuinSolution, us: &[f64]) -> Result<Vec<f64>> {
    us.iter().map(|&u| Ok(eval_ruin(sol, u)?)).collect()
}

fn run_solve(model: &ModelArgs, c: &CurveArgs, out: &Path) -> Result<()> {
    let spec = load(model)?;
    let us = u_grid(c.u_max, c.u_steps)?;
    let sol = solve(&spec)?;
    let psi = curve(&sol, &us)?;
    for w in &sol.warnings {
        eprintln!("warning: {w}");
    }
    for r in &sol.roots {
        println!("root {} {:+}i", num(r.z.re), num(r.z.im));
    }
    println!("psi(0) = {}", num(psi[0]));
    write(out, "solution.json", &sol.to_json())?;
    let rows: Vec<Vec<f64>> = us.iter().zip(&psi).map(|(u, p)| vec![*u, *p]).collect();
    write(out, "psi.csv", &csv(&["u".into(), "psi".into()], &rows))
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    model: &ModelArgs,
    u_max: f64,
    u_steps: usize,
    paths: u64,
    seed: u64,
    max_claims: u64,
    horizon: Option<f64>,
    out: &Path,
) -> Result<()> {
    let spec = load(model)?;
    let us = u_grid(u_max, u_steps)?;
    let truncation = match horizon {
        Some(h) => Truncation::TimeHorizon(h),
        None => Truncation::ClaimCount(max_claims),
    };
    let cfg = SimConfig::new(paths, truncation, seed)?;
    let est = estimate_ruin_curve(&spec, &us, &cfg)?;
    if let Some(w) = est.iter().find_map(|e| e.warning.as_ref()) {
        eprintln!("warning: {w}");
    }
    if est.iter().any(|e| e.lower_bound) {
        eprintln!("note: truncated paths count as survivors, so the estimates are lower bounds");
    }
    let json = serde_json::to_string_pretty(&est).map_err(|e| CliError::Failed(e.to_string()))?;
    write(out, "estimates.json", &json)?;
    let header: Vec<String> = ["u", "p_hat", "ci_half_width", "ci_lower", "ci_upper", "truncated_fraction"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<f64>> = est
        .iter()
        .map(|e| {
            vec![
                e.u,
                e.p_hat,
                e.ci_half_width,
                e.ci_lower,
                e.ci_upper,
                e.truncated_paths as f64 / e.paths_run as f64,
            ]
        })
        .collect();
    write(out, "estimates.csv", &csv(&header, &rows))
}

fn run_u5_grid(model: &ModelArgs, grid: &str, out: &Path) -> Result<()> {
    let raw = load_raw(model)?;
    let axes: Vec<&str> = grid.split(',').collect();
    let [x, y] = axes[..] else {
        return Err(CliError::Invalid(format!("--grid needs two axes separated by a comma, got `{grid}`")));
    };
    let grid = u5_grid(&raw, GridAxis::parse(x.trim())?, GridAxis::parse(y.trim())?)?;
    for (xv, yv, msg) in grid.failures() {
        eprintln!("cell {}={xv}, {}={yv} failed: {msg}", grid.x.key, grid.y.key);
    }
    write(out, "u5_grid.csv", &grid.to_csv())
}

fn run_verify_density(model: &ModelArgs, step: f64, t_max: f64, window_lo: f64, out: &Path) -> Result<()> {
    let spec = load(model)?;
    let wait = residual_density_fde(&spec.interarrival_components(), step, t_max, window_lo)?;
    let claim = residual_density_fde(&spec.claim_components(), step, t_max, window_lo)?;
    println!("waiting-time density residual: {}", num(wait.max_abs));
    println!("claim density residual: {}", num(claim.max_abs));
    let rows: Vec<Vec<f64>> = (0..wait.residual.len())
        .map(|i| vec![wait.residual.node(i), wait.residual.values()[i], claim.residual.values()[i]])
        .collect();
    let header = ["t", "interarrival", "claims"].map(String::from);
    write(out, "density_residual.csv", &csv(&header, &rows))?;
    let summary = serde_json::json!({
        "step": wait.residual.h(),
        "window": [window_lo, t_max],
        "interarrival_max_abs": wait.max_abs,
        "claims_max_abs": claim.max_abs,
    });
    write(out, "density_residual.json", &format!("{summary:#}\n"))
}

fn run_verify_renewal(model: &ModelArgs, u_max: f64, u_steps: usize, out: &Path) -> Result<()> {
    let spec = load(model)?;
    let us = u_grid(u_max, u_steps)?;
    let sol = solve(&spec)?;
    let res = renewal_equation_residual(&spec, &sol, &us)?;
    println!("max |psi - rhs| = {}", num(res.max_abs));
    let rows: Vec<Vec<f64>> = res.points.iter().map(|&(u, p, r)| vec![u, p, r, p - r]).collect();
    let header = ["u", "psi", "rhs", "residual"].map(String::from);
    write(out, "renewal_residual.csv", &csv(&header, &rows))
}

/// One ψ column per model, sharing the `u` column.
fn family(models: &[(String, ModelSpec)], c: &CurveArgs, out: &Path, name: &str) -> Result<()> {
    let us = u_grid(c.u_max, c.u_steps)?;
    let mut columns = Vec::new();
    for (_, spec) in models {
        columns.push(curve(&solve(spec)?, &us)?);
    }
    let mut header = vec!["u".to_string()];
    header.extend(models.iter().map(|(label, _)| label.clone()));
    let rows: Vec<Vec<f64>> = us
        .iter()
        .enumerate()
        .map(|(i, &u)| std::iter::once(u).chain(columns.iter().map(|col| col[i])).collect())
        .collect();
    write(out, name, &csv(&header, &rows))
}

fn run(cli: Cli) -> Result<()> {
    match cli.verb {
        Verb::Solve { model, curve, out } => run_solve(&model, &curve, &out.out),
        Verb::Simulate {
            model,
            u_max,
            u_steps,
            paths,
            seed,
            max_claims,
            horizon,
            out,
        } => run_simulate(&model, u_max, u_steps, paths, seed, max_claims, horizon, &out.out),
        Verb::U5Grid { model, grid, out } => run_u5_grid(&model, &grid, &out.out),
        Verb::VerifyDensity {
            model,
            step,
            t_max,
            window_lo,
            out,
        } => run_verify_density(&model, step, t_max, window_lo, &out.out),
        Verb::VerifyRenewal {
            model,
            u_max,
            u_steps,
            out,
        } => run_verify_renewal(&model, u_max, u_steps, &out.out),
        Verb::Figure1a { curve, out } => {
            let models = [0.5, 1.0, 1.5, 2.0, 2.5]
                .iter()
                .map(|&r| Ok((format!("r_{r}"), ModelSpec::gamma_exponential(r, r, 1.0, 1.2)?)))
                .collect::<Result<Vec<_>>>()?;
            family(&models, &curve, &out.out, "figure1a.csv")
        }
        Verb::Figure2a { curve, out } => {
            let mut models = Vec::new();
            for l2 in [0.5, 1.0] {
                for mu in [0.25, 0.5, 0.75, 1.0] {
                    models.push((format!("mu_{mu}_lambda2_{l2}"), ModelSpec::ml_exponential(mu, l2, 1.0, 1.2)?));
                }
            }
            family(&models, &curve, &out.out, "figure2a.csv")
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
