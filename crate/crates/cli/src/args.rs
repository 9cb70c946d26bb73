use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "koopman",
    version,
    about = "Normal forms and approximate Koopman eigenfunctions of polynomial maps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List every μ = λ^α − λⱼ up to order K and flag resonances (exit 2 if any).
    Resonance(ResonanceArgs),
    /// Run the degree-by-degree normal-form reduction.
    Normalform(NormalformArgs),
    /// Evaluate τₘ⁻¹ at a point.
    Invert(InvertArgs),
    /// Fit the decay order of the approximate-eigenfunction residual.
    ResidualStudy(ResidualArgs),
    /// Fit the order of Φₘ⁻¹(y) − (y − Qₘ(y)) as y → 0.
    InverseOrder(InverseOrderArgs),
    /// Least-squares approximation of a target by pulled-back polynomials.
    DensityDemo(DensityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Map description (JSON).
    pub map: PathBuf,
    /// Output file; stdout if absent. Relative paths resolve against $KOOPMAN_OUT_DIR when set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Run the pipeline even if some |λ| >= 1.
    #[arg(long)]
    pub allow_unstable: bool,
}

#[derive(Debug, Args)]
pub struct PipelineOpts {
    /// Working truncation degree D (defaults to the largest stage needed).
    #[arg(short = 'D', long = "degree")]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// |μ| at or below which a division counts as resonant.
    #[arg(long, default_value_t = koopman_core::spectrum::DEFAULT_RESONANCE_TOL)]
    pub resonance_tol: f64,
    /// Samples for the sup-norm estimate behind each stage radius.
    #[arg(long, default_value_t = 4096)]
    pub norm_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(short = 'K', long = "order")]
    pub order: usize,
    #[arg(long, default_value_t = koopman_core::spectrum::DEFAULT_RESONANCE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct NormalformArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(short = 'D', long = "degree")]
    pub degree: usize,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// |μ| at or below which a division counts as resonant.
    #[arg(long, default_value_t = koopman_core::spectrum::DEFAULT_RESONANCE_TOL)]
    pub tol: f64,
    /// Samples for the sup-norm estimate behind each stage radius.
    #[arg(long, default_value_t = 4096)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    #[arg(short = 'm', long = "stage")]
    pub m: usize,
    /// Point as JSON: `[[re, im], ...]` or `[x1, x2, ...]`.
    #[arg(long)]
    pub point: String,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    #[arg(short = 'm', long = "stage")]
    pub m: usize,
    /// Eigenfunction exponents, comma separated, e.g. `1,0`.
    #[arg(long)]
    pub alpha: String,
    /// Comma list, or `start:end:count` for geometric spacing.
    #[arg(long)]
    pub radii: String,
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct InverseOrderArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    /// Stage whose Qₘ is studied.
    #[arg(short = 'm', long = "stage")]
    pub m: usize,
    #[arg(long)]
    pub radii: String,
    #[arg(long, default_value_t = 16)]
    pub samples: usize,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Exp,
    Sin,
    Cos,
    Abs,
    One,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub pipeline: PipelineOpts,
    #[arg(short = 'm', long = "stage")]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub max_degree: usize,
    /// Half-width h of the box [-h, h]ⁿ; defaults to half the smallest stage radius εₖ, k ≤ m.
    #[arg(long = "box")]
    pub half_width: Option<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = koopman_core::observables::DEFAULT_GRID_POINTS)]
    pub grid: usize,
    /// Target applied to the real part of one coordinate.
    #[arg(long, value_enum, default_value_t = Target::Exp)]
    pub target: Target,
    /// 1-based coordinate fed to the target.
    #[arg(long, default_value_t = 1)]
    pub coord: usize,
    /// Leave constants out of the fitting basis.
    #[arg(long)]
    pub no_constant: bool,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = koopman_core::numerics::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

/// `a,b,c` or `start:end:count`.
pub fn parse_radii(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Usage(format!("--radii {s:?}: {what}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:end:count"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad("bad end"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        koopman_core::numerics::geometric_radii(start, end, count).map_err(|e| bad(&e.to_string()))
    } else {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| bad("expected comma-separated numbers"))
            })
            .collect()
    }
}

pub fn parse_alpha(s: &str, dim: usize) -> Result<koopman_core::MultiIndex, CliError> {
    let e = s
        .trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Usage(format!("--alpha {s:?}: expected comma-separated exponents")))?;
    if e.len() != dim {
        return Err(CliError::Usage(format!(
            "--alpha {s:?}: expected {dim} exponents, found {}",
            e.len()
        )));
    }
    Ok(koopman_core::MultiIndex::new(e))
}

pub fn parse_point(s: &str, dim: usize) -> Result<Vec<koopman_core::Complex64>, CliError> {
    use koopman_core::Complex64;
    let bad = |what: String| CliError::Usage(format!("--point: {what}"));
    let v: serde_json::Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
    let items = v.as_array().ok_or_else(|| bad("expected a JSON array".into()))?;
    let point = items
        .iter()
        .map(|item| match item {
            serde_json::Value::Number(n) => n.as_f64().map(|re| Complex64::new(re, 0.0)),
            serde_json::Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
                (Some(re), Some(im)) => Some(Complex64::new(re, im)),
                _ => None,
            },
            _ => None,
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad("entries must be numbers or [re, im] pairs".into()))?;
    if point.len() != dim {
        return Err(bad(format!("expected {dim} coordinates, found {}", point.len())));
    }
    Ok(point)
}
