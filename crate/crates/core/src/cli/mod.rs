//! Command-line front end.
//!
//! Every command writes machine-clean CSV (to `--out` or stdout) and, when
//! writing to a file, a sibling `<out>.manifest.json` that records the exact
//! arguments. `wzec replay <manifest>` re-runs a command from its manifest.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error,
//! 3 numerical failure (non-convergence, no feasible power).

mod commands;
pub mod grid;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::quadrature::QuadratureConfig;
use crate::mc::MonteCarloConfig;
use crate::non_zec::SearchConfig;
use crate::zec;

pub use grid::Grid;
pub use manifest::{manifest_path, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable holding the default worker-thread count.
pub const THREADS_ENV: &str = "WZEC_THREADS";

/// Defaults for every tunable, overridable by a TOML file and then by flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub quadrature: QuadratureConfig,
    pub mc: MonteCarloConfig,
    pub search: SearchConfig,
    /// Bisection tolerance on `P*`.
    pub tol_p: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            mc: MonteCarloConfig::default(),
            search: SearchConfig::default(),
            tol_p: zec::DEFAULT_TOL_P,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wzec",
    version,
    about = "Power/estimation cost curves for the causal-encoder Witsenhausen counterexample"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML file overriding the built-in defaults
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: $WZEC_THREADS, else all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Initial Gauss–Hermite nodes per axis
    #[arg(long, global = true)]
    pub hermite_nodes: Option<usize>,
    /// Monte-Carlo sample count
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Monte-Carlo seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-point strategy costs on an a-grid or S₂(P) on a power grid
    TwoPoint(TwoPointArgs),
    /// Minimum ZEC power P* for one noise level or a noise grid
    Pstar(PstarArgs),
    /// Non-ZEC minimum cost curve or admissible cost region
    Nonzec(NonZecArgs),
    /// Lower convex (time-sharing) envelope of curve files
    Envelope(EnvelopeArgs),
    /// Check analytic costs against Monte-Carlo simulation
    Verify(VerifyArgs),
    /// Re-run a command from its manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    #[arg(long = "Q", visible_alias = "q")]
    pub q: f64,
    #[arg(long = "N", visible_alias = "n")]
    pub n: f64,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("grid").required(true).args(["a", "a_grid", "p_grid"])))]
pub struct TwoPointArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated signal levels
    #[arg(long, value_delimiter = ',')]
    pub a: Option<Vec<f64>>,
    #[arg(long)]
    pub a_grid: Option<Grid>,
    #[arg(long)]
    pub p_grid: Option<Grid>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("noise").required(true).args(["n", "n_grid"])))]
pub struct PstarArgs {
    #[arg(long = "Q", visible_alias = "q")]
    pub q: f64,
    #[arg(long = "N", visible_alias = "n")]
    pub n: Option<f64>,
    #[arg(long)]
    pub n_grid: Option<Grid>,
    /// Bisection tolerance on P
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum NonZecMode {
    Min,
    Region,
}

#[derive(Debug, Args)]
pub struct NonZecArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub p_grid: Grid,
    #[arg(long, value_enum, default_value = "min")]
    pub mode: NonZecMode,
    /// γ values for region mode
    #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.5")]
    pub gammas: Vec<f64>,
    /// γ grid points in [0, 0.5] for min mode
    #[arg(long)]
    pub gamma_points: Option<usize>,
    /// a grid points per power interval
    #[arg(long)]
    pub a_points: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    /// Two-column CSV curve files
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum VerifyScheme {
    TwoPoint,
    NonZec,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value = "two-point")]
    pub scheme: VerifyScheme,
    #[arg(long)]
    pub a: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v1: f64,
    /// Width of the agreement band in standard errors
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
    /// Absolute slack added to the band (quadrature accuracy)
    #[arg(long, default_value_t = 1e-9)]
    pub floor: f64,
    /// JSON report destination
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this path instead of the recorded output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::NonConvergence { .. } | Error::NoUpperBound { .. } | Error::Monotonicity(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn load_settings(global: &GlobalArgs) -> Result<Settings> {
    let mut s = match &global.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str(&text).map_err(|e| Error::Parse {
                source_name: path.display().to_string(),
                line: e.span().map_or(0, |sp| text[..sp.start].lines().count().max(1)),
                message: e.message().to_string(),
            })?
        }
        None => Settings::default(),
    };
    if let Some(v) = global.rel_tol {
        s.quadrature.rel_tol = v;
    }
    if let Some(v) = global.abs_tol {
        s.quadrature.abs_tol = v;
    }
    if let Some(v) = global.hermite_nodes {
        s.quadrature.hermite_nodes = v;
    }
    if let Some(v) = global.samples {
        s.mc.samples = v;
    }
    if let Some(v) = global.seed {
        s.mc.seed = v;
    }
    s.quadrature.validate()?;
    s.mc.validate()?;
    Ok(s)
}

fn configure_threads(global: &GlobalArgs) {
    let threads = global
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        // the global pool can only be set once per process
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("rayon pool already initialised; --threads ignored");
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads(&cli.global);
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::dispatch(cli, argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
