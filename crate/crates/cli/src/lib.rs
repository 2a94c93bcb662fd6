//! Command-line front end: CDF tables, p-values, simulation campaigns and
//! figure-reproduction runs, each written next to a `manifest.json`.

mod validate;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use roy_exact::beta_ensemble::{linspace, simulate_empirical_cdf, EnsembleParams, Simulation};
use roy_exact::exact_dist::{cdf_curve, p_value, CdfCurve, LargestRootLaw, Method};
use roy_exact::sampling::{parse_csv_matrix, sample_random_scale, RngStream, ScaleLaw, ScaleMatrix};
use roy_exact::scale_correction::{estimate_from_factor, estimate_from_matrix, scale_moments_exact};

pub use validate::{cmd_validate, Figure, ValidateArgs, ValidationReport, ValidationRow};

/// Stream reserved for drawing a random scale matrix, far from replicate streams.
pub const SCALE_STREAM: u64 = 1 << 62;

#[derive(Debug, Parser)]
#[command(name = "roy-exact", version, about = "Largest-root laws of the doubly singular beta ensemble")]
pub struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true, env = "ROY_EXACT_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a largest-root CDF on a grid.
    Cdf(CdfArgs),
    /// P-value of an observed largest root.
    Pvalue(PvalueArgs),
    /// Monte Carlo sample of the largest root.
    Simulate(SimulateArgs),
    /// Reproduce a figure: Monte Carlo against the formulas, with KS thresholds.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Exact,
    Theorem1,
    Theorem2,
    Tw,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub q: usize,
}

impl EnsembleArgs {
    pub fn params(&self) -> Result<EnsembleParams, CliError> {
        Ok(EnsembleParams::new(self.p, self.m, self.q)?)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CdfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.0)]
    pub grid_min: f64,
    /// Upper grid end; defaults to 1.25 × the 0.999 quantile of the law.
    #[arg(long)]
    pub grid_max: Option<f64>,
    #[arg(long, default_value_t = 512)]
    pub grid_points: usize,
    /// Scale factor for theorem2.
    #[arg(long, conflicts_with = "sigma")]
    pub b: Option<f64>,
    /// p×p scale matrix CSV; b is computed from it for theorem2.
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PvalueArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    /// Observed largest root.
    #[arg(long)]
    pub stat: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, conflicts_with_all = ["sigma", "data"])]
    pub b: Option<f64>,
    #[arg(long, conflicts_with = "data")]
    pub sigma: Option<PathBuf>,
    /// Data CSV for scale estimation (implies theorem2): a p×m factor `Z`
    /// with `A = Z Zᵀ`, or the p×p matrix `A` with `--data-matrix`.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, requires = "data")]
    pub data_matrix: bool,
    /// Also write `manifest.json` into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 10_000)]
    pub n_sims: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `identity`, a p×p CSV file, or `random:LAW` (`uniform`,
    /// `uniform:LO,HI`, `lognormal:S`, `ar1:R`).
    #[arg(long, default_value = "identity")]
    pub sigma: String,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] roy_exact::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
}

impl CliError {
    /// 2 invalid input, 3 unsupported by the exact engine, 4 replicate
    /// failures, 5 failed validation thresholds, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use roy_exact::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) => match e {
                E::UnsupportedParams(_) => 3,
                E::ReplicateFailure { .. } | E::RankDeficient { .. } => 4,
                _ => 2,
            },
            CliError::ValidationFailed(_) => 5,
            CliError::Io(_) | CliError::Pool(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Provenance record written beside every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub duration_seconds: f64,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new<A: Serialize>(command: &str, args: &A, seed: Option<u64>, started: Instant, outputs: Vec<String>) -> Self {
        let params = match serde_json::to_value(args).expect("arguments serialize") {
            serde_json::Value::Object(map) => map.into_iter().collect(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        RunManifest {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            duration_seconds: started.elapsed().as_secs_f64(),
            outputs,
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(dir.join("manifest.json"), text)?;
        Ok(())
    }
}

pub(crate) fn create(dir: &Path, name: &str) -> CliResult<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn method_for(method: MethodArg, b: Option<f64>) -> CliResult<Method> {
    Ok(match method {
        MethodArg::Exact => Method::Exact,
        MethodArg::Theorem1 => Method::Theorem1,
        MethodArg::Tw => Method::Tw,
        MethodArg::Theorem2 => Method::Theorem2 {
            b: b.ok_or_else(|| CliError::Usage("--method theorem2 needs --b VALUE or --sigma FILE".into()))?,
        },
    })
}

fn b_from_sigma(path: &Path, p: usize) -> CliResult<f64> {
    let sigma = ScaleMatrix::from_csv(path)?;
    if sigma.order() != p {
        return Err(CliError::Usage(format!("--sigma is {0}x{0} but --p is {p}", sigma.order())));
    }
    Ok(scale_moments_exact(&sigma).b)
}

/// Writes `cdf.csv` (`x,F`) and `manifest.json`.
pub fn cmd_cdf(args: &CdfArgs) -> CliResult<CdfCurve> {
    let started = Instant::now();
    let params = args.ensemble.params()?;
    let b = match (&args.sigma, args.b) {
        (Some(path), _) => Some(b_from_sigma(path, params.p)?),
        (None, b) => b,
    };
    let law = LargestRootLaw::new(params, method_for(args.method, b)?)?;
    if args.grid_points == 0 {
        return Err(CliError::Usage("--grid-points must be at least 1".into()));
    }
    let grid_max = match args.grid_max {
        Some(v) => v,
        None => 1.25 * law.quantile(0.999)?,
    };
    if !(args.grid_min >= 0.0 && grid_max >= args.grid_min) {
        return Err(CliError::Usage(format!("need 0 <= --grid-min <= --grid-max, got {} and {grid_max}", args.grid_min)));
    }
    let curve = cdf_curve(&law, &linspace(args.grid_min, grid_max, args.grid_points))?;
    let mut out = create(&args.out, "cdf.csv")?;
    curve.write_csv(&mut out)?;
    out.flush()?;
    RunManifest::new("cdf", args, None, started, vec!["cdf.csv".into()]).write(&args.out)?;
    Ok(curve)
}

#[derive(Debug, Clone, Serialize)]
pub struct PValueReport {
    pub p_value: f64,
    pub method: MethodArg,
    pub params: EnsembleArgs,
    pub b_used: Option<f64>,
}

/// Computes the p-value; `--data` estimates `b` and switches to theorem2.
pub fn cmd_pvalue(args: &PvalueArgs) -> CliResult<PValueReport> {
    let started = Instant::now();
    let params = args.ensemble.params()?;
    let (method, b) = if let Some(path) = &args.data {
        let text = std::fs::read_to_string(path)?;
        let data = parse_csv_matrix(&text)?;
        let stats = if args.data_matrix {
            if data.shape() != (params.p, params.p) {
                return Err(CliError::Usage(format!("--data-matrix must be {0}x{0}, got {1}x{2}", params.p, data.nrows(), data.ncols())));
            }
            estimate_from_matrix(&data, params.m)?
        } else {
            if data.shape() != (params.p, params.m) {
                return Err(CliError::Usage(format!(
                    "--data factor must be {}x{} (p x m), got {}x{}",
                    params.p,
                    params.m,
                    data.nrows(),
                    data.ncols()
                )));
            }
            estimate_from_factor(&data)?
        };
        if args.method != MethodArg::Theorem2 {
            log::info!("--data given: using theorem2 with estimated b = {}", stats.b);
        }
        (MethodArg::Theorem2, Some(stats.b))
    } else {
        let b = match (&args.sigma, args.b) {
            (Some(path), _) => Some(b_from_sigma(path, params.p)?),
            (None, b) => b,
        };
        (args.method, if args.method == MethodArg::Theorem2 { b } else { None })
    };
    let value = p_value(params, args.stat, method_for(method, b)?)?;
    let report = PValueReport { p_value: value, method, params: args.ensemble.clone(), b_used: b };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)?;
        RunManifest::new("pvalue", args, None, started, vec![]).write(dir)?;
    }
    Ok(report)
}

/// How `--sigma` was specified.
#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    Identity,
    File(PathBuf),
    Random(ScaleLaw),
}

impl FromStr for SigmaSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        if s == "identity" {
            Ok(SigmaSpec::Identity)
        } else if let Some(law) = s.strip_prefix("random:") {
            Ok(SigmaSpec::Random(law.parse().map_err(|e: roy_exact::Error| CliError::Usage(e.to_string()))?))
        } else {
            Ok(SigmaSpec::File(PathBuf::from(s)))
        }
    }
}

impl SigmaSpec {
    /// Random laws draw Σ from stream `(seed, SCALE_STREAM)`.
    pub fn resolve(&self, p: usize, seed: u64) -> CliResult<ScaleMatrix> {
        let scale = match self {
            SigmaSpec::Identity => ScaleMatrix::identity(p),
            SigmaSpec::File(path) => ScaleMatrix::from_csv(path)?,
            SigmaSpec::Random(law) => sample_random_scale(&mut RngStream::new(seed, SCALE_STREAM).rng(), p, *law)?,
        };
        if scale.order() != p {
            return Err(CliError::Usage(format!("--sigma is {0}x{0} but --p is {p}", scale.order())));
        }
        Ok(scale)
    }
}

/// Writes the sorted sample as `empirical.csv` (`x,F`) and `manifest.json`.
pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<Simulation> {
    let started = Instant::now();
    let params = args.ensemble.params()?;
    if args.n_sims == 0 {
        return Err(CliError::Usage("--n-sims must be at least 1".into()));
    }
    let scale = args.sigma.parse::<SigmaSpec>()?.resolve(params.p, args.seed)?;
    let sim = simulate_empirical_cdf(args.seed, params, &scale, args.n_sims)?;
    if sim.resampled > 0 {
        log::warn!("{} replicate(s) were resampled after rank-deficient draws", sim.resampled);
    }
    let mut out = create(&args.out, "empirical.csv")?;
    sim.ecdf.write_csv(&mut out)?;
    out.flush()?;
    RunManifest::new("simulate", args, Some(args.seed), started, vec!["empirical.csv".into()]).write(&args.out)?;
    Ok(sim)
}

/// Runs a parsed command line inside a pool of the requested size.
pub fn run(cli: Cli) -> CliResult<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    pool.install(|| match &cli.command {
        Command::Cdf(args) => cmd_cdf(args).map(|_| ()),
        Command::Pvalue(args) => {
            let report = cmd_pvalue(args)?;
            println!("{}", serde_json::to_string(&report).expect("report serializes"));
            Ok(())
        }
        Command::Simulate(args) => cmd_simulate(args).map(|_| ()),
        Command::Validate(args) => {
            let report = cmd_validate(args)?;
            let failed: Vec<String> = report.failures().map(|r| format!("p={} {}", r.p, r.metric)).collect();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::ValidationFailed(failed.join(", ")))
            }
        }
    })
}
