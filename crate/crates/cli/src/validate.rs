//! Figure reproduction: Monte Carlo campaigns against the exact and
//! approximate laws, with per-p comparison tables and a KS summary.
//!
//! * `dw`: exact law vs simulation, `m = 100`, `q = 6`.
//! * `tw`: as `dw`, plus the Tracy–Widom approximation.
//! * `t1`: the Wishart asymptotic, `m = 96`, `q = 4`, x-axis multiplied by p.
//! * `t2`: random diagonal Σ per replicate, with and without the scale correction.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use serde::Serialize;

use roy_exact::beta_ensemble::{fmt_g17, run_replicates, simulate_empirical_cdf, EmpiricalCdf, EnsembleDraw, EnsembleParams};
use roy_exact::exact_dist::{cdf_curve, LargestRootLaw, Method};
use roy_exact::sampling::{sample_random_scale, RngStream, ScaleLaw, ScaleMatrix};
use roy_exact::scale_correction::estimate_scale_moments;

use crate::{create, CliError, CliResult, RunManifest, SCALE_STREAM};

pub const KS_EXACT_MAX: f64 = 0.02;
pub const TW_SUP_MAX: f64 = 0.05;
pub const KS_THEOREM1_MAX: f64 = 0.03;
pub const KS_CORRECTED_MAX: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Dw,
    Tw,
    T1,
    T2,
}

impl Figure {
    fn name(self) -> &'static str {
        match self {
            Figure::Dw => "dw",
            Figure::Tw => "tw",
            Figure::T1 => "t1",
            Figure::T2 => "t2",
        }
    }

    fn default_dims(self) -> (usize, usize) {
        match self {
            Figure::Dw | Figure::Tw => (100, 6),
            Figure::T1 | Figure::T2 => (96, 4),
        }
    }

    fn default_p_grid(self) -> Vec<usize> {
        match self {
            Figure::Dw | Figure::Tw => vec![200, 500, 1000, 2000],
            Figure::T1 | Figure::T2 => vec![500, 875, 1250, 1625, 2000],
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub figure: Figure,
    /// Simulations per p (t2: for the fixed-Σ run at the largest p).
    #[arg(long, default_value_t = 10_000)]
    pub n_sims: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated p values; defaults depend on the figure.
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    /// t2: random-Σ replicates per p.
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    /// t2: simulations within each replicate.
    #[arg(long, default_value_t = 100)]
    pub sims_per_replicate: usize,
    /// t2: law of the random scale matrices.
    #[arg(long, default_value = "uniform")]
    pub scale_law: String,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// One summary line; `threshold` and `pass` are empty for informational rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow {
    pub figure: &'static str,
    pub p: usize,
    pub metric: String,
    pub value: f64,
    pub threshold: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub outputs: Vec<String>,
}

impl ValidationReport {
    fn info(&mut self, figure: Figure, p: usize, metric: &str, value: f64) {
        self.rows.push(ValidationRow { figure: figure.name(), p, metric: metric.into(), value, threshold: None, pass: None });
    }

    /// Passes when `value <= threshold`.
    fn check(&mut self, figure: Figure, p: usize, metric: &str, value: f64, threshold: f64) {
        self.rows.push(ValidationRow {
            figure: figure.name(),
            p,
            metric: metric.into(),
            value,
            threshold: Some(threshold),
            pass: Some(value <= threshold),
        });
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationRow> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn value(&self, p: usize, metric: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.p == p && r.metric == metric).map(|r| r.value)
    }

    fn write_summary(&self, args: &ValidateArgs) -> CliResult<()> {
        let mut out = create(&args.out, "summary.csv")?;
        writeln!(out, "figure,p,metric,value,threshold,pass")?;
        for r in &self.rows {
            let threshold = r.threshold.map(fmt_g17).unwrap_or_default();
            let pass = r.pass.map(|b| b.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{},{}", r.figure, r.p, r.metric, fmt_g17(r.value), threshold, pass)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Comparison table: a shared grid, then one column per curve.
struct Table {
    header: Vec<&'static str>,
    columns: Vec<Vec<f64>>,
}

impl Table {
    fn write(&self, args: &ValidateArgs, name: &str) -> CliResult<()> {
        let mut out = create(&args.out, name)?;
        writeln!(out, "{}", self.header.join(","))?;
        for i in 0..self.columns[0].len() {
            let row: Vec<String> = self.columns.iter().map(|c| fmt_g17(c[i])).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn law_column(law: &LargestRootLaw, grid: &[f64]) -> CliResult<Vec<f64>> {
    Ok(cdf_curve(law, grid)?.fs)
}

fn ecdf_column(ecdf: &EmpiricalCdf, grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|&x| ecdf.eval(x)).collect()
}

/// `sup |F - G|` over `[F⁻¹(lo), F⁻¹(hi)]` on a 1000-point grid.
fn central_sup(reference: &LargestRootLaw, other: &LargestRootLaw, lo: f64, hi: f64) -> CliResult<f64> {
    let (a, b) = (reference.quantile(lo)?, reference.quantile(hi)?);
    let grid = roy_exact::beta_ensemble::linspace(a, b, 1000);
    let f = law_column(reference, &grid)?;
    let g = law_column(other, &grid)?;
    Ok(f.iter().zip(&g).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs one figure, writing `<figure>_p<p>.csv` per p and `summary.csv`.
/// Threshold failures are reported in the returned rows, not as errors.
pub fn cmd_validate(args: &ValidateArgs) -> CliResult<ValidationReport> {
    let started = Instant::now();
    let figure = args.figure;
    let (dm, dq) = figure.default_dims();
    let (m, q) = (args.m.unwrap_or(dm), args.q.unwrap_or(dq));
    let p_grid = args.p_grid.clone().unwrap_or_else(|| figure.default_p_grid());
    if p_grid.is_empty() || args.n_sims == 0 {
        return Err(CliError::Usage("need at least one p and --n-sims >= 1".into()));
    }
    let params: Vec<EnsembleParams> = p_grid.iter().map(|&p| EnsembleParams::new(p, m, q)).collect::<Result<_, _>>()?;
    let mut report = ValidationReport::default();
    match figure {
        Figure::Dw | Figure::Tw => {
            for &e in &params {
                let sim = simulate_empirical_cdf(args.seed, e, &ScaleMatrix::identity(e.p), args.n_sims)?;
                let exact = LargestRootLaw::new(e, Method::Exact)?;
                report.check(figure, e.p, "ks_exact", sim.ecdf.try_ks_distance(|x| exact.cdf(x))?, KS_EXACT_MAX);
                let grid = sim.ecdf.default_grid();
                let mut table = Table {
                    header: vec!["x", "exact", "empirical"],
                    columns: vec![grid.clone(), law_column(&exact, &grid)?, ecdf_column(&sim.ecdf, &grid)],
                };
                if figure == Figure::Tw {
                    let tw = LargestRootLaw::new(e, Method::Tw)?;
                    report.info(figure, e.p, "ks_tw", sim.ecdf.try_ks_distance(|x| tw.cdf(x))?);
                    report.check(figure, e.p, "sup_tw_exact_central98", central_sup(&exact, &tw, 0.01, 0.99)?, TW_SUP_MAX);
                    table.header.push("approx");
                    table.columns.push(law_column(&tw, &grid)?);
                }
                let name = format!("{}_p{}.csv", figure.name(), e.p);
                table.write(args, &name)?;
                report.outputs.push(name);
            }
        }
        Figure::T1 => {
            let largest = params.iter().map(|e| e.p).max().expect("nonempty");
            let mut ks_t1 = Vec::new();
            for &e in &params {
                let sim = simulate_empirical_cdf(args.seed, e, &ScaleMatrix::identity(e.p), args.n_sims)?;
                let exact = LargestRootLaw::new(e, Method::Exact)?;
                let t1 = LargestRootLaw::new(e, Method::Theorem1)?;
                report.check(figure, e.p, "ks_exact", sim.ecdf.try_ks_distance(|x| exact.cdf(x))?, KS_EXACT_MAX);
                let ks = sim.ecdf.try_ks_distance(|x| t1.cdf(x))?;
                ks_t1.push(ks);
                if e.p == largest {
                    report.check(figure, e.p, "ks_theorem1", ks, KS_THEOREM1_MAX);
                } else {
                    report.info(figure, e.p, "ks_theorem1", ks);
                }
                let lambda = sim.ecdf.default_grid();
                let scaled: Vec<f64> = lambda.iter().map(|l| l * e.p as f64).collect();
                let table = Table {
                    header: vec!["x", "lambda", "exact", "empirical", "approx"],
                    columns: vec![
                        scaled,
                        lambda.clone(),
                        law_column(&exact, &lambda)?,
                        ecdf_column(&sim.ecdf, &lambda),
                        law_column(&t1, &lambda)?,
                    ],
                };
                let name = format!("t1_p{}.csv", e.p);
                table.write(args, &name)?;
                report.outputs.push(name);
            }
            // in p order; positive means KS went up somewhere
            let mut order: Vec<usize> = (0..params.len()).collect();
            order.sort_by_key(|&i| params[i].p);
            let worst_rise = order.windows(2).map(|w| ks_t1[w[1]] - ks_t1[w[0]]).fold(f64::NEG_INFINITY, f64::max);
            if params.len() > 1 {
                report.check(figure, largest, "ks_theorem1_max_increase_over_p", worst_rise, 0.0);
            }
        }
        Figure::T2 => t2(args, &params, &mut report)?,
    }
    report.write_summary(args)?;
    report.outputs.push("summary.csv".into());
    RunManifest::new("validate", args, Some(args.seed), started, report.outputs.clone()).write(&args.out)?;
    Ok(report)
}

/// Largest roots and per-draw `b̂` from the A factor.
fn corrected_campaign(seed: u64, e: EnsembleParams, sigma: &ScaleMatrix, n: usize) -> CliResult<(EmpiricalCdf, f64)> {
    let run = run_replicates(seed, n, |rng| {
        let draw = EnsembleDraw::sample(rng, e, sigma)?;
        let b = estimate_scale_moments(&draw.a, e.m, e.p)?.b;
        Ok((draw.reduced_largest()?, b))
    })?;
    let b_mean = run.values.iter().map(|v| v.1).sum::<f64>() / n as f64;
    let ecdf = EmpiricalCdf::new(run.values.into_iter().map(|v| v.0).collect())?;
    Ok((ecdf, b_mean))
}

/// Each replicate draws its own Σ (stream `SCALE_STREAM + 1 + r` of the run
/// seed, shared across p) and its own simulation seed; the corrected curve
/// uses the replicate's mean `b̂`. The fixed-Σ run uses stream `SCALE_STREAM`,
/// the same Σ `simulate --sigma random:LAW` draws for that seed.
fn t2(args: &ValidateArgs, params: &[EnsembleParams], report: &mut ValidationReport) -> CliResult<()> {
    let figure = Figure::T2;
    let law: ScaleLaw = args.scale_law.parse()?;
    if args.replicates == 0 || args.sims_per_replicate == 0 {
        return Err(CliError::Usage("--replicates and --sims-per-replicate must be at least 1".into()));
    }
    let replicate_seed = |r: usize| args.seed ^ ((r as u64 + 1) << 32);
    for &e in params {
        let t1 = LargestRootLaw::new(e, Method::Theorem1)?;
        let mut corrected = Vec::with_capacity(args.replicates);
        let mut uncorrected = Vec::with_capacity(args.replicates);
        let mut first = None;
        for r in 0..args.replicates {
            let sigma = sample_random_scale(&mut RngStream::new(args.seed, SCALE_STREAM + 1 + r as u64).rng(), e.p, law)?;
            let (ecdf, b) = corrected_campaign(replicate_seed(r), e, &sigma, args.sims_per_replicate)?;
            let t2 = LargestRootLaw::new(e, Method::Theorem2 { b })?;
            corrected.push(ecdf.try_ks_distance(|x| t2.cdf(x))?);
            uncorrected.push(ecdf.try_ks_distance(|x| t1.cdf(x))?);
            if r == 0 {
                first = Some((ecdf, t2));
            }
        }
        let (mc, mu) = (median(&corrected), median(&uncorrected));
        report.info(figure, e.p, "median_ks_corrected", mc);
        report.info(figure, e.p, "median_ks_uncorrected", mu);
        report.check(figure, e.p, "median_ks_corrected_minus_uncorrected", mc - mu, 0.0);

        let (ecdf, t2) = first.expect("at least one replicate");
        let name = format!("t2_p{}.csv", e.p);
        write_t2_table(args, &name, e, &ecdf, &t2, &t1)?;
        report.outputs.push(name);
    }

    let e = *params.iter().max_by_key(|e| e.p).expect("nonempty");
    let sigma = sample_random_scale(&mut RngStream::new(args.seed, SCALE_STREAM).rng(), e.p, law)?;
    let (ecdf, b) = corrected_campaign(args.seed, e, &sigma, args.n_sims)?;
    let t1 = LargestRootLaw::new(e, Method::Theorem1)?;
    let t2 = LargestRootLaw::new(e, Method::Theorem2 { b })?;
    report.info(figure, e.p, "fixed_sigma_b_hat", b);
    report.info(figure, e.p, "fixed_sigma_ks_uncorrected", ecdf.try_ks_distance(|x| t1.cdf(x))?);
    report.check(figure, e.p, "fixed_sigma_ks_corrected", ecdf.try_ks_distance(|x| t2.cdf(x))?, KS_CORRECTED_MAX);
    let name = format!("t2_fixed_sigma_p{}.csv", e.p);
    write_t2_table(args, &name, e, &ecdf, &t2, &t1)?;
    report.outputs.push(name);
    Ok(())
}

fn write_t2_table(
    args: &ValidateArgs,
    name: &str,
    e: EnsembleParams,
    ecdf: &EmpiricalCdf,
    corrected: &LargestRootLaw,
    uncorrected: &LargestRootLaw,
) -> CliResult<()> {
    let lambda = ecdf.default_grid();
    Table {
        header: vec!["x", "lambda", "empirical", "approx", "uncorrected"],
        columns: vec![
            lambda.iter().map(|l| l * e.p as f64).collect(),
            lambda.clone(),
            ecdf_column(ecdf, &lambda),
            law_column(corrected, &lambda)?,
            law_column(uncorrected, &lambda)?,
        ],
    }
    .write(args, name)
}
