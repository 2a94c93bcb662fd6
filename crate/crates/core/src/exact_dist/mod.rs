//! Exact and approximate CDFs of the ensemble's largest root.
//!
//! * [`double_wishart_max_cdf`]: largest root of `W_s(num) · W_s(den)⁻¹`,
//!   exact, via a Pfaffian of Jacobi-weight integrals.
//! * [`theorem3_cdf`]: the ensemble's exact law, the double-Wishart CDF at
//!   `(s = q, num = m, den = p - m + q)`.
//! * [`wishart_max_cdf`] / [`theorem1_cdf`]: largest root of `W_s(n, I)`,
//!   exact, and the `p → ∞` law `max eig{W_q(m, I)} / p` built on it.
//! * [`tw_cdf`]: Tracy–Widom approximation on the logit scale.

mod pfaffian_cdf;
mod tracy_widom;

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::beta_ensemble::EnsembleParams;
use crate::error::{Error, Result};
use crate::matrix_core::special::{ln_beta, ln_gamma};
use crate::scale_correction::corrected_cdf;
use pfaffian_cdf::{PfaffianCdf, Weight};

pub use tracy_widom::{tw1_cdf, JohnstoneCentering, Tw1Table};

/// Largest dimension the Pfaffian engine attempts. Below it, parameters are
/// still refused when the normalizing Pfaffian misses its closed form by more
/// than [`MAX_NORM_DEVIATION`].
pub const MAX_EXACT_DIM: usize = 30;

/// `(s, num, den)` for the largest root of `W_s(num, I) · W_s(den, I)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DoubleWishartParams {
    pub s: usize,
    pub num_dof: usize,
    pub den_dof: usize,
}

impl DoubleWishartParams {
    pub fn new(s: usize, num_dof: usize, den_dof: usize) -> Result<Self> {
        if s == 0 || num_dof == 0 {
            return Err(Error::InvalidParams(format!("need s >= 1 and num_dof >= 1 (s={s}, num={num_dof})")));
        }
        if den_dof < s {
            return Err(Error::InvalidParams(format!("denominator must be invertible: den_dof={den_dof} < s={s}")));
        }
        Ok(DoubleWishartParams { s, num_dof, den_dof })
    }

    /// The ensemble's law `W_m(q) · W_m(p)⁻¹`, before duality.
    pub fn from_ensemble(params: EnsembleParams) -> Self {
        DoubleWishartParams { s: params.m, num_dof: params.q, den_dof: params.p }
    }
}

/// `λ_max(P, M, N) = λ_max(N, M + N - P, P)` with `P = s`, `M = den`,
/// `N = num`. An involution that leaves the largest-root law unchanged.
pub fn mardia_dual(params: DoubleWishartParams) -> DoubleWishartParams {
    let DoubleWishartParams { s, num_dof, den_dof } = params;
    DoubleWishartParams { s: num_dof, num_dof: s, den_dof: den_dof + num_dof - s }
}

/// `x^{α-1} (1-x)^{β-1}` on `[0, 1]`, integrated in `z = logit x`.
struct JacobiWeight {
    alpha: f64,
    beta: f64,
    ln_norm: f64,
}

impl JacobiWeight {
    fn new(alpha: f64, beta: f64) -> Self {
        JacobiWeight { alpha, beta, ln_norm: ln_beta(alpha, beta) }
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

impl Weight for JacobiWeight {
    fn to_x(&self, z: f64) -> f64 {
        1.0 / (1.0 + (-z).exp())
    }

    fn to_z(&self, x: f64) -> f64 {
        if x <= 0.0 {
            f64::NEG_INFINITY
        } else if x >= 1.0 {
            f64::INFINITY
        } else {
            x.ln() - (-x).ln_1p()
        }
    }

    fn ln_density(&self, z: f64) -> f64 {
        -self.alpha * softplus(-z) - self.beta * softplus(z) - self.ln_norm
    }

    fn mode_scale(&self) -> (f64, f64) {
        let (a, b) = (self.alpha, self.beta);
        ((a / b).ln(), ((a + b) / (a * b)).sqrt())
    }

    // Selberg: ∫_{[0,1]^s} ∏ x^{α-1} (1-x)^{β-1} |V(x)| dx
    //   = ∏_j Γ(α + j/2) Γ(β + j/2) Γ(1 + (j+1)/2) / (Γ(α + β + (s+j-1)/2) Γ(3/2))
    fn ln_ordered_selberg(&self, dim: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let ln_selberg: f64 = (0..dim)
            .map(|j| {
                let j = j as f64;
                ln_gamma(a + j / 2.0) + ln_gamma(b + j / 2.0) + ln_gamma(1.0 + (j + 1.0) / 2.0)
                    - ln_gamma(a + b + (dim as f64 + j - 1.0) / 2.0)
                    - ln_gamma(1.5)
            })
            .sum();
        ln_selberg - ln_gamma(dim as f64 + 1.0) - dim as f64 * self.ln_norm
    }
}

/// `u^{α-1} e^{-u}` on `[0, ∞)`, integrated in `z = ln u`.
struct LaguerreWeight {
    alpha: f64,
    ln_norm: f64,
}

impl LaguerreWeight {
    fn new(alpha: f64) -> Self {
        LaguerreWeight { alpha, ln_norm: ln_gamma(alpha) }
    }
}

impl Weight for LaguerreWeight {
    fn to_x(&self, z: f64) -> f64 {
        z.exp()
    }

    fn to_z(&self, x: f64) -> f64 {
        if x <= 0.0 {
            f64::NEG_INFINITY
        } else {
            x.ln()
        }
    }

    fn ln_density(&self, z: f64) -> f64 {
        self.alpha * z - z.exp() - self.ln_norm
    }

    fn mode_scale(&self) -> (f64, f64) {
        (self.alpha.ln(), 1.0 / self.alpha.sqrt())
    }

    // ∫_{[0,∞)^s} ∏ u^{α-1} e^{-u} |V(u)| du = ∏_j Γ(α + j/2) Γ(1 + (j+1)/2) / Γ(3/2)
    fn ln_ordered_selberg(&self, dim: usize) -> f64 {
        let a = self.alpha;
        let ln_selberg: f64 = (0..dim)
            .map(|j| {
                let j = j as f64;
                ln_gamma(a + j / 2.0) + ln_gamma(1.0 + (j + 1.0) / 2.0) - ln_gamma(1.5)
            })
            .sum();
        ln_selberg - ln_gamma(dim as f64 + 1.0) - dim as f64 * self.ln_norm
    }
}

fn check_engine_dim(s: usize) -> Result<()> {
    if s > MAX_EXACT_DIM {
        return Err(Error::UnsupportedParams(format!(
            "exact engine supports min dimension <= {MAX_EXACT_DIM}, got {s}"
        )));
    }
    Ok(())
}

/// Relative error of the normalizing Pfaffian above which the engine refuses.
pub const MAX_NORM_DEVIATION: f64 = 1e-6;

fn check_accuracy(deviation: f64, what: &str) -> Result<()> {
    if !(deviation <= MAX_NORM_DEVIATION) {
        log::warn!("{what}: normalizing Pfaffian off its closed form by {deviation:e}");
        return Err(Error::UnsupportedParams(format!(
            "{what}: normalizing Pfaffian off its closed form by {deviation:e} (limit {MAX_NORM_DEVIATION:e})"
        )));
    }
    if deviation > 1e-10 {
        log::warn!("{what}: normalizing Pfaffian off its closed form by {deviation:e}; expect reduced accuracy");
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("CDF argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// Reusable evaluator for the largest root of `W_s(num) · W_s(den)⁻¹`.
pub struct DoubleWishartCdf {
    params: DoubleWishartParams,
    engine: PfaffianCdf<JacobiWeight>,
}

impl DoubleWishartCdf {
    pub fn new(params: DoubleWishartParams) -> Result<Self> {
        DoubleWishartParams::new(params.s, params.num_dof, params.den_dof)?;
        // the Jacobi density needs a nonsingular numerator; otherwise use the dual
        let canon = if params.num_dof >= params.s { params } else { mardia_dual(params) };
        let s = canon.s;
        check_engine_dim(s)?;
        let family =
            JacobiWeight::new((canon.num_dof - s + 1) as f64 / 2.0, (canon.den_dof - s + 1) as f64 / 2.0);
        let engine = PfaffianCdf::new(family, s);
        check_accuracy(engine.norm_deviation(), "double Wishart CDF")?;
        Ok(DoubleWishartCdf { params, engine })
    }

    pub fn params(&self) -> DoubleWishartParams {
        self.params
    }

    /// Relative error of the computed normalizing Pfaffian against its
    /// Selberg closed form; CDF values carry errors of the same order.
    pub fn norm_deviation(&self) -> f64 {
        self.engine.norm_deviation()
    }

    /// `P(λ_max ≤ x)` on the F scale, via `θ = x / (1 + x)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        if x.is_infinite() {
            return Ok(1.0);
        }
        Ok(self.engine.cdf(x / (1.0 + x)))
    }

    /// `P(θ_max ≤ θ)` on the Jacobi (Roy) scale.
    pub fn cdf_theta(&self, theta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Domain(format!("theta must be in [0, 1], got {theta}")));
        }
        Ok(self.engine.cdf(theta))
    }
}

pub fn double_wishart_max_cdf(params: DoubleWishartParams, x: f64) -> Result<f64> {
    DoubleWishartCdf::new(params)?.cdf(x)
}

/// Reusable evaluator for the largest eigenvalue of `W_dim(dof, I)`.
pub struct WishartMaxCdf {
    engine: PfaffianCdf<LaguerreWeight>,
}

impl WishartMaxCdf {
    pub fn new(dim: usize, dof: usize) -> Result<Self> {
        if dim == 0 || dof == 0 {
            return Err(Error::InvalidParams(format!("Wishart needs dim, dof >= 1 (dim={dim}, dof={dof})")));
        }
        // nonzero spectra of Z Zᵀ and Zᵀ Z coincide
        let (s, n) = (dim.min(dof), dim.max(dof));
        check_engine_dim(s)?;
        let engine = PfaffianCdf::new(LaguerreWeight::new((n - s + 1) as f64 / 2.0), s);
        check_accuracy(engine.norm_deviation(), "Wishart CDF")?;
        Ok(WishartMaxCdf { engine })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        Ok(self.engine.cdf(x / 2.0))
    }

    /// See [`DoubleWishartCdf::norm_deviation`].
    pub fn norm_deviation(&self) -> f64 {
        self.engine.norm_deviation()
    }
}

pub fn wishart_max_cdf(dim: usize, dof: usize, x: f64) -> Result<f64> {
    WishartMaxCdf::new(dim, dof)?.cdf(x)
}

/// The dual double-Wishart parameters of the ensemble, `(q, m, p - m + q)`.
pub fn ensemble_double_wishart(params: EnsembleParams) -> DoubleWishartParams {
    mardia_dual(DoubleWishartParams::from_ensemble(params))
}

/// Exact largest-root CDF of the ensemble with identity scale.
pub fn theorem3_cdf(params: EnsembleParams, x: f64) -> Result<f64> {
    DoubleWishartCdf::new(ensemble_double_wishart(params))?.cdf(x)
}

/// `p → ∞` asymptotic: `P(max eig{W_q(m, I)} ≤ p x)`.
pub fn theorem1_cdf(params: EnsembleParams, x: f64) -> Result<f64> {
    check_x(x)?;
    wishart_max_cdf(params.q, params.m, params.p as f64 * x)
}

/// Tracy–Widom approximation with Johnstone's logit-scale centering.
pub fn tw_cdf(params: EnsembleParams, x: f64) -> Result<f64> {
    check_x(x)?;
    let centering = JohnstoneCentering::for_ensemble(params);
    Ok(centering.cdf(x))
}

/// Which law to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Exact,
    Theorem1,
    /// Scale-corrected asymptotic with factor `b`.
    Theorem2 { b: f64 },
    Tw,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Theorem1 => "theorem1",
            Method::Theorem2 { .. } => "theorem2",
            Method::Tw => "tw",
        }
    }
}

/// A prepared CDF for one `(params, method)`; constants are computed once.
pub enum LargestRootLaw {
    Exact(DoubleWishartCdf),
    Asymptotic { wishart: WishartMaxCdf, factor: f64 },
    Tw(JohnstoneCentering),
}

impl LargestRootLaw {
    pub fn new(params: EnsembleParams, method: Method) -> Result<Self> {
        Ok(match method {
            Method::Exact => LargestRootLaw::Exact(DoubleWishartCdf::new(ensemble_double_wishart(params))?),
            Method::Theorem1 => {
                LargestRootLaw::Asymptotic { wishart: WishartMaxCdf::new(params.q, params.m)?, factor: params.p as f64 }
            }
            Method::Theorem2 { b } => {
                if !(b > 0.0) || !b.is_finite() {
                    return Err(Error::Domain(format!("scale factor b must be positive, got {b}")));
                }
                LargestRootLaw::Asymptotic { wishart: WishartMaxCdf::new(params.q, params.m)?, factor: params.p as f64 * b }
            }
            Method::Tw => {
                if 10 * params.q > params.m {
                    log::warn!("Tracy-Widom approximation outside its regime: q = {} > m / 10 = {}", params.q, params.m / 10);
                }
                LargestRootLaw::Tw(JohnstoneCentering::for_ensemble(params))
            }
        })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        match self {
            LargestRootLaw::Exact(e) => e.cdf(x),
            LargestRootLaw::Asymptotic { wishart, factor } => wishart.cdf(factor * x),
            LargestRootLaw::Tw(c) => Ok(c.cdf(x)),
        }
    }

    /// Smallest `x` with `cdf(x) >= prob`, by bracketing and bisection.
    pub fn quantile(&self, prob: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&prob) {
            return Err(Error::Domain(format!("quantile level must be in [0, 1), got {prob}")));
        }
        let mut hi = 1e-3;
        while self.cdf(hi)? < prob {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::Domain("quantile bracket diverged".into()));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid)? < prob {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }
}

/// `1 - F(observed)` under the chosen law.
pub fn p_value(params: EnsembleParams, observed: f64, method: Method) -> Result<f64> {
    check_x(observed)?;
    let f = match method {
        Method::Exact => theorem3_cdf(params, observed)?,
        Method::Theorem1 => theorem1_cdf(params, observed)?,
        Method::Theorem2 { b } => corrected_cdf(params, b, observed)?,
        Method::Tw => tw_cdf(params, observed)?,
    };
    Ok((1.0 - f).clamp(0.0, 1.0))
}

/// A CDF tabulated on an ascending grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfCurve {
    pub xs: Vec<f64>,
    pub fs: Vec<f64>,
}

/// Successive values may dip by rounding noise at most this much before the
/// curve is rejected: the accuracy the engines guarantee.
const MONOTONE_SLACK: f64 = MAX_NORM_DEVIATION;

impl CdfCurve {
    pub fn new(xs: Vec<f64>, mut fs: Vec<f64>) -> Result<Self> {
        if xs.len() != fs.len() {
            return Err(Error::Dimension(format!("{} grid points but {} values", xs.len(), fs.len())));
        }
        for i in 1..fs.len() {
            if fs[i] < fs[i - 1] - MONOTONE_SLACK {
                return Err(Error::Domain(format!(
                    "CDF decreases at x = {}: {} -> {}",
                    xs[i], fs[i - 1], fs[i]
                )));
            }
            fs[i] = fs[i].max(fs[i - 1]);
        }
        if fs.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::Domain("CDF value outside [0, 1]".into()));
        }
        Ok(CdfCurve { xs, fs })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Largest jump between successive grid values.
    pub fn max_jump(&self) -> f64 {
        self.fs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,F")?;
        for (x, f) in self.xs.iter().zip(&self.fs) {
            writeln!(out, "{},{}", crate::beta_ensemble::fmt_g17(*x), crate::beta_ensemble::fmt_g17(*f))?;
        }
        Ok(())
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|x| x.is_nan()) || grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("grid must be ascending".into()));
    }
    Ok(())
}

/// Evaluates `law` on `grid`, in parallel over points.
pub fn cdf_curve(law: &LargestRootLaw, grid: &[f64]) -> Result<CdfCurve> {
    check_grid(grid)?;
    let fs = grid.par_iter().map(|&x| law.cdf(x)).collect::<Result<Vec<f64>>>()?;
    CdfCurve::new(grid.to_vec(), fs)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CurveKey {
    params: EnsembleParams,
    method: &'static str,
    b_bits: u64,
    grid_hash: u64,
    grid_len: usize,
}

/// In-memory memo of evaluated curves, keyed by parameters, method and grid.
#[derive(Default)]
pub struct CurveCache {
    curves: Mutex<HashMap<CurveKey, Arc<CdfCurve>>>,
}

impl CurveCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_eval(&self, params: EnsembleParams, method: Method, grid: &[f64]) -> Result<Arc<CdfCurve>> {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        for x in grid {
            x.to_bits().hash(&mut hasher);
        }
        let key = CurveKey {
            params,
            method: method.name(),
            b_bits: match method {
                Method::Theorem2 { b } => b.to_bits(),
                _ => 0,
            },
            grid_hash: hasher.finish(),
            grid_len: grid.len(),
        };
        if let Some(hit) = self.curves.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let curve = Arc::new(cdf_curve(&LargestRootLaw::new(params, method)?, grid)?);
        self.curves.lock().expect("cache lock").insert(key, Arc::clone(&curve));
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.curves.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
