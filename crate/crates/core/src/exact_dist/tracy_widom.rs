//! Order-1 Tracy–Widom CDF from a shipped table, and Johnstone's centering
//! and scaling of the logit largest root.

use std::sync::OnceLock;

use crate::beta_ensemble::EnsembleParams;
use crate::error::{Error, Result};

const TABLE_TEXT: &str = include_str!("../../data/tw1.csv");

/// Tabulated `F₁(s)` with monotone cubic (Fritsch–Carlson) interpolation.
#[derive(Debug, Clone)]
pub struct Tw1Table {
    s: Vec<f64>,
    f: Vec<f64>,
    slopes: Vec<f64>,
}

impl Tw1Table {
    /// Parses `s,F` rows (header optional), ascending in `s`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Vec::new();
        let mut f = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('s') {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("TW table line {}: expected two columns", lineno + 1)))?;
            let parse = |t: &str| {
                t.trim().parse::<f64>().map_err(|e| Error::Parse(format!("TW table line {}: {e}", lineno + 1)))
            };
            s.push(parse(a)?);
            f.push(parse(b)?);
        }
        if s.len() < 2 {
            return Err(Error::Parse("TW table needs at least two rows".into()));
        }
        if s.windows(2).any(|w| w[1] <= w[0]) || f.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Parse("TW table must be ascending in s and F".into()));
        }
        let slopes = fritsch_carlson_slopes(&s, &f);
        Ok(Tw1Table { s, f, slopes })
    }

    /// The table compiled into the crate.
    pub fn shipped() -> &'static Tw1Table {
        static TABLE: OnceLock<Tw1Table> = OnceLock::new();
        TABLE.get_or_init(|| Tw1Table::parse(TABLE_TEXT).expect("shipped TW table is well formed"))
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.s[0], *self.s.last().expect("nonempty"))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        let n = self.s.len();
        let (lo, hi) = self.range();
        if x < lo {
            // ln F₁(s) ≈ -|s|³/24 - |s|^{3/2}/(3√2) - ln|s|/16 + const
            let g = |s: f64| {
                let t = s.abs();
                -t.powi(3) / 24.0 - t.powf(1.5) / (3.0 * std::f64::consts::SQRT_2) - t.ln() / 16.0
            };
            return self.f[0] * (g(x) - g(lo)).exp();
        }
        if x > hi {
            // 1 - F₁(s) ≈ C e^{-(2/3) s^{3/2}} / s^{3/4}
            let h = |s: f64| -2.0 / 3.0 * s.powf(1.5) - 0.75 * s.ln();
            let tail = (1.0 - self.f[n - 1]) * (h(x) - h(hi)).exp();
            return 1.0 - tail;
        }
        let k = self.s.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.s[k], self.s[k + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (h00 * self.f[k] + h10 * h * self.slopes[k] + h01 * self.f[k + 1] + h11 * h * self.slopes[k + 1]).clamp(0.0, 1.0)
    }
}

fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        m[k] = if delta[k - 1] * delta[k] <= 0.0 { 0.0 } else { 0.5 * (delta[k - 1] + delta[k]) };
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta[k];
        let b = m[k + 1] / delta[k];
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[k] = tau * a * delta[k];
            m[k + 1] = tau * b * delta[k];
        }
    }
    m
}

/// `F₁(s)` from the shipped table.
pub fn tw1_cdf(s: f64) -> f64 {
    Tw1Table::shipped().cdf(s)
}

/// Centering `μ` and scale `σ` such that `(ln λ_max - μ) / σ ≈ TW₁`, where
/// `ln λ = logit θ` for the Roy root `θ = λ / (1 + λ)`.
///
/// In the double-Wishart setting with dimension `s`, hypothesis dof `n`
/// and error dof `e`, with `N = e + n - 1`:
/// `sin²(γ/2) = (min(n, s) - ½) / N`, `sin²(φ/2) = (max(n, s) - ½) / N`,
/// `μ = 2 ln tan((φ + γ)/2)`, `σ³ = 16 / N² / (sin²(φ + γ) sin φ sin γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnstoneCentering {
    pub mu: f64,
    pub sigma: f64,
}

impl JohnstoneCentering {
    pub fn new(s: usize, hyp_dof: usize, err_dof: usize) -> Self {
        let big_n = (err_dof + hyp_dof) as f64 - 1.0;
        let lo = (hyp_dof.min(s) as f64 - 0.5) / big_n;
        let hi = (hyp_dof.max(s) as f64 - 0.5) / big_n;
        let gamma = 2.0 * lo.sqrt().asin();
        let phi = 2.0 * hi.sqrt().asin();
        let mu = 2.0 * ((phi + gamma) / 2.0).tan().ln();
        let sigma3 = 16.0 / (big_n * big_n) / ((phi + gamma).sin().powi(2) * phi.sin() * gamma.sin());
        JohnstoneCentering { mu, sigma: sigma3.cbrt() }
    }

    /// Uses the dual parameters `(s = q, hyp = m, err = p - m + q)`.
    pub fn for_ensemble(params: EnsembleParams) -> Self {
        JohnstoneCentering::new(params.q, params.m, params.p - params.m + params.q)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        tw1_cdf((x.ln() - self.mu) / self.sigma)
    }
}
