//! Scale-matrix correction of the Wishart asymptotic.
//!
//! With `a_i = tr Σ^i / p` and `b = a₁² / a₂`, the largest root behaves like
//! `max eig{W_q(m, I)} / (p b)` for large `p`. `b ≤ 1` by Cauchy–Schwarz,
//! with equality iff Σ is a multiple of the identity. The moments are
//! estimated from a single `A ~ W_p(m, Σ)` draw by
//!
//! ```text
//! â₁ = tr A / (m p)
//! â₂ = [tr A² - (tr A)² / m] / ((m - 1)(m + 2) p)
//! ```

use nalgebra::DMatrix;

use crate::beta_ensemble::EnsembleParams;
use crate::error::{Error, Result};
use crate::exact_dist::wishart_max_cdf;
use crate::sampling::{ScaleMatrix, WishartSample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleStats {
    pub a1_hat: f64,
    pub a2_hat: f64,
    pub b: f64,
}

impl ScaleStats {
    fn from_moments(a1: f64, a2: f64) -> Result<Self> {
        if !(a1 > 0.0 && a2 > 0.0) {
            return Err(Error::Domain(format!("scale moments must be positive (a1={a1}, a2={a2})")));
        }
        let b = a1 * a1 / a2;
        if b > 1.0 {
            log::warn!("estimated scale factor b = {b} exceeds 1; using it unclamped");
        }
        Ok(ScaleStats { a1_hat: a1, a2_hat: a2, b })
    }

    /// Whether the estimate sits above the theoretical ceiling `b ≤ 1`.
    pub fn exceeds_ceiling(&self) -> bool {
        self.b > 1.0
    }
}

/// `a₁ = tr Σ / p`, `a₂ = tr Σ² / p` directly from Σ.
pub fn scale_moments_exact(scale: &ScaleMatrix) -> ScaleStats {
    let p = scale.order() as f64;
    let (t1, t2) = scale.trace_moments();
    let (a1, a2) = (t1 / p, t2 / p);
    ScaleStats { a1_hat: a1, a2_hat: a2, b: a1 * a1 / a2 }
}

/// Moment estimates from a p×m factor `Z` with `A = Z Zᵀ`:
/// `tr A = ‖Z‖²_F` and `tr A² = ‖ZᵀZ‖²_F`, never forming A.
pub fn estimate_from_factor(z: &DMatrix<f64>) -> Result<ScaleStats> {
    let (p, m) = z.shape();
    if m < 2 {
        return Err(Error::DegenerateDof(m));
    }
    let (mf, pf) = (m as f64, p as f64);
    let tr_a = z.norm_squared();
    let tr_a2 = (z.transpose() * z).norm_squared();
    let a1 = tr_a / (mf * pf);
    let a2 = (tr_a2 - tr_a * tr_a / mf) / ((mf - 1.0) * (mf + 2.0) * pf);
    ScaleStats::from_moments(a1, a2)
}

pub fn estimate_scale_moments(a_factor: &WishartSample<'_>, m: usize, p: usize) -> Result<ScaleStats> {
    if a_factor.factor.shape() != (p, m) || a_factor.dof != m {
        return Err(Error::Dimension(format!(
            "factor is {}x{} with dof {}, expected {p}x{m}",
            a_factor.factor.nrows(),
            a_factor.factor.ncols(),
            a_factor.dof
        )));
    }
    estimate_from_factor(&a_factor.factor)
}

/// Moment estimates from a realized p×p matrix `A` with `m` degrees of freedom.
pub fn estimate_from_matrix(a: &DMatrix<f64>, m: usize) -> Result<ScaleStats> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("matrix must be square, got {}x{}", a.nrows(), a.ncols())));
    }
    if m < 2 {
        return Err(Error::DegenerateDof(m));
    }
    let (mf, pf) = (m as f64, a.nrows() as f64);
    let tr_a = a.trace();
    let tr_a2 = a.component_mul(&a.transpose()).sum();
    let a1 = tr_a / (mf * pf);
    let a2 = (tr_a2 - tr_a * tr_a / mf) / ((mf - 1.0) * (mf + 2.0) * pf);
    ScaleStats::from_moments(a1, a2)
}

/// Corrected asymptotic: `P(max eig{W_q(m, I)} ≤ p b x)`.
pub fn theorem2_cdf(params: EnsembleParams, stats: ScaleStats, x: f64) -> Result<f64> {
    corrected_cdf(params, stats.b, x)
}

/// [`theorem2_cdf`] for a bare factor `b`.
pub fn corrected_cdf(params: EnsembleParams, b: f64, x: f64) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("scale factor b must be positive, got {b}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("CDF argument must be >= 0, got {x}")));
    }
    wishart_max_cdf(params.q, params.m, params.p as f64 * b * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_dist::{theorem1_cdf, LargestRootLaw, Method};
    use crate::sampling::{sample_random_scale, sample_wishart, RngStream, ScaleLaw};

    #[test]
    fn identity_moments() {
        let s = scale_moments_exact(&ScaleMatrix::identity(7));
        assert_eq!((s.a1_hat, s.a2_hat, s.b), (1.0, 1.0, 1.0));
    }

    #[test]
    fn uniform_scaling_leaves_b() {
        let s = scale_moments_exact(&ScaleMatrix::identity(5).scaled(3.0).unwrap());
        assert!((s.a1_hat - 3.0).abs() < 1e-15);
        assert!((s.a2_hat - 9.0).abs() < 1e-15);
        assert!((s.b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_inflated_coordinate() {
        let mut d = vec![1.0; 100];
        d[0] = 2.0;
        let s = scale_moments_exact(&ScaleMatrix::diagonal(d).unwrap());
        assert!((s.a1_hat - 1.01).abs() < 1e-15);
        assert!((s.a2_hat - 1.03).abs() < 1e-15);
        assert!((s.b - 1.01 * 1.01 / 1.03).abs() < 1e-15);
    }

    #[test]
    fn b_invariant_under_scaling() {
        let mut rng = RngStream::new(1, 0).rng();
        for law in [ScaleLaw::default(), ScaleLaw::LogNormalDiagonal { sigma: 0.7 }, ScaleLaw::Ar1 { rho: 0.5 }] {
            let sigma = sample_random_scale(&mut rng, 40, law).unwrap();
            let b = scale_moments_exact(&sigma).b;
            for c in [0.25, 4.0, 1024.0] {
                assert_eq!(scale_moments_exact(&sigma.scaled(c).unwrap()).b, b, "{law} c={c}");
            }
            assert!(b <= 1.0);
        }
    }

    #[test]
    fn synthetic_factor_with_a_equal_m_identity() {
        // A = Z Zᵀ = m I_p with p = m: Z = √m · I
        let m = 6;
        let z = DMatrix::<f64>::identity(m, m) * (m as f64).sqrt();
        let s = estimate_from_factor(&z).unwrap();
        assert!((s.a1_hat - 1.0).abs() < 1e-14);
        let from_matrix = estimate_from_matrix(&(&z * z.transpose()), m).unwrap();
        assert!((from_matrix.a1_hat - s.a1_hat).abs() < 1e-14);
        assert!((from_matrix.a2_hat - s.a2_hat).abs() < 1e-12);
    }

    #[test]
    fn degenerate_dof() {
        let z = DMatrix::from_element(5, 1, 1.0);
        assert!(matches!(estimate_from_factor(&z), Err(Error::DegenerateDof(1))));
        let scale = ScaleMatrix::identity(5);
        let w = sample_wishart(&mut RngStream::new(1, 0).rng(), 5, 1, &scale).unwrap();
        assert!(matches!(estimate_scale_moments(&w, 1, 5), Err(Error::DegenerateDof(1))));
        assert!(matches!(estimate_scale_moments(&w, 2, 5), Err(Error::Dimension(_))));
    }

    #[test]
    fn factor_and_matrix_routes_agree() {
        let scale = ScaleMatrix::diagonal((0..30).map(|i| 0.5 + i as f64 / 20.0).collect()).unwrap();
        let w = sample_wishart(&mut RngStream::new(2, 0).rng(), 30, 8, &scale).unwrap();
        let a = estimate_scale_moments(&w, 8, 30).unwrap();
        let b = estimate_from_matrix(&w.matrix(), 8).unwrap();
        assert!((a.b - b.b).abs() < 1e-12);
    }

    #[test]
    fn identity_estimates_are_consistent() {
        let p = 1000;
        let m = 96;
        let scale = ScaleMatrix::identity(p);
        let mut rng = RngStream::new(3, 0).rng();
        let mean: f64 = (0..100)
            .map(|_| estimate_scale_moments(&sample_wishart(&mut rng, p, m, &scale).unwrap(), m, p).unwrap().b)
            .sum::<f64>()
            / 100.0;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn diagonal_estimates_track_exact_b() {
        let p = 1000;
        let m = 96;
        let mut rng = RngStream::new(4, 0).rng();
        let scale = sample_random_scale(&mut rng, p, ScaleLaw::default()).unwrap();
        let exact = scale_moments_exact(&scale).b;
        let mean: f64 = (0..100)
            .map(|_| estimate_scale_moments(&sample_wishart(&mut rng, p, m, &scale).unwrap(), m, p).unwrap().b)
            .sum::<f64>()
            / 100.0;
        assert!((mean - exact).abs() < 0.05, "{mean} vs {exact}");
    }

    #[test]
    fn unit_b_recovers_theorem1() {
        let params = EnsembleParams::new(500, 96, 4).unwrap();
        for i in 1..40 {
            let x = i as f64 * 0.01;
            assert_eq!(theorem2_cdf(params, scale_moments_exact(&ScaleMatrix::identity(500)), x).unwrap(), theorem1_cdf(params, x).unwrap());
        }
    }

    #[test]
    fn doubling_b_halves_quantiles() {
        let params = EnsembleParams::new(500, 96, 4).unwrap();
        let one = LargestRootLaw::new(params, Method::Theorem2 { b: 0.8 }).unwrap();
        let two = LargestRootLaw::new(params, Method::Theorem2 { b: 1.6 }).unwrap();
        for prob in [0.1, 0.5, 0.9] {
            let q1 = one.quantile(prob).unwrap();
            let q2 = two.quantile(prob).unwrap();
            assert!((q2 - q1 / 2.0).abs() < 1e-10 * q1, "{q1} {q2}");
        }
        // and pointwise: F_{2b}(x / 2) == F_b(x)
        for x in [0.1, 0.27, 0.4] {
            assert_eq!(corrected_cdf(params, 1.6, x / 2.0).unwrap(), corrected_cdf(params, 0.8, x).unwrap());
        }
    }

    #[test]
    fn invalid_b_rejected() {
        let params = EnsembleParams::new(50, 9, 4).unwrap();
        assert!(corrected_cdf(params, 0.0, 1.0).is_err());
        assert!(corrected_cdf(params, f64::NAN, 1.0).is_err());
        assert!(corrected_cdf(params, 1.0, -1.0).is_err());
    }

    #[test]
    fn estimator_above_ceiling_is_flagged_not_clamped() {
        let s = ScaleStats::from_moments(1.0, 0.9).unwrap();
        assert!(s.exceeds_ceiling());
        assert!((s.b - 1.0 / 0.9).abs() < 1e-15);
    }
}
