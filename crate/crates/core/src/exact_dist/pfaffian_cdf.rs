//! Largest-root CDFs of real orthogonally invariant ensembles as Pfaffians.
//!
//! For a joint eigenvalue density `∏ w(x_i) ∏_{i<j} |x_i - x_j|` on `s`
//! points, `P(x_max ≤ t)` is proportional to the Pfaffian of the s×s
//! skew matrix
//!
//! ```text
//! Δ_kl(t) = ∫∫_{x,y ≤ t} sgn(y - x) φ_k(x) φ_l(y) dx dy,   φ_k = p_k w,
//! ```
//!
//! bordered by the column `Φ_k(t) = ∫_{x ≤ t} φ_k` when `s` is odd. Any
//! polynomial basis `p_k` of degree `k` works (the Pfaffian scales by the
//! determinant of the change of basis, which cancels once the value is
//! normalized by the one at the end of the support). Monomials make Δ
//! hopelessly ill-conditioned beyond a handful of roots; the polynomials
//! orthonormal under `w` keep it close to block diagonal.
//!
//! The integrals are done in a coordinate `z` where the weight is smooth and
//! log-concave (logit for Jacobi, log for Laguerre): Gauss–Legendre panels
//! a fraction of the weight's width wide, cumulative integrals inside a panel
//! from the spectral integration matrix on the same nodes. The orthonormal
//! recurrence comes from the Stieltjes procedure on those nodes.
//!
//! With `I_kl(t) = ∫_{y ≤ t} φ_l(y) Φ_k(y) dy`, `Δ_kl = I_kl - I_lk`.

use std::sync::OnceLock;

use crate::matrix_core::{pfaffian, SkewMatrix};

/// Nodes per panel.
const NODES: usize = 24;
/// Panel width in units of the weight's standard deviation in `z`.
const PANEL_WIDTH: f64 = 0.75;
/// The range covers log-density within this much of the mode.
const LOG_DROP: f64 = 64.0;
const MAX_PANELS: usize = 4000;

/// A weight on the real line in the integration coordinate `z`.
pub(crate) trait Weight: Sync {
    /// The polynomial variable at `z`.
    fn to_x(&self, z: f64) -> f64;
    /// Inverse of [`Weight::to_x`]; `±∞` at the ends of the support.
    fn to_z(&self, x: f64) -> f64;
    /// `ln` of the normalized density in `z` (weight times Jacobian).
    fn ln_density(&self, z: f64) -> f64;
    /// Mode and curvature scale of the density in `z`.
    fn mode_scale(&self) -> (f64, f64);
    /// `ln[(1/s!) ∫ ∏ w(x_i) |V(x)| dx]` for the normalized weight (Selberg).
    fn ln_ordered_selberg(&self, dim: usize) -> f64;
}

struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `integ[i][j] = ∫_{-1}^{nodes[i]} ℓ_j`, Lagrange basis `ℓ_j` on the nodes.
    integ: Vec<Vec<f64>>,
}

/// `P_0..P_{n}` at `x`.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0) * x * p[k as usize] - k * p[k as usize - 1]) / (k + 1.0);
        p.push(next);
    }
    p.truncate(n + 1);
    p
}

fn gauss_legendre() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_all(n, x);
                let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(n, x);
            let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        // ℓ_j = Σ_m ω_j P_m(ξ_j) (2m+1)/2 · P_m, exact for degree < n;
        // ∫_{-1}^x P_0 = x + 1, ∫_{-1}^x P_m = (P_{m+1} - P_{m-1}) / (2m+1)
        let at_nodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let integ = (0..n)
            .map(|i| {
                let pi = &at_nodes[i];
                (0..n)
                    .map(|j| {
                        let pj = &at_nodes[j];
                        let mut acc = 0.5 * (nodes[i] + 1.0);
                        for m in 1..n {
                            acc += 0.5 * pj[m] * (pi[m + 1] - pi[m - 1]);
                        }
                        weights[j] * acc
                    })
                    .collect()
            })
            .collect();
        GaussLegendre { nodes, weights, integ }
    })
}

/// Integrals of the basis over one panel `[a, b]`.
struct PanelSums {
    /// `∫_a^b φ_k`.
    mass: Vec<f64>,
    /// `∫_a^b φ_l(y) ∫_a^y φ_k` at `[k * s + l]`.
    cross: Vec<f64>,
}

pub(crate) struct PfaffianCdf<W: Weight> {
    weight: W,
    dim: usize,
    /// Orthonormal recurrence `b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`.
    rec_a: Vec<f64>,
    rec_b: Vec<f64>,
    p0: f64,
    /// Panel edges in `z`.
    edges: Vec<f64>,
    /// `Φ_k` at each edge, `[edge][k]`.
    cum: Vec<Vec<f64>>,
    /// `I_kl` at each edge, `[edge][k * s + l]`.
    cum_cross: Vec<Vec<f64>>,
    norm: f64,
}

impl<W: Weight> PfaffianCdf<W> {
    pub(crate) fn new(weight: W, dim: usize) -> Self {
        let edges = panel_edges(&weight);
        let rule = gauss_legendre();
        // Stieltjes on the discretized measure
        let mut xs = Vec::with_capacity((edges.len() - 1) * NODES);
        let mut ws = Vec::with_capacity(xs.capacity());
        for e in edges.windows(2) {
            let half = 0.5 * (e[1] - e[0]);
            for (xi, wi) in rule.nodes.iter().zip(&rule.weights) {
                let z = e[0] + half * (xi + 1.0);
                xs.push(weight.to_x(z));
                ws.push(half * wi * weight.ln_density(z).exp());
            }
        }
        let mu0: f64 = ws.iter().sum();
        let p0 = 1.0 / mu0.sqrt();
        let mut rec_a = Vec::with_capacity(dim);
        let mut rec_b = vec![0.0];
        let mut prev = vec![0.0; xs.len()];
        let mut cur = vec![p0; xs.len()];
        for k in 0..dim.saturating_sub(1) {
            let a: f64 = xs.iter().zip(&ws).zip(&cur).map(|((x, w), p)| w * x * p * p).sum();
            let next: Vec<f64> =
                xs.iter().zip(&cur).zip(&prev).map(|((x, p), q)| (x - a) * p - rec_b[k] * q).collect();
            let b = next.iter().zip(&ws).map(|(q, w)| w * q * q).sum::<f64>().sqrt();
            rec_a.push(a);
            rec_b.push(b);
            prev = cur;
            cur = next.into_iter().map(|q| q / b).collect();
        }

        let mut engine = PfaffianCdf {
            weight,
            dim,
            rec_a,
            rec_b,
            p0,
            edges,
            cum: Vec::new(),
            cum_cross: Vec::new(),
            norm: 1.0,
        };
        let s = dim;
        let mut cum = vec![vec![0.0; s]];
        let mut cum_cross = vec![vec![0.0; s * s]];
        for p in 0..engine.edges.len() - 1 {
            let sums = engine.panel(engine.edges[p], engine.edges[p + 1]);
            let (phi, cross) = (&cum[p], &cum_cross[p]);
            let mut next_cross = cross.clone();
            for k in 0..s {
                for l in 0..s {
                    next_cross[k * s + l] += sums.cross[k * s + l] + phi[k] * sums.mass[l];
                }
            }
            let next_phi: Vec<f64> = phi.iter().zip(&sums.mass).map(|(a, b)| a + b).collect();
            cum.push(next_phi);
            cum_cross.push(next_cross);
        }
        engine.cum = cum;
        engine.cum_cross = cum_cross;
        let last = engine.edges.len() - 1;
        engine.norm = engine.pfaffian_from(&engine.cum[last], &engine.cum_cross[last]);
        engine
    }

    /// `φ_k(z)` for all `k`, including the Jacobian.
    fn basis(&self, z: f64, out: &mut [f64]) {
        let x = self.weight.to_x(z);
        let dens = self.weight.ln_density(z).exp();
        let (mut prev, mut cur) = (0.0, self.p0);
        for k in 0..self.dim {
            out[k] = cur * dens;
            if k + 1 < self.dim {
                let next = ((x - self.rec_a[k]) * cur - self.rec_b[k] * prev) / self.rec_b[k + 1];
                prev = cur;
                cur = next;
            }
        }
    }

    fn panel(&self, a: f64, b: f64) -> PanelSums {
        let rule = gauss_legendre();
        let s = self.dim;
        let half = 0.5 * (b - a);
        let mut vals = vec![0.0; NODES * s];
        for (i, xi) in rule.nodes.iter().enumerate() {
            self.basis(a + half * (xi + 1.0), &mut vals[i * s..(i + 1) * s]);
        }
        let mut mass = vec![0.0; s];
        let mut cross = vec![0.0; s * s];
        let mut inner = vec![0.0; s];
        for i in 0..NODES {
            inner.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..NODES {
                let c = half * rule.integ[i][j];
                for k in 0..s {
                    inner[k] += c * vals[j * s + k];
                }
            }
            let w = half * rule.weights[i];
            let row = &vals[i * s..(i + 1) * s];
            for k in 0..s {
                mass[k] += w * row[k];
                for l in 0..s {
                    cross[k * s + l] += w * row[l] * inner[k];
                }
            }
        }
        PanelSums { mass, cross }
    }

    fn pfaffian_from(&self, phi: &[f64], cross: &[f64]) -> f64 {
        let s = self.dim;
        let order = if s % 2 == 0 { s } else { s + 1 };
        let skew = SkewMatrix::from_upper(order, |r, c| {
            if c == s {
                phi[r]
            } else {
                cross[r * s + c] - cross[c * s + r]
            }
        });
        pfaffian(&skew)
    }

    /// Relative deviation of the computed normalizing Pfaffian from its
    /// closed form: a direct measure of the rounding the Pfaffian amplifies.
    pub(crate) fn norm_deviation(&self) -> f64 {
        if !(self.norm > 0.0) || !self.norm.is_finite() {
            return f64::INFINITY;
        }
        // Pf in the orthonormal basis = (∏ leading coefficients) × monomial Pf
        let mut ln_lead = 0.0;
        let mut acc = self.p0.ln();
        for k in 0..self.dim {
            if k > 0 {
                acc -= self.rec_b[k].ln();
            }
            ln_lead += acc;
        }
        let reference = self.weight.ln_ordered_selberg(self.dim) + ln_lead;
        (self.norm.ln() - reference).exp_m1().abs()
    }

    /// `P(x_max ≤ x)` for `x` in the polynomial variable, clamped to `[0, 1]`.
    pub(crate) fn cdf(&self, x: f64) -> f64 {
        let z = self.weight.to_z(x);
        if z.is_nan() || z <= self.edges[0] {
            return 0.0;
        }
        let last = self.edges.len() - 1;
        if z >= self.edges[last] {
            return 1.0;
        }
        let p = self.edges.partition_point(|&e| e <= z) - 1;
        let s = self.dim;
        let sums = self.panel(self.edges[p], z);
        let base = &self.cum[p];
        let mut cross = self.cum_cross[p].clone();
        for k in 0..s {
            for l in 0..s {
                cross[k * s + l] += sums.cross[k * s + l] + base[k] * sums.mass[l];
            }
        }
        let phi: Vec<f64> = base.iter().zip(&sums.mass).map(|(a, b)| a + b).collect();
        (self.pfaffian_from(&phi, &cross) / self.norm).clamp(0.0, 1.0)
    }
}

/// Panels of equal width in `z` covering the log-density within
/// [`LOG_DROP`] of its mode.
fn panel_edges<W: Weight>(weight: &W) -> Vec<f64> {
    let (mode, scale) = weight.mode_scale();
    let top = weight.ln_density(mode);
    let below = |z: f64| weight.ln_density(z) < top - LOG_DROP;
    let find = |dir: f64| {
        let mut step = scale;
        let mut inner = mode;
        let mut outer = mode + dir * step;
        while !below(outer) {
            inner = outer;
            step *= 2.0;
            outer = mode + dir * step;
        }
        for _ in 0..100 {
            let mid = 0.5 * (inner + outer);
            if below(mid) {
                outer = mid;
            } else {
                inner = mid;
            }
        }
        outer
    };
    let (lo, hi) = (find(-1.0), find(1.0));
    let n = (((hi - lo) / (PANEL_WIDTH * scale)).ceil() as usize).clamp(4, MAX_PANELS);
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}
