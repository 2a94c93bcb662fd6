//! Seeded generation of normal matrices, (singular) Wishart factors and
//! random scale matrices.
//!
//! Every Monte Carlo replicate owns an [`RngStream`]: a ChaCha8 generator
//! keyed by the campaign seed and selected onto its own 64-bit stream, so a
//! replicate's draws depend only on `(seed, stream_id)` and never on how
//! replicates are scheduled across threads.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Wishart scale matrix Σ.
#[derive(Debug, Clone)]
pub enum ScaleMatrix {
    Identity(usize),
    Diagonal(Vec<f64>),
    Dense {
        matrix: DMatrix<f64>,
        /// Lower Cholesky factor, `Σ = L Lᵀ`.
        factor: DMatrix<f64>,
    },
}

impl ScaleMatrix {
    pub fn identity(p: usize) -> Self {
        ScaleMatrix::Identity(p)
    }

    pub fn diagonal(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("diagonal scale needs at least one entry".into()));
        }
        if let Some(i) = values.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite(i));
        }
        Ok(ScaleMatrix::Diagonal(values))
    }

    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || !matrix.is_square() {
            return Err(Error::Dimension(format!("scale must be square, got {}x{}", n, matrix.ncols())));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let dev = (matrix[(i, j)] - matrix[(j, i)]).abs();
                if dev > 1e-12 * (matrix[(i, i)].abs() + matrix[(j, j)].abs()).max(1.0) {
                    return Err(Error::NotStructured { kind: "symmetric", row: i, col: j, deviation: dev });
                }
            }
        }
        let chol = Cholesky::new(matrix.clone()).ok_or_else(|| {
            let pivot = (0..n).find(|&k| Cholesky::new(matrix.view((0, 0), (k + 1, k + 1)).into_owned()).is_none());
            Error::NotPositiveDefinite(pivot.unwrap_or(n - 1))
        })?;
        Ok(ScaleMatrix::Dense { factor: chol.l(), matrix })
    }

    /// Reads a p×p matrix from CSV: p rows of p comma-separated values, no header.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let rows = parse_csv_matrix(&text)?;
        let p = rows.nrows();
        if rows.ncols() != p {
            return Err(Error::Dimension(format!("scale CSV must be square, got {}x{}", p, rows.ncols())));
        }
        ScaleMatrix::dense(rows)
    }

    pub fn order(&self) -> usize {
        match self {
            ScaleMatrix::Identity(p) => *p,
            ScaleMatrix::Diagonal(d) => d.len(),
            ScaleMatrix::Dense { matrix, .. } => matrix.nrows(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, ScaleMatrix::Identity(_))
    }

    /// `cΣ` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("scale factor must be positive, got {c}")));
        }
        Ok(match self {
            ScaleMatrix::Identity(p) => ScaleMatrix::Diagonal(vec![c; *p]),
            ScaleMatrix::Diagonal(d) => ScaleMatrix::Diagonal(d.iter().map(|v| v * c).collect()),
            ScaleMatrix::Dense { matrix, factor } => ScaleMatrix::Dense { matrix: matrix * c, factor: factor * c.sqrt() },
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            ScaleMatrix::Identity(p) => DMatrix::identity(*p, *p),
            ScaleMatrix::Diagonal(d) => DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d)),
            ScaleMatrix::Dense { matrix, .. } => matrix.clone(),
        }
    }

    /// `tr Σ` and `tr Σ²`.
    pub fn trace_moments(&self) -> (f64, f64) {
        match self {
            ScaleMatrix::Identity(p) => (*p as f64, *p as f64),
            ScaleMatrix::Diagonal(d) => (d.iter().sum(), d.iter().map(|v| v * v).sum()),
            // Σ symmetric: tr Σ² is the squared Frobenius norm
            ScaleMatrix::Dense { matrix, .. } => (matrix.trace(), matrix.norm_squared()),
        }
    }

    /// Left-multiplies `z` by the triangular factor of Σ in place.
    pub fn apply_factor(&self, z: &mut DMatrix<f64>) {
        match self {
            ScaleMatrix::Identity(_) => {}
            ScaleMatrix::Diagonal(d) => {
                for (r, mut row) in z.row_iter_mut().enumerate() {
                    row *= d[r].sqrt();
                }
            }
            ScaleMatrix::Dense { factor, .. } => {
                *z = factor * &*z;
            }
        }
    }

    /// `Σ x`.
    pub fn mul(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            ScaleMatrix::Identity(_) => x.clone(),
            ScaleMatrix::Diagonal(d) => {
                let mut out = x.clone();
                for (r, mut row) in out.row_iter_mut().enumerate() {
                    row *= d[r];
                }
                out
            }
            ScaleMatrix::Dense { matrix, .. } => matrix * x,
        }
    }
}

/// Parses comma-separated rows of numbers (no header) into a matrix.
pub fn parse_csv_matrix(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e} ({:?})", lineno + 1, tok.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} values, found {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix file".into()));
    }
    let (nr, nc) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(nr, nc, |r, c| rows[r][c]))
}

/// Generation law for random scale matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleLaw {
    Identity,
    /// Diagonal with i.i.d. uniform entries on `[lo, hi]`.
    DiagonalUniform { lo: f64, hi: f64 },
    /// Diagonal with i.i.d. `exp(N(0, sigma²))` entries.
    LogNormalDiagonal { sigma: f64 },
    /// Dense AR(1) correlation `rho^|i-j|` with uniform [0.5, 2] variances.
    Ar1 { rho: f64 },
}

impl Default for ScaleLaw {
    fn default() -> Self {
        ScaleLaw::DiagonalUniform { lo: 0.5, hi: 2.0 }
    }
}

impl fmt::Display for ScaleLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleLaw::Identity => write!(f, "identity"),
            ScaleLaw::DiagonalUniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            ScaleLaw::LogNormalDiagonal { sigma } => write!(f, "lognormal:{sigma}"),
            ScaleLaw::Ar1 { rho } => write!(f, "ar1:{rho}"),
        }
    }
}

impl FromStr for ScaleLaw {
    type Err = Error;

    /// `identity`, `uniform` (default bounds), `uniform:LO,HI`, `lognormal:SIGMA`, `ar1:RHO`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unrecognized scale law {s:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let law = match (name, args) {
            ("identity", None) => ScaleLaw::Identity,
            ("uniform", None) => ScaleLaw::default(),
            ("uniform", Some(a)) => {
                let (lo, hi) = a.split_once(',').ok_or_else(bad)?;
                let (lo, hi) = (num(lo)?, num(hi)?);
                if !(lo > 0.0 && hi >= lo) {
                    return Err(bad());
                }
                ScaleLaw::DiagonalUniform { lo, hi }
            }
            ("lognormal", Some(a)) => ScaleLaw::LogNormalDiagonal { sigma: num(a)?.abs() },
            ("ar1", Some(a)) => {
                let rho = num(a)?;
                if !(rho.abs() < 1.0) {
                    return Err(bad());
                }
                ScaleLaw::Ar1 { rho }
            }
            _ => return Err(bad()),
        };
        Ok(law)
    }
}

/// Draws a p×n matrix whose columns are independent `N_p(0, Σ)` vectors.
pub fn sample_normal_matrix<R: Rng + ?Sized>(rng: &mut R, p: usize, n: usize, scale: &ScaleMatrix) -> Result<DMatrix<f64>> {
    if p == 0 || n == 0 {
        return Err(Error::Dimension(format!("normal matrix needs p, n >= 1, got {p}x{n}")));
    }
    if scale.order() != p {
        return Err(Error::Dimension(format!("scale has order {}, expected {p}", scale.order())));
    }
    // column-major fill: column j is the j-th draw
    let mut z = DMatrix::from_fn(p, n, |_, _| 0.0);
    for v in z.iter_mut() {
        *v = StandardNormal.sample(rng);
    }
    scale.apply_factor(&mut z);
    Ok(z)
}

/// Factor form of a `W_p(dof, Σ)` draw: the matrix is `Z Zᵀ`.
#[derive(Debug, Clone)]
pub struct WishartSample<'a> {
    pub factor: DMatrix<f64>,
    pub dof: usize,
    pub scale: &'a ScaleMatrix,
}

impl WishartSample<'_> {
    pub fn dimension(&self) -> usize {
        self.factor.nrows()
    }

    /// Materializes the p×p matrix. Only for small p.
    pub fn matrix(&self) -> DMatrix<f64> {
        let a = &self.factor * self.factor.transpose();
        (a.clone() + a.transpose()) * 0.5
    }
}

pub fn sample_wishart<'a, R: Rng + ?Sized>(rng: &mut R, p: usize, dof: usize, scale: &'a ScaleMatrix) -> Result<WishartSample<'a>> {
    let factor = sample_normal_matrix(rng, p, dof, scale)?;
    Ok(WishartSample { factor, dof, scale })
}

pub fn sample_random_scale<R: Rng + ?Sized>(rng: &mut R, p: usize, law: ScaleLaw) -> Result<ScaleMatrix> {
    if p == 0 {
        return Err(Error::Dimension("scale order must be at least 1".into()));
    }
    match law {
        ScaleLaw::Identity => Ok(ScaleMatrix::identity(p)),
        ScaleLaw::DiagonalUniform { lo, hi } => ScaleMatrix::diagonal((0..p).map(|_| rng.gen_range(lo..=hi)).collect()),
        ScaleLaw::LogNormalDiagonal { sigma } => ScaleMatrix::diagonal(
            (0..p)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    (sigma * z).exp()
                })
                .collect(),
        ),
        ScaleLaw::Ar1 { rho } => {
            let sd: Vec<f64> = (0..p).map(|_| rng.gen_range(0.5f64..=2.0).sqrt()).collect();
            let m = DMatrix::from_fn(p, p, |i, j| sd[i] * sd[j] * rho.powi((i as i32 - j as i32).abs()));
            ScaleMatrix::dense(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_core::sym_eigen_rank;

    #[test]
    fn stream_is_reproducible() {
        let s = RngStream::new(42, 7);
        let a = sample_normal_matrix(&mut s.rng(), 1, 1, &ScaleMatrix::identity(1)).unwrap();
        let b = sample_normal_matrix(&mut s.rng(), 1, 1, &ScaleMatrix::identity(1)).unwrap();
        assert_eq!(a, b);
        let other = sample_normal_matrix(&mut RngStream::new(42, 8).rng(), 1, 1, &ScaleMatrix::identity(1)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn identity_column_mean_near_zero() {
        let n = 100_000;
        let z = sample_normal_matrix(&mut RngStream::new(1, 0).rng(), 3, n, &ScaleMatrix::identity(3)).unwrap();
        let se = 1.0 / (n as f64).sqrt();
        for r in 0..3 {
            let mean = z.row(r).sum() / n as f64;
            assert!(mean.abs() < 4.0 * se, "row {r}: {mean}");
        }
    }

    #[test]
    fn diagonal_scale_variance() {
        let n = 100_000;
        let scale = ScaleMatrix::diagonal(vec![4.0, 1.0]).unwrap();
        let z = sample_normal_matrix(&mut RngStream::new(2, 0).rng(), 2, n, &scale).unwrap();
        let var0 = z.row(0).iter().map(|v| v * v).sum::<f64>() / n as f64;
        let var1 = z.row(1).iter().map(|v| v * v).sum::<f64>() / n as f64;
        assert!((var0 / 4.0 - 1.0).abs() < 0.05, "{var0}");
        assert!((var1 - 1.0).abs() < 0.05, "{var1}");
    }

    #[test]
    fn singular_wishart_rank() {
        let scale = ScaleMatrix::identity(5);
        let w = sample_wishart(&mut RngStream::new(3, 0).rng(), 5, 2, &scale).unwrap();
        let f = sym_eigen_rank(&w.factor).unwrap();
        assert_eq!(f.roots.len(), 2);
        let (vals, _) = crate::matrix_core::sym_eigen_sorted(&w.matrix());
        assert!(vals[2].abs() < 1e-12 * vals[0]);
        assert!(vals[1] > 1e-6 * vals[0]);
    }

    #[test]
    fn wishart_mean_is_dof_times_scale() {
        let scale = ScaleMatrix::identity(3);
        let mut rng = RngStream::new(4, 0).rng();
        let mut acc = DMatrix::zeros(3, 3);
        let draws = 2000;
        for _ in 0..draws {
            acc += sample_wishart(&mut rng, 3, 50, &scale).unwrap().matrix() / 50.0;
        }
        acc /= draws as f64;
        assert!((acc - DMatrix::<f64>::identity(3, 3)).amax() < 0.05);
    }

    #[test]
    fn one_dimensional_wishart_is_chi_square() {
        let scale = ScaleMatrix::identity(1);
        let mut rng = RngStream::new(5, 0).rng();
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| sample_wishart(&mut rng, 1, 3, &scale).unwrap().factor.norm_squared())
            .sum::<f64>()
            / n as f64;
        assert!((mean / 3.0 - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn scaling_scales_factor_exactly() {
        let scale = ScaleMatrix::diagonal(vec![1.3, 0.7, 2.2]).unwrap();
        let scaled = scale.scaled(4.0).unwrap();
        let a = sample_wishart(&mut RngStream::new(6, 1).rng(), 3, 2, &scale).unwrap();
        let b = sample_wishart(&mut RngStream::new(6, 1).rng(), 3, 2, &scaled).unwrap();
        assert_eq!(a.factor * 2.0, b.factor);

        let dense = sample_random_scale(&mut RngStream::new(6, 2).rng(), 4, ScaleLaw::Ar1 { rho: 0.4 }).unwrap();
        let dense4 = dense.scaled(4.0).unwrap();
        let a = sample_wishart(&mut RngStream::new(6, 3).rng(), 4, 2, &dense).unwrap();
        let b = sample_wishart(&mut RngStream::new(6, 3).rng(), 4, 2, &dense4).unwrap();
        assert_eq!(a.factor * 2.0, b.factor);
    }

    #[test]
    fn dense_scale_must_be_positive_definite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(ScaleMatrix::dense(m), Err(Error::NotPositiveDefinite(1))));
        assert!(ScaleMatrix::diagonal(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn random_scale_laws() {
        let mut rng = RngStream::new(7, 0).rng();
        assert!(sample_random_scale(&mut rng, 10, ScaleLaw::Identity).unwrap().is_identity());
        let s = sample_random_scale(&mut rng, 100, ScaleLaw::default()).unwrap();
        match &s {
            ScaleMatrix::Diagonal(d) => assert!(d.iter().all(|&v| (0.5..=2.0).contains(&v))),
            other => panic!("expected diagonal, got {other:?}"),
        }
        let (t1, t2) = s.trace_moments();
        let (a1, a2) = (t1 / 100.0, t2 / 100.0);
        let b = a1 * a1 / a2;
        assert!(b > 0.0 && b <= 1.0, "{b}");
    }

    #[test]
    fn scale_law_parsing() {
        assert_eq!("identity".parse::<ScaleLaw>().unwrap(), ScaleLaw::Identity);
        assert_eq!("uniform".parse::<ScaleLaw>().unwrap(), ScaleLaw::default());
        assert_eq!("uniform:0.25,4".parse::<ScaleLaw>().unwrap(), ScaleLaw::DiagonalUniform { lo: 0.25, hi: 4.0 });
        assert_eq!("ar1:0.3".parse::<ScaleLaw>().unwrap(), ScaleLaw::Ar1 { rho: 0.3 });
        assert!("ar1:1.5".parse::<ScaleLaw>().is_err());
        assert!("gamma:2".parse::<ScaleLaw>().is_err());
        let law: ScaleLaw = "lognormal:0.5".parse().unwrap();
        assert_eq!(law.to_string().parse::<ScaleLaw>().unwrap(), law);
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("roy-exact-scale-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("sigma.csv");
        std::fs::write(&path, "2,0.5,0\n0.5,1,0\n0,0,3\n").unwrap();
        let s = ScaleMatrix::from_csv(&path).unwrap();
        assert_eq!(s.order(), 3);
        assert_eq!(s.trace_moments().0, 6.0);
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(matches!(ScaleMatrix::from_csv(&path), Err(Error::Parse(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
