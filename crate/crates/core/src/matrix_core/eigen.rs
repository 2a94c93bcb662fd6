use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative rank threshold on singular values, scaled by the column count.
const RANK_RTOL: f64 = 1e-12;

/// Below this ratio of extreme Gram eigenvalues the Gram route loses too many
/// digits in the left singular vectors, and a full SVD is used instead.
const GRAM_MIN_RATIO: f64 = 1e-4;

/// Eigendecomposition of a symmetric matrix, eigenvalues descending.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(m.nrows(), n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Nonzero eigensystem of `Z Zᵀ` for a tall full-column-rank `Z`.
#[derive(Debug, Clone)]
pub struct EigenFactorization {
    /// p×n, orthonormal columns.
    pub vectors: DMatrix<f64>,
    /// n positive values, descending.
    pub roots: DVector<f64>,
}

impl EigenFactorization {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| {
            self.vectors[(r, c)] * self.roots[c]
        });
        &scaled * self.vectors.transpose()
    }
}

#[derive(Debug, Clone)]
enum Basis {
    /// Eigenvectors `U` of `ZᵀZ`; the left singular vectors are `Z U L^{-1/2}`.
    Gram(DMatrix<f64>),
    /// Left singular vectors materialized directly.
    Explicit(DMatrix<f64>),
}

/// Left singular structure of a tall matrix without necessarily forming the
/// p×n basis. `Hᵀ X` products go through the n×n Gram eigenvectors when the
/// matrix is well conditioned, which keeps the Monte Carlo inner loop at
/// O(p·n²) with a small constant.
#[derive(Debug, Clone)]
pub struct ThinFactor {
    basis: Basis,
    roots: DVector<f64>,
}

impl ThinFactor {
    pub fn roots(&self) -> &DVector<f64> {
        &self.roots
    }

    /// `Hᵀ x` where `z` is the matrix this factor was built from.
    pub fn project(&self, z: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.basis {
            Basis::Explicit(h) => h.transpose() * x,
            Basis::Gram(u) => {
                let zx = z.transpose() * x;
                let mut out = u.transpose() * &zx;
                for (r, mut row) in out.row_iter_mut().enumerate() {
                    row /= self.roots[r].sqrt();
                }
                out
            }
        }
    }

    /// Materializes the p×n basis `H`.
    pub fn basis(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        match &self.basis {
            Basis::Explicit(h) => h.clone(),
            Basis::Gram(u) => {
                let mut h = z * u;
                for (c, mut col) in h.column_iter_mut().enumerate() {
                    col /= self.roots[c].sqrt();
                }
                h
            }
        }
    }
}

/// Rank-checked thin factorization of a p×n matrix, n ≤ p.
pub fn thin_factor(z: &DMatrix<f64>) -> Result<ThinFactor> {
    let (p, n) = z.shape();
    if n == 0 || n > p {
        return Err(Error::Dimension(format!("thin factor needs 1 <= n <= p, got {p}x{n}")));
    }
    let gram = z.transpose() * z;
    let (roots, u) = sym_eigen_sorted(&gram);
    let largest = roots[0];
    let smallest = roots[n - 1];
    if largest > 0.0 && smallest > GRAM_MIN_RATIO * largest {
        return Ok(ThinFactor { basis: Basis::Gram(u), roots });
    }
    svd_factor(z)
}

fn svd_factor(z: &DMatrix<f64>) -> Result<ThinFactor> {
    let n = z.ncols();
    let svd = z.clone().svd(true, false);
    let u = svd.u.expect("left vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let largest = svd.singular_values[order[0]];
    let smallest = svd.singular_values[order[n - 1]];
    if !(largest > 0.0) || smallest <= n as f64 * RANK_RTOL * largest {
        return Err(Error::RankDeficient { smallest, largest });
    }
    let h = DMatrix::from_fn(z.nrows(), n, |r, c| u[(r, order[c])]);
    let roots = DVector::from_iterator(n, order.iter().map(|&i| svd.singular_values[i].powi(2)));
    Ok(ThinFactor { basis: Basis::Explicit(h), roots })
}

/// Nonzero eigensystem of `Z Zᵀ` without forming the p×p product: left
/// singular vectors of `Z` and squared singular values, descending.
pub fn sym_eigen_rank(z: &DMatrix<f64>) -> Result<EigenFactorization> {
    let factor = thin_factor(z)?;
    Ok(EigenFactorization { vectors: factor.basis(z), roots: factor.roots })
}
