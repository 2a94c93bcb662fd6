//! Dense numerical kernels shared by the sampling and distribution code.

mod eigen;
mod pfaffian;
mod pinv;
pub mod special;

pub use eigen::{sym_eigen_rank, sym_eigen_sorted, thin_factor, EigenFactorization, ThinFactor};
pub use pfaffian::pfaffian;
pub use pinv::{default_rank_tol, pseudoinverse};
pub use special::{ln_beta, ln_gamma, reg_inc_beta, reg_inc_gamma};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const STRUCTURE_TOL: f64 = 1e-12;

/// Dense symmetric matrix, checked on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "symmetric matrix must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let dev = (m[(i, j)] - m[(j, i)]).abs();
                if dev > STRUCTURE_TOL {
                    return Err(Error::NotStructured { kind: "symmetric", row: i, col: j, deviation: dev });
                }
            }
        }
        Ok(SymMatrix(m))
    }

    /// Symmetrizes `(m + mᵀ)/2` without checking; for products that are
    /// symmetric in exact arithmetic.
    pub fn symmetrize(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        SymMatrix((m + t) * 0.5)
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// Dense skew-symmetric matrix with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

impl SkewMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "skew matrix must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = m.nrows();
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(Error::NotStructured { kind: "skew-symmetric", row: i, col: i, deviation: m[(i, i)].abs() });
            }
            for j in (i + 1)..n {
                let dev = (m[(i, j)] + m[(j, i)]).abs();
                if dev > STRUCTURE_TOL {
                    return Err(Error::NotStructured { kind: "skew-symmetric", row: i, col: j, deviation: dev });
                }
            }
        }
        Ok(SkewMatrix(m))
    }

    /// Builds the matrix from its strict upper triangle, `upper(i, j)` for `i < j`.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = upper(i, j);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        SkewMatrix(m)
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}
