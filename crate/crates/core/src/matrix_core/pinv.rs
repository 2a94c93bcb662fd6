use nalgebra::DMatrix;

use super::eigen::sym_eigen_sorted;
use super::SymMatrix;

/// `order · ε`, the relative eigenvalue cutoff used when none is given.
pub fn default_rank_tol(order: usize) -> f64 {
    order as f64 * f64::EPSILON
}

/// Moore–Penrose pseudoinverse of a symmetric PSD matrix, `H L⁻¹ Hᵀ` over the
/// eigenvalues above `rank_tol · max(L)`. The zero matrix maps to zero.
pub fn pseudoinverse(m: &SymMatrix, rank_tol: Option<f64>) -> SymMatrix {
    let n = m.order();
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(n));
    let (values, vectors) = sym_eigen_sorted(m.as_matrix());
    let top = values[0];
    let mut out = DMatrix::zeros(n, n);
    if !(top > 0.0) {
        return SymMatrix::symmetrize(out);
    }
    let cutoff = tol * top;
    for (k, &lambda) in values.iter().enumerate() {
        if lambda <= cutoff {
            break;
        }
        let h = vectors.column(k);
        out.ger(1.0 / lambda, &h, &h, 1.0);
    }
    SymMatrix::symmetrize(out)
}
