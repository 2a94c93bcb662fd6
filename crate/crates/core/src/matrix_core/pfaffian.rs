use nalgebra::DMatrix;

use super::SkewMatrix;

/// Pfaffian of a skew-symmetric matrix.
///
/// Householder reduction to skew tridiagonal form, O(n³). Each nontrivial
/// reflector `H` has `det H = -1` and `Pf(H S H) = det(H) Pf(S)`; the Pfaffian
/// of the tridiagonal result is the product of its superdiagonal entries at
/// even positions.
///
/// Odd order: the matrix is bordered with the all-ones vector,
/// `[[S, 1], [-1ᵀ, 0]]`, and the Pfaffian of that even-order matrix is
/// returned. With this convention the odd-order value is the de Bruijn form
/// `Σ_k (-1)^{k+1} Pf(S with row/col k removed)` (0-based `k`).
pub fn pfaffian(s: &SkewMatrix) -> f64 {
    let n = s.order();
    if n % 2 == 1 {
        let mut bordered = DMatrix::zeros(n + 1, n + 1);
        bordered.view_mut((0, 0), (n, n)).copy_from(s.as_matrix());
        for i in 0..n {
            bordered[(i, n)] = 1.0;
            bordered[(n, i)] = -1.0;
        }
        pfaffian_even(bordered)
    } else {
        pfaffian_even(s.as_matrix().clone())
    }
}

fn pfaffian_even(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    debug_assert!(n % 2 == 0);
    if n == 0 {
        return 1.0;
    }
    let mut pf = 1.0;
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..(n - 1) {
        let lo = k + 1;
        if n - lo >= 2 {
            // the reflector is invariant to scaling v, so build it from the
            // column divided by its largest entry to avoid under/overflow
            let scale = (lo..n).map(|i| a[(i, k)].abs()).fold(0.0, f64::max);
            let tail_max = ((lo + 1)..n).map(|i| a[(i, k)].abs()).fold(0.0, f64::max);
            if tail_max > 0.0 {
                for i in lo..n {
                    v[i] = a[(i, k)] / scale;
                }
                let x0 = v[lo];
                let tail_sq: f64 = ((lo + 1)..n).map(|i| v[i] * v[i]).sum();
                let norm = (x0 * x0 + tail_sq).sqrt();
                let alpha_scaled = if x0 > 0.0 { -norm } else { norm };
                let alpha = alpha_scaled * scale;
                // v = x - alpha e_1, H = I - tau v vᵀ
                v[lo] -= alpha_scaled;
                let vnorm_sq = (v[lo] * v[lo]) + tail_sq;
                let tau = 2.0 / vnorm_sq;

                // left: rows lo.. of every column, A <- H A
                for j in 0..n {
                    let dot: f64 = (lo..n).map(|i| v[i] * a[(i, j)]).sum();
                    w[j] = tau * dot;
                }
                for j in 0..n {
                    let wj = w[j];
                    if wj != 0.0 {
                        for i in lo..n {
                            a[(i, j)] -= v[i] * wj;
                        }
                    }
                }
                // right: columns lo.. of every row, A <- A H
                for i in 0..n {
                    let dot: f64 = (lo..n).map(|j| a[(i, j)] * v[j]).sum();
                    w[i] = tau * dot;
                }
                for j in lo..n {
                    let vj = v[j];
                    for i in 0..n {
                        a[(i, j)] -= w[i] * vj;
                    }
                }
                // column k is now alpha e_1 below the diagonal
                a[(lo, k)] = alpha;
                a[(k, lo)] = -alpha;
                for i in (lo + 1)..n {
                    a[(i, k)] = 0.0;
                    a[(k, i)] = 0.0;
                }
                pf = -pf;
            }
        }
        if k % 2 == 0 {
            pf *= a[(k, k + 1)];
            if pf == 0.0 {
                return 0.0;
            }
        }
    }
    pf
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> SkewMatrix {
        SkewMatrix::from_upper(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    /// Permutation-expansion Pfaffian, exponential cost; oracle for small orders.
    fn pfaffian_expansion(m: &DMatrix<f64>, idx: &[usize]) -> f64 {
        if idx.is_empty() {
            return 1.0;
        }
        let first = idx[0];
        let mut total = 0.0;
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|&(p, _)| p != 0 && p != pos).map(|(_, &v)| v).collect();
            let sign = if pos % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * m[(first, j)] * pfaffian_expansion(m, &rest);
        }
        total
    }

    #[test]
    fn two_by_two() {
        let s = SkewMatrix::from_upper(2, |_, _| 3.7);
        assert_eq!(pfaffian(&s), 3.7);
    }

    #[test]
    fn canonical_blocks() {
        let s = SkewMatrix::from_upper(4, |i, j| match (i, j) {
            (0, 1) => 2.0,
            (2, 3) => 3.0,
            _ => 0.0,
        });
        assert!((pfaffian(&s) - 6.0).abs() < 1e-14);
    }

    #[test]
    fn matches_expansion_small_orders() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 6, 8] {
            let s = random_skew(n, &mut rng);
            let idx: Vec<usize> = (0..n).collect();
            let oracle = pfaffian_expansion(s.as_matrix(), &idx);
            assert!((pfaffian(&s) - oracle).abs() < 1e-12 * oracle.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn odd_order_bordering_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [1usize, 3, 5, 7] {
            let s = random_skew(n, &mut rng);
            let mut b = DMatrix::zeros(n + 1, n + 1);
            b.view_mut((0, 0), (n, n)).copy_from(s.as_matrix());
            for i in 0..n {
                b[(i, n)] = 1.0;
                b[(n, i)] = -1.0;
            }
            let idx: Vec<usize> = (0..=n).collect();
            let oracle = pfaffian_expansion(&b, &idx);
            assert!((pfaffian(&s) - oracle).abs() < 1e-12, "n={n}");
        }
        // order 1: [[0, 1], [-1, 0]]
        let one = SkewMatrix::new(DMatrix::zeros(1, 1)).unwrap();
        assert_eq!(pfaffian(&one), 1.0);
    }

    #[test]
    fn square_equals_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = random_skew(8, &mut rng);
        let pf = pfaffian(&s);
        let det = s.as_matrix().clone().determinant();
        assert!((pf * pf - det).abs() <= 1e-8 * det.abs());
    }

    #[test]
    fn zero_matrix() {
        let s = SkewMatrix::new(DMatrix::zeros(6, 6)).unwrap();
        assert_eq!(pfaffian(&s), 0.0);
    }

    proptest::proptest! {
        #[test]
        fn square_is_determinant(seed in 0u64..1_000, half in 1usize..=20) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_skew(2 * half, &mut rng);
            let pf = pfaffian(&s);
            let det = s.as_matrix().clone().determinant();
            proptest::prop_assert!((pf * pf - det).abs() <= 1e-8 * det.abs());
        }

        #[test]
        fn swap_flips_sign(seed in 0u64..1_000, half in 1usize..=10, a in 0usize..20, b in 0usize..20) {
            let n = 2 * half;
            let (i, j) = (a % n, b % n);
            proptest::prop_assume!(i != j);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_skew(n, &mut rng);
            let mut swapped = s.as_matrix().clone();
            swapped.swap_rows(i, j);
            swapped.swap_columns(i, j);
            let t = SkewMatrix::new(swapped).unwrap();
            let (x, y) = (pfaffian(&s), pfaffian(&t));
            proptest::prop_assert!((x + y).abs() <= 1e-10 * x.abs().max(1e-300));
        }
    }
}
