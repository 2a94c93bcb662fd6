"""Generate the order-1 Tracy-Widom CDF table shipped with the core crate.

F1(s) is evaluated as the Fredholm determinant det(I - K) on L2(s, inf) with
kernel K(x, y) = Ai((x + y) / 2) / 2, discretized by Gauss-Legendre quadrature.
Below S_MATCH the determinant loses relative accuracy, so the left tail is
continued with the asymptotic form
    ln F1(s) = -|s|^3/24 - |s|^{3/2}/(3 sqrt 2) - ln|s|/16 + const
matched to the determinant at S_MATCH.

Usage: python3 tools/gen_tw1_table.py > crates/core/data/tw1.csv
"""
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import airy

S_MIN, S_MAX, STEP = -10.0, 8.0, 0.005
S_MATCH = -6.0
NODES = 140


def f1_det(s):
    length = max(16.0, 16.0 - s)
    x, w = leggauss(NODES)
    u = (x + 1.0) * length / 2.0
    w = w * length / 2.0
    uu, vv = np.meshgrid(u, u, indexing="ij")
    k = 0.5 * airy(s + (uu + vv) / 2.0)[0]
    sw = np.sqrt(w)
    return np.linalg.det(np.eye(NODES) - sw[:, None] * k * sw[None, :])


def left_tail_log(s):
    t = abs(s)
    return -t**3 / 24.0 - t**1.5 / (3.0 * np.sqrt(2.0)) - np.log(t) / 16.0


def main():
    n = int(round((S_MAX - S_MIN) / STEP)) + 1
    grid = S_MIN + STEP * np.arange(n)
    anchor = np.log(f1_det(S_MATCH)) - left_tail_log(S_MATCH)
    print("s,F")
    for s in grid:
        if s < S_MATCH - 1e-12:
            value = np.exp(anchor + left_tail_log(s))
        else:
            value = min(max(f1_det(s), 0.0), 1.0)
        print(f"{s:.3f},{value:.17e}")


if __name__ == "__main__":
    main()
