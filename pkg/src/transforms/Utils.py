# Copyright (c) 2025 José Manuel Haces López
# Licensed under the MIT License.

import math
from typing import Tuple

import numpy as np

# Relative deflation threshold of the QL sweep (machine epsilon)
MACHINE_EPS = 2.0 ** -52

# Tolerance of the cyclic Jacobi solver on the off-diagonal Frobenius norm
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

# Entries within this relative distance of the column peak count as ties
SIGN_TIE_RTOL = 1e-9


class NumericFailureError(ArithmeticError):
    """Raised when an eigensolver does not converge within its iteration cap."""


def apply_sign_convention(basis: np.ndarray) -> np.ndarray:
    """
    Flips columns so that the entry of largest magnitude is non-negative.

    Ties (within SIGN_TIE_RTOL of the column peak) resolve to the lowest row
    index, so mirrored columns like the odd DCT-II vectors stay stable under
    last-bit rounding differences.

    Args:
        basis: n x n matrix whose columns are basis vectors

    Returns:
        New matrix with the convention applied
    """
    out = np.array(basis, dtype=np.float64, copy=True)
    for k in range(out.shape[1]):
        magnitudes = np.abs(out[:, k])
        peak = magnitudes.max()
        if peak == 0.0:
            continue
        idx = int(np.flatnonzero(magnitudes >= peak * (1.0 - SIGN_TIE_RTOL))[0])
        if out[idx, k] < 0.0:
            out[:, k] = -out[:, k]
    return out


def tridiagonal_ql(diag: np.ndarray, offdiag: np.ndarray,
                   max_iterations: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a symmetric tridiagonal matrix by the QL method
    with implicit Wilkinson shifts.

    The sweep order is fixed, so identical inputs always produce identical
    outputs. Eigenvalues come back unsorted together with the accumulated
    rotation matrix (columns are eigenvectors).

    Args:
        diag: n diagonal entries
        offdiag: n-1 sub-diagonal entries
        max_iterations: total QL iterations allowed over all eigenvalues

    Returns:
        (eigenvalues, eigenvectors)

    Raises:
        NumericFailureError: if the iteration cap is exceeded
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in offdiag] + [0.0]
    # eigenvectors are kept as rows while rotating, transposed at the end
    z = np.eye(n)
    iterations = 0

    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= MACHINE_EPS * dd:
                    break
                m += 1
            if m == l:
                break

            iterations += 1
            if iterations > max_iterations:
                raise NumericFailureError(
                    f"QL iteration did not converge within {max_iterations} iterations"
                )

            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False

            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b

                row_next = z[i + 1].copy()
                z[i + 1] = s * z[i] + c * row_next
                z[i] = c * z[i] - s * row_next

            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    return np.array(d), z.T.copy()


def jacobi_eigen(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigendecomposition of a dense symmetric matrix.

    Rotations visit (p, q) pairs in row-major order on every sweep; the
    solver stops once the off-diagonal Frobenius norm falls below
    JACOBI_TOL times the norm of the input.

    Args:
        matrix: n x n symmetric matrix

    Returns:
        (eigenvalues, eigenvectors), unsorted

    Raises:
        NumericFailureError: if JACOBI_MAX_SWEEPS sweeps are not enough
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = float(np.linalg.norm(a))

    for _ in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(max(0.0, float(np.sum(a * a) - np.sum(np.diag(a) ** 2))))
        if off <= JACOBI_TOL * scale:
            return np.diag(a).copy(), v

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    raise NumericFailureError(
        f"Jacobi sweeps did not converge within {JACOBI_MAX_SWEEPS} sweeps"
    )
