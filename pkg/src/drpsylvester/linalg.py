"""One-sided Jacobi singular value decomposition for small dense matrices."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError

__all__ = ["SVDResult", "svd_small", "numerical_rank", "complete_orthonormal"]

MAX_DIM = 512


class SVDResult(NamedTuple):
    """``A = U @ diag(s) @ V.T`` with square orthogonal ``U`` and ``V``.

    ``s`` has ``min(m, n)`` entries in nonincreasing order.
    """

    U: np.ndarray
    s: np.ndarray
    V: np.ndarray

    def sigma(self) -> np.ndarray:
        m, n = self.U.shape[0], self.V.shape[0]
        S = np.zeros((m, n))
        k = len(self.s)
        S[:k, :k] = np.diag(self.s)
        return S

    def reconstruct(self) -> np.ndarray:
        return self.U @ self.sigma() @ self.V.T


def complete_orthonormal(Q: np.ndarray, m: int) -> np.ndarray:
    """Extend the orthonormal columns of ``Q`` (``m x r``) to an ``m x m`` basis."""
    cols = [Q[:, j] for j in range(Q.shape[1])]
    for e in np.eye(m):
        if len(cols) == m:
            break
        v = e.copy()
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            for q in cols:
                v -= (q @ v) * q
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
    return np.column_stack(cols) if cols else np.zeros((m, 0))


def _jacobi_tall(A, tol, max_sweeps):
    m, n = A.shape
    W = A.copy()
    V = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                wp, wq = W[:, p], W[:, q]
                alpha = wp @ wp
                beta = wq @ wq
                gamma = wp @ wq
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                with np.errstate(over="ignore"):
                    zeta = (beta - alpha) / (2.0 * gamma)
                if not np.isfinite(zeta):
                    # one column is negligible next to the other
                    continue
                rotated = True
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                else:
                    t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                W[:, [p, q]] = np.column_stack((c * wp - s * wq, s * wp + c * wq))
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        if not rotated:
            break
    s = np.linalg.norm(W, axis=0)
    order = np.argsort(-s, kind="stable")
    s, W, V = s[order], W[:, order], V[:, order]
    smax = s[0] if n else 0.0
    keep = s > max(smax * n * np.finfo(float).eps, np.finfo(float).tiny)
    U = W[:, keep] / s[keep]
    U = complete_orthonormal(U, m)
    return U, s, V


def svd_small(A, tol: float = 1e-15, max_sweeps: int = 60) -> SVDResult:
    """Hestenes one-sided Jacobi SVD.

    Columns are orthogonalised pairwise by plane rotations until every pair
    satisfies ``|w_p . w_q| <= tol |w_p| |w_q|``. Wide matrices are handled
    through their transpose.

    Raises
    ------
    DimensionError
        Non-2-D input, or a dimension above 512.
    ValueError
        Non-finite entries.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {A.shape}")
    m, n = A.shape
    if max(m, n) > MAX_DIM or min(m, n) == 0:
        raise DimensionError(f"svd_small handles 1..{MAX_DIM} per dimension, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    # unit scaling keeps the column dot products clear of under- and overflow
    scale = float(np.max(np.abs(A)))
    if scale > 0:
        A = A / scale
    if m >= n:
        U, s, V = _jacobi_tall(A, tol, max_sweeps)
    else:
        V, s, U = _jacobi_tall(A.T, tol, max_sweeps)
    return SVDResult(U, s * scale, V)


def numerical_rank(s: np.ndarray, rtol: float = 1e-12) -> int:
    """Count singular values above ``rtol`` times the largest one."""
    if len(s) == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))
