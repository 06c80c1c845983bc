"""Matrix form ``M1 U + U M2 + L(U) = M0`` of the nine-weight scheme.

Rows of ``U`` are interior nodes ``i = 1..n_x-1``; columns are time
levels ``n = 1..n_t``. The equation in column ``n`` is the scheme written
at ``(i, n)``. Terms that touch a boundary node or time level 0 are known
and move to ``M0``. Terms that reach level ``n_t + 1`` are dropped, so the
last column is truncated and only columns ``1..n_t-1`` reproduce the
time-stepped scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .scheme import BoundaryData, GridSpec, SchemeCoefficients, effective

__all__ = [
    "SylvesterSystem",
    "assemble_m1",
    "assemble_m2",
    "assemble_m0",
    "m0_basis",
    "apply_L",
    "build_system",
    "scheme_residual",
    "exact_residual",
    "error_matrix",
    "error_relation_gap",
    "sample_interior",
    "supported_columns_max",
    "system_summary",
]


def assemble_m1(beta: float, delta: float, epsilon: float, n_x: int) -> np.ndarray:
    """Tridiagonal ``(n_x-1) x (n_x-1)``: ``beta`` on, ``delta`` above, ``epsilon`` below."""
    if n_x < 3:
        raise DimensionError(f"n_x must be >= 3, got {n_x}")
    m = n_x - 1
    M = beta * np.eye(m)
    M += delta * np.eye(m, k=1)
    M += epsilon * np.eye(m, k=-1)
    return M


def assemble_m2(alpha: float, gamma: float, n_t: int) -> np.ndarray:
    """``n_t x n_t`` with ``gamma`` above and ``alpha`` below a zero diagonal."""
    if n_t < 2:
        raise DimensionError(f"n_t must be >= 2, got {n_t}")
    return gamma * np.eye(n_t, k=1) + alpha * np.eye(n_t, k=-1)


# (space offset, time offset) of each term, in EffectiveWeights order
_OFFSETS = ((0, 1), (0, 0), (0, -1), (1, 0), (-1, 0), (1, 1), (-1, -1), (-1, 1), (1, -1))


def m0_basis(boundary: BoundaryData, grid: GridSpec) -> np.ndarray:
    """Known-value contribution of each stencil term, shape ``(9, n_x-1, n_t)``.

    Slice ``k`` is ``M0`` for unit weight on term ``k`` (ordered as
    :class:`~drpsylvester.scheme.EffectiveWeights`) and zero elsewhere.
    """
    boundary.check(grid)
    n_x, n_t = grid.n_x, grid.n_t
    B = np.zeros((9, n_x - 1, n_t))
    for k, (dl, dm) in enumerate(_OFFSETS):
        if dm == -1:
            # level 0 is reached from the first column only
            B[k, :, 0] = -boundary.initial[1 + dl : n_x + dl]
        if dl == 0:
            continue
        row, column = (0, boundary.left) if dl == -1 else (n_x - 2, boundary.right)
        n = np.arange(1, n_t + 1)
        m = n + dm
        ok = (m >= 1) & (m <= n_t)
        B[k, row, n[ok] - 1] = -column[m[ok]]
    return B


def assemble_m0(coeffs: SchemeCoefficients, boundary: BoundaryData, grid: GridSpec) -> np.ndarray:
    """Right-hand side carrying initial and boundary values.

    Every stencil term at ``(i, n)`` whose node is ``u_l^0``, ``u_0^m`` or
    ``u_{n_x}^m`` contributes ``-weight * value``. Terms beyond level
    ``n_t`` are omitted.
    """
    w = np.asarray(effective(coeffs), dtype=float)
    return np.tensordot(w, m0_basis(boundary, grid), axes=1)


def apply_L(U: np.ndarray, zeta: float = 0.0, eta: float = 0.0, theta: float = 0.0, vartheta: float = 0.0) -> np.ndarray:
    """Diagonal-neighbour terms of the scheme acting on interior unknowns.

    Entry ``(i, n)`` collects ``zeta u_{i+1}^{n+1} + eta u_{i-1}^{n-1} +
    theta u_{i-1}^{n+1} + vartheta u_{i+1}^{n-1}`` wherever the referenced
    node is itself an unknown; all other positions stay zero.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or 0 in U.shape:
        raise DimensionError(f"apply_L needs a nonempty 2-D matrix, got shape {U.shape}")
    out = np.zeros_like(U)
    if zeta:
        out[:-1, :-1] += zeta * U[1:, 1:]
    if eta:
        out[1:, 1:] += eta * U[:-1, :-1]
    if theta:
        out[1:, :-1] += theta * U[:-1, 1:]
    if vartheta:
        out[:-1, 1:] += vartheta * U[1:, :-1]
    return out


@dataclass(frozen=True)
class SylvesterSystem:
    M1: np.ndarray
    M2: np.ndarray
    M0: np.ndarray
    l_coeffs: tuple = (0.0, 0.0, 0.0, 0.0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.M0.shape

    def lhs(self, U: np.ndarray) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        if U.shape != self.shape:
            raise DimensionError(f"U has shape {U.shape}, system expects {self.shape}")
        return self.M1 @ U + U @ self.M2 + apply_L(U, *self.l_coeffs)


def build_system(coeffs: SchemeCoefficients, boundary: BoundaryData, grid: GridSpec) -> SylvesterSystem:
    w = effective(coeffs)
    return SylvesterSystem(
        M1=assemble_m1(w.beta, w.delta, w.epsilon, grid.n_x),
        M2=assemble_m2(w.alpha, w.gamma, grid.n_t),
        M0=assemble_m0(coeffs, boundary, grid),
        l_coeffs=(w.zeta, w.eta, w.theta, w.vartheta),
    )


def scheme_residual(U: np.ndarray, system: SylvesterSystem) -> np.ndarray:
    """``M1 U + U M2 + L(U) - M0``."""
    return system.lhs(U) - system.M0


def exact_residual(U_exact: np.ndarray, system: SylvesterSystem) -> np.ndarray:
    """Residual matrix ``F`` of the sampled exact solution."""
    return scheme_residual(U_exact, system)


def error_matrix(U: np.ndarray, U_exact: np.ndarray) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    U_exact = np.asarray(U_exact, dtype=float)
    if U.shape != U_exact.shape:
        raise DimensionError(f"shape mismatch: {U.shape} vs {U_exact.shape}")
    return U - U_exact


def error_relation_gap(U: np.ndarray, U_exact: np.ndarray, system: SylvesterSystem) -> dict:
    """Check how ``E = U - U_exact`` relates to ``F`` on the supported columns.

    When ``U`` satisfies the scheme, ``M1 E + E M2 + L(E) = -F`` there.
    Returns the largest deviation for both sign conventions.
    """
    E = error_matrix(U, U_exact)
    F = exact_residual(U_exact, system)
    lhs = system.lhs(E)
    cols = slice(0, system.shape[1] - 1)
    return {
        "minus_F": float(np.max(np.abs(lhs[:, cols] + F[:, cols]), initial=0.0)),
        "plus_F": float(np.max(np.abs(lhs[:, cols] - F[:, cols]), initial=0.0)),
        "sign": "minus",
    }


def supported_columns_max(R: np.ndarray) -> float:
    """Largest ``|R|`` over columns ``1..n_t-1``; the last column is truncated."""
    return float(np.max(np.abs(R[:, :-1]), initial=0.0))


def sample_interior(u, grid: GridSpec) -> np.ndarray:
    """Evaluate ``u(x, t)`` on interior nodes and levels ``1..n_t``."""
    x = grid.x[1:-1]
    t = grid.t[1:]
    X, Tt = np.meshgrid(x, t, indexing="ij")
    return np.asarray(u(X, Tt), dtype=float)


def system_summary(system: SylvesterSystem, tol: float = 0.0) -> dict:
    """Dimensions, nonzero counts, band pattern and Frobenius norms."""

    def pattern(M):
        offs = sorted({int(j - i) for i, j in zip(*np.nonzero(np.abs(M) > tol))})
        return offs

    return {
        "dims": {
            "M1": list(system.M1.shape),
            "M2": list(system.M2.shape),
            "M0": list(system.M0.shape),
        },
        "nnz": {k: int(np.count_nonzero(np.abs(getattr(system, k)) > tol)) for k in ("M1", "M2", "M0")},
        "pattern": {
            "M1_diagonals": pattern(system.M1),
            "M2_diagonals": pattern(system.M2),
            "M0_support": {
                "first_column": bool(np.any(system.M0[:, 0])),
                "first_row": bool(np.any(system.M0[0, 1:])),
                "last_row": bool(np.any(system.M0[-1, 1:])),
                "interior": bool(np.any(system.M0[1:-1, 1:])),
            },
        },
        "norms": {k: float(np.linalg.norm(getattr(system, k))) for k in ("M1", "M2", "M0")},
        "l_coeffs": list(system.l_coeffs),
        "truncated_column": system.shape[1],
    }
