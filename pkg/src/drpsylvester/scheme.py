"""Grids, the nine-weight explicit scheme class and its preset instances.

A scheme acts on the three-by-three space-time neighbourhood of node
``(i, n)``::

    alpha u[i,n+1] + beta u[i,n] + gamma u[i,n-1]
        + delta u[i+1,n] + epsilon u[i-1,n]
        + zeta u[i+1,n+1] + eta u[i-1,n-1] + theta u[i-1,n+1]
        + vartheta u[i+1,n-1] = 0

The five leading weights are stored split into a mesh-size dependent part
(``*_x``) and a time-step dependent part (``*_t``).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionError, SizingError, UnknownSchemeError

__all__ = [
    "GridSpec",
    "SchemeCoefficients",
    "EffectiveWeights",
    "BoundaryData",
    "make_grid",
    "effective",
    "is_restricted",
    "consistency_defect",
    "preset_scheme",
    "PRESETS",
    "boundary_from_function",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform space-time grid on ``[0, L] x [0, T]``."""

    L: float
    T: float
    n_x: int
    n_t: int
    c: float

    @property
    def h(self) -> float:
        return self.L / self.n_x

    @property
    def tau(self) -> float:
        return self.T / self.n_t

    @property
    def sigma(self) -> float:
        return self.c * self.tau / self.h

    @property
    def x(self) -> np.ndarray:
        """Node positions ``x_i = i h`` for ``i = 0..n_x``."""
        return np.arange(self.n_x + 1) * self.h

    @property
    def t(self) -> np.ndarray:
        """Time levels ``t_n = n tau`` for ``n = 0..n_t``."""
        return np.arange(self.n_t + 1) * self.tau


def make_grid(L: float, T: float, n_x: int, n_t: int, c: float) -> GridSpec:
    """Validate grid parameters and build a :class:`GridSpec`.

    Raises
    ------
    SizingError
        If ``n_x < 3``, ``n_t < 2``, ``L <= 0``, ``T <= 0`` or ``c == 0``.
    """
    if int(n_x) != n_x or n_x < 3:
        raise SizingError(f"n_x must be an integer >= 3, got {n_x!r}")
    if int(n_t) != n_t or n_t < 2:
        raise SizingError(f"n_t must be an integer >= 2, got {n_t!r}")
    if not (np.isfinite(L) and L > 0):
        raise SizingError(f"domain length L must be positive, got {L!r}")
    if not (np.isfinite(T) and T > 0):
        raise SizingError(f"final time T must be positive, got {T!r}")
    if not np.isfinite(c) or c == 0:
        raise SizingError(f"advection speed c must be finite and nonzero, got {c!r}")
    return GridSpec(float(L), float(T), int(n_x), int(n_t), float(c))


@dataclass(frozen=True)
class SchemeCoefficients:
    alpha_x: float = 0.0
    alpha_t: float = 0.0
    beta_x: float = 0.0
    beta_t: float = 0.0
    gamma_x: float = 0.0
    gamma_t: float = 0.0
    delta_x: float = 0.0
    delta_t: float = 0.0
    epsilon_x: float = 0.0
    epsilon_t: float = 0.0
    zeta: float = 0.0
    eta: float = 0.0
    theta: float = 0.0
    vartheta: float = 0.0

    def replace(self, **changes) -> "SchemeCoefficients":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


class EffectiveWeights(NamedTuple):
    alpha: float
    beta: float
    gamma: float
    delta: float
    epsilon: float
    zeta: float
    eta: float
    theta: float
    vartheta: float


def effective(coeffs: SchemeCoefficients) -> EffectiveWeights:
    """Sum the space and time parts of each split weight."""
    return EffectiveWeights(
        coeffs.alpha_x + coeffs.alpha_t,
        coeffs.beta_x + coeffs.beta_t,
        coeffs.gamma_x + coeffs.gamma_t,
        coeffs.delta_x + coeffs.delta_t,
        coeffs.epsilon_x + coeffs.epsilon_t,
        coeffs.zeta,
        coeffs.eta,
        coeffs.theta,
        coeffs.vartheta,
    )


def is_restricted(coeffs: SchemeCoefficients) -> bool:
    # exact comparison on purpose: the restriction is algebraic
    return (
        coeffs.alpha_t == 0
        and coeffs.gamma_t == 0
        and coeffs.zeta == 0
        and coeffs.eta == 0
        and coeffs.theta == 0
        and coeffs.vartheta == 0
    )


def consistency_defect(coeffs: SchemeCoefficients) -> float:
    """Sum of all nine effective weights.

    Zero iff constant fields are exact discrete solutions.
    """
    return float(sum(effective(coeffs)))


def _ftcs(grid: GridSpec) -> SchemeCoefficients:
    a = grid.c / (2 * grid.h)
    return SchemeCoefficients(alpha_x=1 / grid.tau, beta_x=-1 / grid.tau, delta_x=a, epsilon_x=-a)


def _leapfrog(grid: GridSpec, triple) -> SchemeCoefficients:
    beta, delta, epsilon = triple
    c = grid.c
    return SchemeCoefficients(
        alpha_x=1 / (2 * grid.tau),
        gamma_x=-1 / (2 * grid.tau),
        beta_x=c * beta,
        delta_x=c * delta,
        epsilon_x=c * epsilon,
    )


def _leapfrog_central(grid: GridSpec) -> SchemeCoefficients:
    return _leapfrog(grid, (0.0, 1 / (2 * grid.h), -1 / (2 * grid.h)))


def _leapfrog_paper_drp(grid: GridSpec) -> SchemeCoefficients:
    from .spectral import paper_optimal_coefficients

    return _leapfrog(grid, paper_optimal_coefficients(grid.h))


def _leapfrog_ls_drp(grid: GridSpec) -> SchemeCoefficients:
    from .spectral import least_squares_triple

    return _leapfrog(grid, least_squares_triple(grid.h))


PRESETS: dict[str, Callable[[GridSpec], SchemeCoefficients]] = {
    "ftcs": _ftcs,
    "leapfrog-central": _leapfrog_central,
    "leapfrog-paper-drp": _leapfrog_paper_drp,
    "leapfrog-ls-drp": _leapfrog_ls_drp,
}


def preset_scheme(name: str, grid: GridSpec) -> SchemeCoefficients:
    """Return the named scheme as a restricted coefficient set.

    Two-level schemes carry time weight ``1/tau``, three-level schemes
    ``1/(2 tau)``. The spatial triple of the leapfrog family is scaled by
    ``c`` so the scheme discretises ``u_t + c u_x = 0``.
    """
    try:
        build = PRESETS[name]
    except KeyError:
        raise UnknownSchemeError(
            f"unknown scheme {name!r}; choose one of {sorted(PRESETS)}"
        ) from None
    return build(grid)


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BoundaryData:
    """Known values of the space-time problem.

    ``initial`` holds ``u_i^0`` for ``i = 0..n_x``; ``left`` and ``right``
    hold ``u_0^n`` and ``u_{n_x}^n`` for ``n = 0..n_t``.
    """

    initial: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        for name in ("initial", "left", "right"):
            arr = _readonly(getattr(self, name))
            if arr.ndim != 1:
                raise DimensionError(f"boundary {name} must be one-dimensional")
            object.__setattr__(self, name, arr)
        if self.left.shape != self.right.shape:
            raise DimensionError("left and right boundary columns differ in length")
        if len(self.initial) < 2 or len(self.left) < 1:
            raise DimensionError("boundary data too short")
        if not np.isclose(self.initial[0], self.left[0], rtol=1e-12, atol=1e-14):
            raise DimensionError("corner u_0^0 differs between initial row and left column")
        if not np.isclose(self.initial[-1], self.right[0], rtol=1e-12, atol=1e-14):
            raise DimensionError("corner u_nx^0 differs between initial row and right column")

    @property
    def n_x(self) -> int:
        return len(self.initial) - 1

    @property
    def n_t(self) -> int:
        return len(self.left) - 1

    def check(self, grid: GridSpec) -> None:
        if self.n_x != grid.n_x or self.n_t != grid.n_t:
            raise DimensionError(
                f"boundary data sized for n_x={self.n_x}, n_t={self.n_t}; "
                f"grid has n_x={grid.n_x}, n_t={grid.n_t}"
            )

    @classmethod
    def zeros(cls, grid: GridSpec) -> "BoundaryData":
        return cls(np.zeros(grid.n_x + 1), np.zeros(grid.n_t + 1), np.zeros(grid.n_t + 1))


def boundary_from_function(grid: GridSpec, u: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> BoundaryData:
    """Sample ``u(x, t)`` on the initial row and the two boundary columns."""
    x, t = grid.x, grid.t
    return BoundaryData(
        initial=u(x, np.zeros_like(x)),
        left=u(np.zeros_like(t), t),
        right=u(np.full_like(t, x[-1]), t),
    )
