"""Modified-wavenumber analysis and optimisation of first-derivative stencils.

A stencil approximates ``u'(x)`` by ``(1/h) sum_m a_m u(x + m h)``. With
``kappa = omega h`` its modified wavenumber is

    lambda_bar h = -j sum_m a_m exp(j m kappa)

and the band-integrated dispersion error is

    E(a) = int_{band} |kappa - lambda_bar h|^2 d kappa.

Coefficients come from two sources that are kept apart: the closed form
published with the three-point DRP construction (``paper_*``) and a direct
constrained least-squares minimisation of ``E`` (``least_squares_*``).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.linalg import null_space

from .errors import SingularSystemError

__all__ = [
    "SpatialTriple",
    "Constraint",
    "StencilSpec",
    "QuadratureSpec",
    "triple_to_stencil",
    "stencil_to_triple",
    "effective_wavenumber",
    "integrand",
    "integrated_error",
    "integrated_error_closed_form",
    "paper_linear_system",
    "paper_system_residual",
    "paper_optimal_coefficients",
    "least_squares_optimal_coefficients",
    "least_squares_triple",
    "stationarity_residual",
    "normal_equations",
]


class SpatialTriple(NamedTuple):
    """Weights of ``u_l``, ``u_{l+1}`` and ``u_{l-1}`` (units 1/length)."""

    beta_x: float
    delta_x: float
    epsilon_x: float


@dataclass(frozen=True)
class Constraint:
    """Linear side condition on stencil coefficients.

    ``kind="taylor"`` with ``order=p`` demands exactness on polynomials up
    to degree ``p``; ``kind="antisymmetric"`` demands ``a_{-m} = -a_m``.
    """

    kind: str
    order: int = 0

    def __post_init__(self):
        if self.kind not in ("taylor", "antisymmetric"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind == "taylor" and self.order < 0:
            raise ValueError("taylor order must be >= 0")

    def rows(self, offsets: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = offsets.astype(float)
        if self.kind == "taylor":
            q = np.arange(self.order + 1)
            C = m[None, :] ** q[:, None]
            r = (q == 1).astype(float)
            return C, r
        half = int(offsets.max())
        C = np.zeros((half + 1, len(offsets)))
        for k in range(half + 1):
            C[k, half + k] += 1.0
            C[k, half - k] += 1.0
        return C, np.zeros(half + 1)


@dataclass(frozen=True)
class StencilSpec:
    """Centred ``(2N+1)``-point stencil with nondimensional coefficients.

    ``coefficients[k]`` multiplies ``u(x + (k - N) h)`` after scaling by
    ``1/h``.
    """

    half_width: int
    coefficients: tuple = None
    constraints: tuple = field(default=())

    def __post_init__(self):
        if self.half_width < 1:
            raise ValueError("half_width must be >= 1")
        if self.coefficients is None:
            object.__setattr__(self, "coefficients", (0.0,) * self.size)
        coeffs = tuple(float(a) for a in self.coefficients)
        if len(coeffs) != self.size:
            raise ValueError(f"expected {self.size} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def size(self) -> int:
        return 2 * self.half_width + 1

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.half_width, self.half_width + 1)

    @property
    def a(self) -> np.ndarray:
        return np.asarray(self.coefficients)

    def with_coefficients(self, coefficients) -> "StencilSpec":
        return dataclasses.replace(self, coefficients=tuple(coefficients))

    def constraint_system(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.constraints:
            return np.zeros((0, self.size)), np.zeros(0)
        blocks = [c.rows(self.offsets) for c in self.constraints]
        return np.vstack([b[0] for b in blocks]), np.concatenate([b[1] for b in blocks])


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre rule on the wavenumber band ``[lo, hi]``."""

    lo: float = -np.pi / 2
    hi: float = np.pi / 2
    nodes: int = 64

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"band must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.nodes < 16 or self.nodes % 2:
            raise ValueError(f"node count must be even and >= 16, got {self.nodes}")

    def rule(self) -> tuple[np.ndarray, np.ndarray]:
        x, w = _legendre(self.nodes)
        half = 0.5 * (self.hi - self.lo)
        return self.lo + half * (x + 1.0), half * w


@lru_cache(maxsize=16)
def _legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


Stencilish = Union[StencilSpec, SpatialTriple, Sequence[float]]


def triple_to_stencil(triple, h: float) -> StencilSpec:
    beta, delta, epsilon = triple
    return StencilSpec(1, (h * epsilon, h * beta, h * delta))


def stencil_to_triple(stencil: StencilSpec, h: float) -> SpatialTriple:
    if stencil.half_width != 1:
        raise ValueError("only three-point stencils map to a spatial triple")
    a_m1, a_0, a_1 = stencil.coefficients
    return SpatialTriple(a_0 / h, a_1 / h, a_m1 / h)


def _as_stencil(obj: Stencilish, h) -> StencilSpec:
    if isinstance(obj, StencilSpec):
        return obj
    if h is None:
        raise TypeError("a mesh size h is required for a spatial triple")
    return triple_to_stencil(obj, h)


def effective_wavenumber(obj: Stencilish, kappa, h: float | None = None):
    """Modified wavenumber ``lambda_bar h`` at ``kappa`` (scalar or array)."""
    st = _as_stencil(obj, h)
    kappa = np.asarray(kappa, dtype=float)
    phase = np.exp(1j * np.multiply.outer(kappa, st.offsets))
    return -1j * (phase @ st.a)


def integrand(obj: Stencilish, kappa, h: float | None = None):
    """``|kappa - lambda_bar h|^2`` pointwise."""
    kappa = np.asarray(kappa, dtype=float)
    return np.abs(kappa - effective_wavenumber(obj, kappa, h)) ** 2


def integrated_error(obj: Stencilish, h: float | None = None, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Band integral of the dispersion error by Gauss-Legendre quadrature."""
    k, w = quad.rule()
    return float(w @ integrand(obj, k, h))


def integrated_error_closed_form(triple, h: float, band: tuple[float, float] = (-np.pi / 2, np.pi / 2)) -> float:
    """Exact band integral for a three-point stencil.

    With ``d = a_1 - a_{-1}`` and ``s = a_1 + a_{-1}`` the integrand is
    ``(kappa - d sin kappa)^2 + (a_0 + s cos kappa)^2``.
    """
    beta, delta, epsilon = triple
    a0, a1, am1 = h * beta, h * delta, h * epsilon
    d, s = a1 - am1, a1 + am1

    def antiderivative(k):
        return (
            k**3 / 3
            - 2 * d * (np.sin(k) - k * np.cos(k))
            + d * d * (k / 2 - np.sin(2 * k) / 4)
            + a0 * a0 * k
            + 2 * a0 * s * np.sin(k)
            + s * s * (k / 2 + np.sin(2 * k) / 4)
        )

    lo, hi = band
    return float(antiderivative(hi) - antiderivative(lo))


def paper_linear_system(h: float) -> tuple[np.ndarray, np.ndarray]:
    """Published stationarity system in ``(beta_x, delta_x, epsilon_x)``.

    Rows are reproduced verbatim, including the mixed placement of ``h``.
    """
    pi = np.pi
    A = np.array(
        [
            [2 * pi * h, 4 * h, 4 * h],
            [4 * h, 2 * pi, 0.0],
            [4 * h, 0.0, 2 * pi * h],
        ]
    )
    rhs = np.array([4.0, pi, 0.0])
    return A, rhs


def paper_system_residual(triple, h: float) -> np.ndarray:
    A, rhs = paper_linear_system(h)
    return A @ np.asarray(triple, dtype=float) - rhs


def paper_optimal_coefficients(h: float) -> SpatialTriple:
    """Published closed-form optimum (literal ``h`` placement)."""
    den = h * (np.pi**2 - 8)
    return SpatialTriple(np.pi / den, 0.5 - 2 / den, -2 / den)


def normal_equations(stencil: StencilSpec, quad: QuadratureSpec = QuadratureSpec()) -> tuple[np.ndarray, np.ndarray, float]:
    """Quadratic form of the integrated error, ``E = c0 - 2 b.a + a.Q.a``."""
    k, w = quad.rule()
    m = stencil.offsets
    diff = m[:, None] - m[None, :]
    Q = np.cos(np.multiply.outer(diff, k)) @ w
    b = (k * np.sin(np.multiply.outer(m, k))) @ w
    c0 = float(w @ k**2)
    return Q, b, c0


def least_squares_optimal_coefficients(stencil: StencilSpec, quad: QuadratureSpec = QuadratureSpec()) -> StencilSpec:
    """Minimise the integrated error subject to the stencil's constraints.

    Feasible coefficients are parametrised as ``a = a_p + Z z`` with ``Z``
    an orthonormal basis of the constraint null space; the reduced normal
    equations ``Z^T Q Z z = Z^T (b - Q a_p)`` are then solved.

    Raises
    ------
    SingularSystemError
        Constraints that are inconsistent or leave no freedom, or a band on
        which the reduced normal matrix is singular.
    """
    Q, b, _ = normal_equations(stencil, quad)
    C, r = stencil.constraint_system()
    n = stencil.size
    if len(r):
        a_p, *_ = np.linalg.lstsq(C, r, rcond=None)
        if np.linalg.norm(C @ a_p - r) > 1e-10 * max(1.0, np.linalg.norm(r)):
            raise SingularSystemError("stencil constraints are inconsistent")
        Z = null_space(C)
        if Z.shape[1] == 0:
            raise SingularSystemError("constraints fix every coefficient; nothing left to optimise")
    else:
        a_p = np.zeros(n)
        Z = np.eye(n)
    H = Z.T @ Q @ Z
    g = Z.T @ (b - Q @ a_p)
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularSystemError(f"reduced normal equations are singular (cond={cond:.3g})")
    z = np.linalg.solve(H, g)
    return stencil.with_coefficients(a_p + Z @ z)


def stationarity_residual(obj: Stencilish, quad: QuadratureSpec = QuadratureSpec(), h: float | None = None) -> np.ndarray:
    """Gradient of the integrated error with respect to the coefficients.

    Obtained by differentiating under the integral sign. For constrained
    stencils the gradient is projected onto the feasible directions, so it
    vanishes at a constrained minimiser.

    For a spatial triple the result is ordered like the stencil,
    ``(d/da_{-1}, d/da_0, d/da_1)``, in nondimensional coefficients.
    """
    st = _as_stencil(obj, h)
    k, w = quad.rule()
    z = k - effective_wavenumber(st, k)
    dz = 1j * np.exp(1j * np.multiply.outer(k, st.offsets))
    grad = 2.0 * (np.real(np.conj(z)[:, None] * dz).T @ w)
    C, _ = st.constraint_system()
    if len(C):
        Z = null_space(C)
        grad = Z @ (Z.T @ grad)
    return grad


@lru_cache(maxsize=8)
def _ls_three_point(quad: QuadratureSpec) -> tuple:
    return least_squares_optimal_coefficients(StencilSpec(1), quad).coefficients


def least_squares_triple(h: float, quad: QuadratureSpec = QuadratureSpec()) -> SpatialTriple:
    """Unconstrained three-point least-squares optimum, scaled by ``1/h``."""
    return stencil_to_triple(StencilSpec(1, _ls_three_point(quad)), h)
