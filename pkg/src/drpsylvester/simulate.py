"""Explicit time stepping of ``u_t + c u_x = 0`` and error-norm histories."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InstabilityError, MissingLevelError, NotExplicitError
from .scheme import BoundaryData, GridSpec, SchemeCoefficients, effective, is_restricted, preset_scheme
from .spectral import Constraint, QuadratureSpec, StencilSpec, least_squares_optimal_coefficients

__all__ = [
    "InitialCondition",
    "ErrorSeries",
    "SimulationResult",
    "exact_solution",
    "step",
    "step_stencil",
    "run_simulation",
    "error_norms",
    "ftcs_amplification",
    "seven_point_drp_stencil",
    "simulation_scheme",
    "BOUNDARY_POLICIES",
    "BOOTSTRAPS",
]

BOUNDARY_POLICIES = ("dirichlet-exact", "periodic")
BOOTSTRAPS = ("exact", "ftcs")


@dataclass(frozen=True)
class InitialCondition:
    """``sine``: ``sin(k x)``; ``gaussian``: ``exp(-((x - x0)/s)^2 / 2)``."""

    kind: str = "sine"
    k: float | None = None
    x0: float | None = None
    s: float | None = None

    def __post_init__(self):
        if self.kind == "sine":
            if self.k is None:
                raise ValueError("sine initial condition needs a wavenumber k")
        elif self.kind == "gaussian":
            if self.x0 is None or self.s is None or self.s <= 0:
                raise ValueError("gaussian initial condition needs x0 and a positive width s")
        else:
            raise ValueError(f"unknown initial condition kind {self.kind!r}")

    def check(self, grid: GridSpec) -> None:
        """Resolution guard against the grid's mesh size."""
        h = grid.h
        if self.kind == "sine" and not abs(self.k) * h < np.pi:
            raise ValueError(f"wavenumber k={self.k} is not resolved (k h = {abs(self.k) * h:.3g} >= pi)")
        if self.kind == "gaussian":
            if self.s < 2 * h:
                raise ValueError(f"gaussian width s={self.s} is below 2h={2 * h}")
            if self.s < 4 * h:
                warnings.warn(f"gaussian width s={self.s} is below 4h; expect dispersion", stacklevel=2)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "sine":
            return np.sin(self.k * x)
        return np.exp(-0.5 * ((x - self.x0) / self.s) ** 2)


def exact_solution(ic: InitialCondition, x, t, c: float, period: float | None = None):
    """``u0(x - c t)``; with ``period`` the gaussian is wrapped to its nearest image."""
    xi = np.asarray(x, dtype=float) - c * np.asarray(t, dtype=float)
    if period is not None and ic.kind == "gaussian":
        xi = ic.x0 + np.mod(xi - ic.x0 + period / 2, period) - period / 2
    return ic(xi)


@dataclass
class ErrorSeries:
    step: np.ndarray
    t: np.ndarray
    t_over_T: np.ndarray
    linf: np.ndarray
    l2: np.ndarray

    HEADER = ("step", "t", "t_over_T", "linf", "l2")

    def __len__(self):
        return len(self.step)

    def rows(self):
        for k in range(len(self)):
            yield (int(self.step[k]), float(self.t[k]), float(self.t_over_T[k]), float(self.linf[k]), float(self.l2[k]))

    def truncated(self, n: int) -> "ErrorSeries":
        return ErrorSeries(*(getattr(self, f)[:n] for f in self.HEADER))


def error_norms(U: np.ndarray, grid: GridSpec, ic: InitialCondition, period: float | None = None) -> ErrorSeries:
    """Per-level L-infinity and discrete L2 errors over the interior nodes.

    Column ``k`` of ``U`` is time level ``k + 1``.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 2 or U.shape[0] != grid.n_x - 1:
        raise DimensionError(f"U must have {grid.n_x - 1} rows, got shape {U.shape}")
    levels = np.arange(1, U.shape[1] + 1)
    t = levels * grid.tau
    X, Tt = np.meshgrid(grid.x[1:-1], t, indexing="ij")
    err = U - exact_solution(ic, X, Tt, grid.c, period)
    linf = np.max(np.abs(err), axis=0, initial=0.0)
    l2 = np.sqrt(grid.h * np.sum(err**2, axis=0))
    return ErrorSeries(levels, t, levels / grid.n_t, linf, l2)


def ftcs_amplification(sigma: float, kappa) -> np.ndarray:
    """``|g|`` of FTCS for mode ``kappa``: ``sqrt(1 + sigma^2 sin^2 kappa)``."""
    return np.sqrt(1 + sigma**2 * np.sin(kappa) ** 2)


def step(
    current: np.ndarray,
    coeffs: SchemeCoefficients,
    left: float = 0.0,
    right: float = 0.0,
    previous: np.ndarray | None = None,
    periodic: bool = False,
) -> np.ndarray:
    """Advance one level with a restricted nine-weight scheme.

    Interior nodes get ``-(beta u_i + gamma u_i^- + delta u_{i+1} +
    epsilon u_{i-1}) / alpha``. The end nodes take ``left``/``right`` or,
    with ``periodic``, wrap (node ``n_x`` duplicates node 0).

    Raises
    ------
    NotExplicitError
        ``alpha == 0``.
    MissingLevelError
        ``gamma != 0`` and no ``previous`` level.
    """
    if not is_restricted(coeffs):
        raise ValueError("explicit stepping needs restricted coefficients")
    w = effective(coeffs)
    if w.alpha == 0:
        raise NotExplicitError("alpha == 0: the new level does not appear in the scheme")
    if w.gamma != 0 and previous is None:
        raise MissingLevelError("three-level scheme needs the previous level")
    u = np.asarray(current, dtype=float)
    out = np.empty_like(u)
    if periodic:
        v = u[:-1]
        acc = w.beta * v + w.delta * np.roll(v, -1) + w.epsilon * np.roll(v, 1)
        if w.gamma:
            acc = acc + w.gamma * np.asarray(previous, dtype=float)[:-1]
        out[:-1] = -acc / w.alpha
        out[-1] = out[0]
        return out
    acc = w.beta * u[1:-1] + w.delta * u[2:] + w.epsilon * u[:-2]
    if w.gamma:
        acc = acc + w.gamma * np.asarray(previous, dtype=float)[1:-1]
    out[1:-1] = -acc / w.alpha
    out[0], out[-1] = left, right
    return out


def step_stencil(current, previous, stencil: StencilSpec, grid: GridSpec, ghosts=None, periodic=False) -> np.ndarray:
    """Leapfrog step with a wide centred first-derivative stencil.

    ``ghosts`` is ``(lo, hi)``: values at the ``N`` nodes beyond each end,
    including the boundary node itself on that side, for the new level's
    neighbours at the current level. Boundary nodes are left to the caller.
    """
    u = np.asarray(current, dtype=float)
    N = stencil.half_width
    a = stencil.a
    if periodic:
        v = u[:-1]
        du = sum(a[N + m] * np.roll(v, -m) for m in range(-N, N + 1))
        out = np.empty_like(u)
        out[:-1] = np.asarray(previous)[:-1] - 2 * grid.tau * grid.c * du / grid.h
        out[-1] = out[0]
        return out
    lo, hi = ghosts
    ext = np.concatenate([lo, u[1:-1], hi])
    n = len(u) - 2
    du = sum(a[N + m] * ext[N + m : N + m + n] for m in range(-N, N + 1))
    out = np.empty_like(u)
    out[1:-1] = np.asarray(previous)[1:-1] - 2 * grid.tau * grid.c * du / grid.h
    return out


def seven_point_drp_stencil(quad: QuadratureSpec = QuadratureSpec()) -> StencilSpec:
    """Antisymmetric 7-point stencil, fourth-order exact, optimised on the band."""
    base = StencilSpec(3, constraints=(Constraint("antisymmetric"), Constraint("taylor", 4)))
    return least_squares_optimal_coefficients(base, quad)


def simulation_scheme(name: str, grid: GridSpec):
    """Preset coefficients, or a wide stencil for ``leapfrog-drp7``."""
    if name == "leapfrog-drp7":
        return seven_point_drp_stencil()
    return preset_scheme(name, grid)


@dataclass
class SimulationResult:
    levels: np.ndarray  # (n_steps+1, n_x+1), all nodes
    series: ErrorSeries
    metadata: dict = field(default_factory=dict)

    @property
    def U(self) -> np.ndarray:
        """Interior solution matrix, rows ``i = 1..n_x-1``, columns ``n = 1..``."""
        return self.levels[1:, 1:-1].T.copy()

    @property
    def boundary(self) -> BoundaryData:
        return BoundaryData(self.levels[0], self.levels[:, 0], self.levels[:, -1])


def run_simulation(
    grid: GridSpec,
    scheme,
    ic: InitialCondition,
    boundary: str = "dirichlet-exact",
    bootstrap: str = "exact",
    n_steps: int | None = None,
    blowup: float = 1e8,
) -> SimulationResult:
    """Step from ``u^0`` to level ``n_steps`` (default ``n_t``).

    ``scheme`` is a restricted :class:`SchemeCoefficients` or a
    :class:`StencilSpec` (leapfrog in time). Three-level schemes take
    ``u^1`` from the exact solution or from one FTCS step.

    Raises
    ------
    InstabilityError
        A non-finite value, or magnitude above ``blowup`` times the data
        scale; ``err.step`` is the offending level and ``err.partial`` the
        error series up to the level before.
    """
    if boundary not in BOUNDARY_POLICIES:
        raise ValueError(f"boundary policy must be one of {BOUNDARY_POLICIES}, got {boundary!r}")
    if bootstrap not in BOOTSTRAPS:
        raise ValueError(f"bootstrap must be one of {BOOTSTRAPS}, got {bootstrap!r}")
    ic.check(grid)
    n_steps = grid.n_t if n_steps is None else int(n_steps)
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    periodic = boundary == "periodic"
    period = grid.L if periodic else None
    x = grid.x
    c, tau = grid.c, grid.tau

    def exact(t, xs=x):
        return exact_solution(ic, xs, t, c, period)

    wide = isinstance(scheme, StencilSpec)
    three_level = wide or effective(scheme).gamma != 0
    if not wide and effective(scheme).alpha == 0:
        raise NotExplicitError("alpha == 0: the new level does not appear in the scheme")
    if wide:
        # ghost nodes 1-N..0 and n_x..n_x+N-1, sampled from the exact solution
        N = scheme.half_width
        ghost_lo = np.arange(1 - N, 1) * grid.h
        ghost_hi = x[-1] + np.arange(N) * grid.h
    ends = np.array([0.0, x[-1]])

    def edges(t):
        if periodic:
            return 0.0, 0.0
        left, right = exact(t, ends)
        return float(left), float(right)

    levels = np.empty((n_steps + 1, grid.n_x + 1))
    levels[0] = exact(0.0)
    scale = max(1.0, float(np.max(np.abs(levels[0]))))
    meta = {
        "boundary": boundary,
        "bootstrap": bootstrap if three_level else "none (two-level)",
        "three_level": three_level,
        "sigma": grid.sigma,
    }

    def finish(n_done):
        U = levels[1 : n_done + 1, 1:-1].T
        return error_norms(U, grid, ic, period)

    for n in range(n_steps):
        t_new = (n + 1) * tau
        if n == 0 and three_level:
            if bootstrap == "exact":
                new = exact(t_new)
            else:
                new = step(levels[0], preset_scheme("ftcs", grid), *edges(t_new), periodic=periodic)
        elif wide:
            ghosts = None
            if not periodic:
                t_cur = n * tau
                ghosts = (exact(t_cur, ghost_lo), exact(t_cur, ghost_hi))
            new = step_stencil(levels[n], levels[n - 1], scheme, grid, ghosts, periodic)
            if not periodic:
                new[0], new[-1] = edges(t_new)
        else:
            prev = levels[n - 1] if three_level else None
            new = step(levels[n], scheme, *edges(t_new), previous=prev, periodic=periodic)
        if not np.all(np.isfinite(new)) or np.max(np.abs(new)) > blowup * scale:
            raise InstabilityError(
                f"solution exceeded {blowup:g} x data scale at step {n + 1}", step=n + 1, partial=finish(n)
            )
        levels[n + 1] = new
    return SimulationResult(levels, finish(n_steps), meta)

