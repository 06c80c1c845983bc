"""Run configuration: a single JSON document, validated up front."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

from .errors import ConfigError, DRPError
from .scheme import PRESETS, GridSpec, SchemeCoefficients, make_grid
from .simulate import BOOTSTRAPS, BOUNDARY_POLICIES, InitialCondition
from .spectral import QuadratureSpec

SIM_SCHEMES = tuple(PRESETS) + ("leapfrog-drp7",)
FORMATS = ("csv", "json")
DEFAULT_CFL = 0.5

_COEFF_FIELDS = {f.name for f in fields(SchemeCoefficients)}
_IC_KEYS = {"kind", "k", "x0", "s"}
_QUAD_KEYS = {"lo", "hi", "nodes"}
_SWEEP_KEYS = {"box", "points", "weights"}


@dataclass
class RunConfig:
    L: float = 1.0
    T: float | None = None
    n_x: int = 200
    n_t: int | None = None
    c: float = 1.0
    cfl: float = DEFAULT_CFL
    scheme: str = "leapfrog-paper-drp"
    schemes: list | None = None
    overrides: dict = field(default_factory=dict)
    ic: dict = field(default_factory=dict)
    boundary: str = "dirichlet-exact"
    bootstrap: str = "exact"
    quadrature: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    bound_trials: int = 20
    spectral_points: int = 257
    out: str = "out"
    format: str = "csv"
    seed: int = 0
    workers: int = 4

    def grid(self) -> GridSpec:
        return make_grid(self.L, self.T, self.n_x, self.n_t, self.c)

    def initial_condition(self) -> InitialCondition:
        return InitialCondition(**self.ic)

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(**self.quadrature)

    def coefficients(self, name: str | None = None) -> tuple[SchemeCoefficients, str]:
        """Preset coefficients with overrides applied, plus their provenance."""
        from .scheme import preset_scheme

        co = preset_scheme(name or self.scheme, self.grid())
        if self.overrides:
            return co.replace(**self.overrides), "override"
        return co, "preset"

    def sim_schemes(self) -> list:
        return list(self.schemes) if self.schemes else [self.scheme]


_FIELD_NAMES = [f.name for f in fields(RunConfig)]


def _reject_unknown(d: dict, allowed, where: str):
    for key in d:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}", field=key)


def _fill_defaults(cfg: RunConfig) -> None:
    if cfg.T is None:
        cfg.T = cfg.L / (2 * abs(cfg.c)) if cfg.c else cfg.L
    if cfg.n_t is None:
        h = cfg.L / cfg.n_x
        cfg.n_t = max(2, math.ceil(abs(cfg.c) * cfg.T / (cfg.cfl * h)))
    if not cfg.ic:
        cfg.ic = {"kind": "sine", "k": 2 * math.pi / cfg.L}
    elif cfg.ic.get("kind", "sine") == "sine" and "k" not in cfg.ic:
        cfg.ic = {**cfg.ic, "kind": "sine", "k": 2 * math.pi / cfg.L}
    q = QuadratureSpec()
    cfg.quadrature = {"lo": q.lo, "hi": q.hi, "nodes": q.nodes, **cfg.quadrature}


def validate(cfg: RunConfig) -> RunConfig:
    """Check every module precondition before any computation."""
    for name in ("L", "c", "cfl"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name} must be a number", field=name)
    for name in ("n_x", "bound_trials", "spectral_points", "seed", "workers"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"{name} must be an integer", field=name)
    for name in ("T", "n_t"):
        v = getattr(cfg, name)
        if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float))):
            raise ConfigError(f"{name} must be a number", field=name)
    if not cfg.cfl > 0:
        raise ConfigError("cfl must be positive", field="cfl")
    _reject_unknown(cfg.ic, _IC_KEYS, "ic")
    _reject_unknown(cfg.quadrature, _QUAD_KEYS, "quadrature")
    _reject_unknown(cfg.sweep, _SWEEP_KEYS, "sweep")
    _reject_unknown(cfg.overrides, _COEFF_FIELDS, "overrides")
    if cfg.n_x < 3:
        raise ConfigError(f"make_grid precondition violated: n_x must be >= 3, got {cfg.n_x}", field="n_x")
    _fill_defaults(cfg)
    try:
        grid = cfg.grid()
    except DRPError as exc:
        raise ConfigError(f"make_grid precondition violated: {exc}") from exc
    if cfg.scheme not in PRESETS:
        raise ConfigError(f"unknown scheme {cfg.scheme!r}; choose one of {sorted(PRESETS)}", field="scheme")
    for name in cfg.schemes or ():
        if name not in SIM_SCHEMES:
            raise ConfigError(f"unknown scheme {name!r} in schemes; choose from {list(SIM_SCHEMES)}", field="schemes")
    if cfg.boundary not in BOUNDARY_POLICIES:
        raise ConfigError(f"boundary must be one of {BOUNDARY_POLICIES}", field="boundary")
    if cfg.bootstrap not in BOOTSTRAPS:
        raise ConfigError(f"bootstrap must be one of {BOOTSTRAPS}", field="bootstrap")
    if cfg.format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}", field="format")
    if cfg.workers < 1 or cfg.bound_trials < 0 or cfg.spectral_points < 2:
        raise ConfigError("workers >= 1, bound_trials >= 0 and spectral_points >= 2 required")
    try:
        cfg.initial_condition().check(grid)
    except ValueError as exc:
        raise ConfigError(f"initial condition: {exc}", field="ic") from exc
    try:
        cfg.quad()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"quadrature: {exc}", field="quadrature") from exc
    for k, v in cfg.overrides.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"override {k} must be a number", field=k)
    return cfg


def from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(d, _FIELD_NAMES, "configuration")
    cfg = RunConfig(**d)
    return validate(cfg)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document."""
    try:
        d = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}", line=exc.lineno) from exc
    return from_dict(d)


def emit_config(cfg: RunConfig) -> str:
    return json.dumps(asdict(cfg), indent=2, sort_keys=True) + "\n"
