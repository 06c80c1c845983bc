import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drpsylvester.errors import DimensionError, SizingError, UnknownSchemeError
from drpsylvester.scheme import (
    PRESETS,
    BoundaryData,
    SchemeCoefficients,
    boundary_from_function,
    consistency_defect,
    effective,
    is_restricted,
    make_grid,
    preset_scheme,
)
from drpsylvester.spectral import paper_optimal_coefficients

finite = st.floats(-1e3, 1e3, allow_nan=False)


@pytest.mark.parametrize(
    "args",
    [
        (1.0, 1.0, 2, 4, 1.0),
        (1.0, 1.0, 8, 1, 1.0),
        (0.0, 1.0, 8, 4, 1.0),
        (1.0, -1.0, 8, 4, 1.0),
        (1.0, 1.0, 8, 4, 0.0),
        (1.0, 1.0, 8.5, 4, 1.0),
        (np.inf, 1.0, 8, 4, 1.0),
    ],
)
def test_make_grid_rejects(args):
    with pytest.raises(SizingError):
        make_grid(*args)


def test_grid_geometry():
    g = make_grid(2.0, 0.5, 8, 4, -3.0)
    assert g.h == 0.25 and g.tau == 0.125
    assert g.sigma == pytest.approx(-1.5)
    assert g.x[0] == 0 and g.x[-1] == 2.0 and len(g.x) == 9
    assert len(g.t) == 5 and g.t[-1] == 0.5


def test_sizing_error_is_value_error():
    assert issubclass(SizingError, ValueError)
    assert issubclass(UnknownSchemeError, KeyError)


@given(st.lists(finite, min_size=14, max_size=14))
def test_effective_sums_parts(vals):
    co = SchemeCoefficients(*vals)
    w = effective(co)
    d = co.as_dict()
    for name in ("alpha", "beta", "gamma", "delta", "epsilon"):
        assert getattr(w, name) == d[f"{name}_x"] + d[f"{name}_t"]
    assert (w.zeta, w.eta, w.theta, w.vartheta) == (co.zeta, co.eta, co.theta, co.vartheta)
    assert consistency_defect(co) == pytest.approx(sum(w), abs=1e-9)


@pytest.mark.parametrize("field", ["alpha_t", "gamma_t", "zeta", "eta", "theta", "vartheta"])
def test_restriction_fields(field):
    co = SchemeCoefficients(alpha_x=1.0, beta_t=2.0, delta_x=3.0)
    assert is_restricted(co)
    assert not is_restricted(co.replace(**{field: 1e-300}))


def test_coefficients_are_frozen():
    with pytest.raises(dataclasses.FrozenInstanceError):
        SchemeCoefficients().alpha_x = 1.0


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_restricted(name):
    g = make_grid(1.0, 0.5, 16, 8, 1.0)
    co = preset_scheme(name, g)
    assert is_restricted(co)
    assert effective(co).alpha != 0


def test_preset_time_weights():
    g = make_grid(1.0, 0.5, 16, 8, 2.0)
    ftcs = effective(preset_scheme("ftcs", g))
    assert ftcs.alpha == pytest.approx(1 / g.tau) and ftcs.beta == pytest.approx(-1 / g.tau) and ftcs.gamma == 0
    lf = effective(preset_scheme("leapfrog-central", g))
    assert lf.alpha == pytest.approx(1 / (2 * g.tau)) and lf.gamma == pytest.approx(-1 / (2 * g.tau))
    assert lf.delta == pytest.approx(g.c / (2 * g.h)) and lf.epsilon == pytest.approx(-g.c / (2 * g.h))


@pytest.mark.parametrize("name", ["ftcs", "leapfrog-central", "leapfrog-ls-drp"])
def test_consistent_presets(name):
    g = make_grid(1.0, 0.5, 16, 8, 1.0)
    assert abs(consistency_defect(preset_scheme(name, g))) < 1e-9


def test_paper_preset_consistency_defect():
    g = make_grid(1.0, 0.5, 16, 8, 1.5)
    expected = g.c * sum(paper_optimal_coefficients(g.h))
    assert consistency_defect(preset_scheme("leapfrog-paper-drp", g)) == pytest.approx(expected, rel=1e-12)
    assert expected != 0


def test_unknown_preset():
    g = make_grid(1.0, 0.5, 16, 8, 1.0)
    with pytest.raises(UnknownSchemeError) as exc:
        preset_scheme("upwind", g)
    assert "upwind" in str(exc.value) and "ftcs" in str(exc.value)


def test_boundary_data_readonly_and_corners():
    b = BoundaryData([1.0, 2.0, 3.0, 4.0], [1.0, 0.0, 0.0], [4.0, 5.0, 6.0])
    assert b.n_x == 3 and b.n_t == 2
    with pytest.raises(ValueError):
        b.initial[0] = 9.0
    with pytest.raises(DimensionError):
        BoundaryData([1.0, 2.0, 3.0], [0.0, 0.0], [3.0, 0.0])
    with pytest.raises(DimensionError):
        BoundaryData([1.0, 2.0, 3.0], [1.0, 0.0], [3.0, 0.0, 0.0])


def test_boundary_check_sizes():
    g = make_grid(1.0, 1.0, 4, 3, 1.0)
    b = BoundaryData.zeros(g)
    b.check(g)
    with pytest.raises(DimensionError):
        b.check(make_grid(1.0, 1.0, 5, 3, 1.0))


def test_boundary_from_function():
    g = make_grid(1.0, 1.0, 4, 3, 1.0)
    b = boundary_from_function(g, lambda x, t: x + 10 * t)
    np.testing.assert_allclose(b.initial, g.x)
    np.testing.assert_allclose(b.left, 10 * g.t)
    np.testing.assert_allclose(b.right, 1.0 + 10 * g.t)


@settings(max_examples=50)
@given(st.integers(3, 40), st.integers(2, 40), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3))
def test_sigma_definition(n_x, n_t, L, T, c):
    g = make_grid(L, T, n_x, n_t, c)
    assert g.sigma == pytest.approx(c * (T / n_t) / (L / n_x), rel=1e-12)


def test_ftcs_unit_example():
    g = make_grid(4.0, 2.0, 4, 2, 1.0)  # h = tau = 1
    co = preset_scheme("ftcs", g)
    assert (co.alpha_x, co.beta_x, co.delta_x, co.epsilon_x) == (1.0, -1.0, 0.5, -0.5)
    assert effective(co).gamma == 0
