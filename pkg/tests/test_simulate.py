import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from drpsylvester.errors import InstabilityError, MissingLevelError, NotExplicitError
from drpsylvester.scheme import SchemeCoefficients, make_grid, preset_scheme
from drpsylvester.simulate import (
    ErrorSeries,
    InitialCondition,
    error_norms,
    exact_solution,
    ftcs_amplification,
    run_simulation,
    seven_point_drp_stencil,
    simulation_scheme,
    step,
)

SINE = InitialCondition("sine", k=2 * np.pi)


@pytest.mark.parametrize("boundary", ["dirichlet-exact", "periodic"])
def test_leapfrog_exact_at_unit_cfl(boundary):
    grid = make_grid(1.0, 1.0, 64, 64, 1.0)
    sim = run_simulation(grid, preset_scheme("leapfrog-central", grid), SINE, boundary=boundary)
    assert np.max(sim.series.linf) < 1e-12
    assert len(sim.series) == 64


def test_leapfrog_exact_negative_speed():
    grid = make_grid(1.0, 1.0, 32, 32, -1.0)
    sim = run_simulation(grid, preset_scheme("leapfrog-central", grid), SINE)
    assert np.max(sim.series.linf) < 1e-12


def test_ftcs_growth_detected():
    grid = make_grid(1.0, 40.0, 64, 2560, 1.0)
    with pytest.raises(InstabilityError) as exc:
        run_simulation(grid, preset_scheme("ftcs", grid), SINE)
    err = exc.value
    assert err.step > 1
    assert len(err.partial) == err.step - 1
    assert np.all(np.isfinite(err.partial.linf))


@given(st.floats(0.01, 2.0), st.floats(0.01, np.pi - 0.01))
def test_ftcs_amplification_exceeds_one(sigma, kappa):
    assert ftcs_amplification(sigma, kappa) > 1


def test_ftcs_amplification_matches_one_step():
    grid = make_grid(1.0, 0.5, 32, 32, 1.0)
    x = grid.x
    kappa = 2 * np.pi * grid.h
    u0 = np.exp(1j * 2 * np.pi * x)
    co = preset_scheme("ftcs", grid)
    u1 = step(u0.real, co, periodic=True) + 1j * step(u0.imag, co, periodic=True)
    g = u1[5] / u0[5]
    assert abs(g) == pytest.approx(ftcs_amplification(grid.sigma, kappa), rel=1e-12)


def test_paper_preset_blows_up_under_leapfrog():
    grid = make_grid(1.0, 1.0, 64, 64, 1.0)
    with pytest.raises(InstabilityError):
        run_simulation(grid, preset_scheme("leapfrog-paper-drp", grid), SINE)


def test_ftcs_bootstrap_close_to_exact():
    grid = make_grid(1.0, 0.25, 64, 32, 1.0)
    co = preset_scheme("leapfrog-central", grid)
    a = run_simulation(grid, co, SINE, bootstrap="exact")
    b = run_simulation(grid, co, SINE, bootstrap="ftcs")
    assert b.metadata["bootstrap"] == "ftcs"
    assert np.max(b.series.linf) < 0.05
    assert not np.allclose(a.levels, b.levels)


def test_two_level_scheme_ignores_bootstrap():
    grid = make_grid(1.0, 0.1, 64, 40, 1.0)
    sim = run_simulation(grid, preset_scheme("ftcs", grid), SINE)
    assert sim.metadata["three_level"] is False


def test_drp7_beats_central_when_resolved():
    grid = make_grid(1.0, 0.5, 32, 64, 1.0)
    ic = InitialCondition("sine", k=6 * np.pi)
    c = run_simulation(grid, simulation_scheme("leapfrog-central", grid), ic)
    d = run_simulation(grid, simulation_scheme("leapfrog-drp7", grid), ic)
    assert d.series.linf[-1] < c.series.linf[-1]


def test_drp7_periodic_runs():
    grid = make_grid(1.0, 0.5, 40, 80, 1.0)
    sim = run_simulation(grid, seven_point_drp_stencil(), SINE, boundary="periodic")
    assert sim.series.linf[-1] < 1e-3


def test_gaussian_periodic_wrap():
    ic = InitialCondition("gaussian", x0=0.5, s=0.08)
    grid = make_grid(1.0, 1.0, 100, 200, 1.0)
    sim = run_simulation(grid, preset_scheme("leapfrog-central", grid), ic, boundary="periodic")
    # after one full period the pulse is back where it started
    np.testing.assert_allclose(exact_solution(ic, grid.x, 1.0, 1.0, period=1.0), ic(grid.x), atol=1e-12)
    assert sim.series.linf[-1] < 0.1


def test_step_rules():
    co = SchemeCoefficients(alpha_x=1.0, gamma_x=-1.0, delta_x=0.5, epsilon_x=-0.5)
    with pytest.raises(MissingLevelError):
        step(np.zeros(5), co)
    with pytest.raises(NotExplicitError):
        step(np.zeros(5), SchemeCoefficients(beta_x=1.0))
    with pytest.raises(ValueError):
        step(np.zeros(5), co.replace(zeta=1.0), previous=np.zeros(5))
    out = step(np.arange(5.0), co, left=7.0, right=9.0, previous=np.ones(5))
    assert out[0] == 7.0 and out[-1] == 9.0
    np.testing.assert_allclose(out[1:-1], 1.0 - 0.5 * 2.0)


def test_not_explicit_simulation():
    grid = make_grid(1.0, 1.0, 8, 4, 1.0)
    with pytest.raises(NotExplicitError):
        run_simulation(grid, SchemeCoefficients(beta_x=1.0), SINE)


@pytest.mark.parametrize(
    "kw", [{"kind": "sine"}, {"kind": "gaussian", "x0": 0.5}, {"kind": "gaussian", "x0": 0.5, "s": -1}, {"kind": "box"}]
)
def test_initial_condition_validation(kw):
    with pytest.raises(ValueError):
        InitialCondition(**kw)


def test_resolution_guards():
    grid = make_grid(1.0, 1.0, 8, 4, 1.0)
    with pytest.raises(ValueError):
        InitialCondition("sine", k=8 * np.pi).check(grid)
    with pytest.raises(ValueError):
        InitialCondition("gaussian", x0=0.5, s=0.2).check(grid)
    with pytest.warns(UserWarning):
        InitialCondition("gaussian", x0=0.5, s=0.3).check(grid)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        InitialCondition("gaussian", x0=0.5, s=0.6).check(grid)


def test_error_norms_definition():
    grid = make_grid(1.0, 1.0, 4, 2, 1.0)
    U = np.ones((3, 2))
    s = error_norms(U, grid, InitialCondition("sine", k=0.0))
    np.testing.assert_allclose(s.linf, [1, 1])
    np.testing.assert_allclose(s.l2, [np.sqrt(0.75), np.sqrt(0.75)])
    np.testing.assert_allclose(s.t_over_T, [0.5, 1.0])
    assert ErrorSeries.HEADER == ("step", "t", "t_over_T", "linf", "l2")
    assert list(s.rows())[0][0] == 1


def test_bad_policies():
    grid = make_grid(1.0, 1.0, 8, 8, 1.0)
    co = preset_scheme("leapfrog-central", grid)
    with pytest.raises(ValueError):
        run_simulation(grid, co, SINE, boundary="neumann")
    with pytest.raises(ValueError):
        run_simulation(grid, co, SINE, bootstrap="euler")


def test_ftcs_keeps_constant_field():
    grid = make_grid(1.0, 1.0, 10, 10, 1.0)
    out = step(np.ones(11), preset_scheme("ftcs", grid), left=1.0, right=1.0)
    np.testing.assert_allclose(out, 1.0, atol=1e-14)
