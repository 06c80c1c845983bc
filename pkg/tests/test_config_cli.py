import json

import numpy as np
import pytest

from drpsylvester import cli, pipeline
from drpsylvester.config import SIM_SCHEMES, emit_config, from_dict, parse_config
from drpsylvester.errors import ConfigError
from drpsylvester.io import dumps, read_csv, write_csv, write_matrix_csv

SMALL = {"L": 1.0, "T": 0.5, "n_x": 16, "n_t": 8, "scheme": "leapfrog-central", "bound_trials": 3}


def run(tmp_path, *argv, config=SMALL):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(config))
    return cli.main([*argv, "--config", str(cfg)])


def test_defaults_filled():
    cfg = from_dict({})
    assert cfg.T == pytest.approx(0.5)
    assert cfg.n_t == 200  # c T / (cfl h) with h = 1/200
    assert cfg.grid().sigma == pytest.approx(0.5)
    assert cfg.ic == {"kind": "sine", "k": pytest.approx(2 * np.pi)}
    assert cfg.quadrature["nodes"] == 64


@pytest.mark.parametrize(
    "d",
    [
        {},
        SMALL,
        {"scheme": "ftcs", "schemes": list(SIM_SCHEMES), "boundary": "periodic", "seed": 7},
        {"ic": {"kind": "gaussian", "x0": 0.5, "s": 0.1}, "overrides": {"beta_t": 0.25}},
    ],
)
def test_round_trip(d):
    cfg = from_dict(d)
    assert parse_config(emit_config(cfg)) == cfg
    assert emit_config(parse_config(emit_config(cfg))) == emit_config(cfg)


@pytest.mark.parametrize(
    "d,field",
    [
        ({"nx": 4}, "nx"),
        ({"ic": {"kind": "sine", "omega": 1}}, "omega"),
        ({"n_x": 2}, "n_x"),
        ({"n_x": "16"}, "n_x"),
        ({"scheme": "upwind"}, "scheme"),
        ({"schemes": ["nope"]}, "schemes"),
        ({"boundary": "neumann"}, "boundary"),
        ({"format": "xml"}, "format"),
        ({"overrides": {"alpha_x": "big"}}, "alpha_x"),
        ({"ic": {"kind": "sine", "k": 1000.0}}, "ic"),
    ],
)
def test_config_errors_name_field(d, field):
    with pytest.raises(ConfigError) as exc:
        from_dict(d)
    assert exc.value.field == field


def test_grid_precondition_message():
    with pytest.raises(ConfigError) as exc:
        from_dict({"c": 0.0})
    assert "make_grid precondition" in str(exc.value)


def test_parse_error_line():
    with pytest.raises(ConfigError) as exc:
        parse_config('{\n  "L": 1,\n  "n_x": ,\n}')
    assert exc.value.line == 3


def test_overrides_provenance():
    cfg = from_dict({**SMALL, "overrides": {"beta_t": 0.5}})
    co, prov = cfg.coefficients()
    assert prov == "override" and co.beta_t == 0.5


def test_csv_round_trip(tmp_path):
    vals = [0.1, 1 / 3, 1e-300, -2.5e17]
    write_csv(tmp_path / "a.csv", ["v"], [[v] for v in vals])
    header, rows = read_csv(tmp_path / "a.csv")
    assert header == ["v"] and [float(r[0]) for r in rows] == vals
    assert b"\r" not in (tmp_path / "a.csv").read_bytes()
    write_matrix_csv(tmp_path / "m.csv", np.eye(2))
    assert read_csv(tmp_path / "m.csv")[0] == ["c1", "c2"]


def test_json_non_finite():
    out = json.loads(dumps({"a": np.nan, "b": np.float64(2.0), "c": np.arange(2)}))
    assert out == {"a": "nan", "b": 2.0, "c": [0, 1]}


def test_coeffs_command(tmp_path, capsys):
    assert run(tmp_path, "coeffs", "--out", str(tmp_path / "o")) == 0
    printed = json.loads(capsys.readouterr().out)
    saved = json.loads((tmp_path / "o" / "coeffs.json").read_text())
    assert printed == saved
    assert saved["paper"]["source"] == "paper"
    assert saved["paper"]["beta_x"] == pytest.approx(np.pi / (np.pi**2 - 8))
    ls = saved["least_squares"]["three_point"]
    assert ls["source"] == "least-squares" and ls["a"]["a_1"] == pytest.approx(2 / np.pi)
    assert any(f.startswith("consistency_defect") for f in saved["flags"])


def test_spectral_command(tmp_path):
    assert run(tmp_path, "spectral", "--out", str(tmp_path / "o")) == 0
    header, rows = read_csv(tmp_path / "o" / "wavenumber_central.csv")
    assert header == ["kappa", "re", "im"] and len(rows) == 257
    k = np.array([float(r[0]) for r in rows])
    re = np.array([float(r[1]) for r in rows])
    np.testing.assert_allclose(re, np.sin(k), atol=1e-15)


def test_analyze_flags_verbatim(tmp_path):
    assert run(tmp_path, "analyze", "--out", str(tmp_path / "o"), config={**SMALL, "scheme": "leapfrog-paper-drp"}) == 0
    rep = json.loads((tmp_path / "o" / "analysis.json").read_text())
    cfg = from_dict({**SMALL, "scheme": "leapfrog-paper-drp"})
    direct, _ = pipeline.analysis_report(cfg)
    assert rep["flags"] == direct["flags"]
    assert any(f.startswith("consistency_defect") for f in rep["flags"])
    assert rep["random_bound_trials"]["all_hold"]
    header, rows = read_csv(tmp_path / "o" / "M1.csv")
    assert len(header) == 15 and len(rows) == 15


def test_simulate_reports_instability(tmp_path, capsys):
    conf = {**SMALL, "T": 20.0, "n_t": 640, "schemes": ["ftcs", "leapfrog-central"]}
    assert run(tmp_path, "simulate", "--out", str(tmp_path / "o"), config=conf) == 0
    summary = json.loads((tmp_path / "o" / "simulate.json").read_text())
    by = {r["scheme"]: r for r in summary["runs"]}
    assert by["ftcs"]["status"] == "unstable" and by["ftcs"]["blowup_step"] > 0
    assert by["ftcs"]["amplification"]["max_over_modes"] > 1
    assert by["leapfrog-central"]["status"] == "ok"
    assert "ftcs: unstable" in capsys.readouterr().err


def test_sweep_command(tmp_path):
    assert run(tmp_path, "sweep", "--out", str(tmp_path / "o"), config={**SMALL, "sweep": {"points": 3}}) == 0
    best = json.loads((tmp_path / "o" / "sweep.json").read_text())
    assert best["g1"] < 1e-9
    header, rows = read_csv(tmp_path / "o" / "surface.csv")
    assert header[-3:] == ["g1", "g2", "g3"] and len(rows) == 27


@pytest.mark.parametrize("command", ["coeffs", "spectral", "analyze", "simulate", "sweep"])
def test_byte_identical_outputs(tmp_path, command):
    conf = {**SMALL, "sweep": {"points": 3}}
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(tmp_path, command, "--out", str(a), config=conf) == 0
    assert run(tmp_path, command, "--out", str(b), config=conf) == 0
    files = sorted(p.name for p in a.iterdir() if p.name != "run_meta.json")
    assert files
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    assert "timestamp" in json.loads((a / "run_meta.json").read_text())


def test_json_format(tmp_path):
    assert run(tmp_path, "simulate", "--out", str(tmp_path / "o"), "--format", "json") == 0
    data = json.loads((tmp_path / "o" / "series_leapfrog-central.json").read_text())
    assert set(data) == {"step", "t", "t_over_T", "linf", "l2"}


def test_scheme_flag_selects_single_run(tmp_path):
    assert run(tmp_path, "simulate", "--out", str(tmp_path / "o"), "--scheme", "leapfrog-drp7") == 0
    assert (tmp_path / "o" / "series_leapfrog-drp7.csv").exists()


def test_error_exit(tmp_path, capsys):
    assert run(tmp_path, "analyze", "--out", str(tmp_path / "o"), config={"n_x": 2}) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError" and err["field"] == "n_x"


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["coeffs", "--config", str(tmp_path / "none.json")]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"


def test_unknown_scheme_flag(tmp_path, capsys):
    assert cli.main(["analyze", "--scheme", "nope", "--out", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["field"] == "scheme"


def test_minimal_document():
    cfg = parse_config('{"n_x": 10, "n_t": 10, "L": 1, "T": 1, "c": 1, "scheme": "ftcs"}')
    assert cfg.ic["kind"] == "sine"
    assert cfg.grid().sigma == pytest.approx(1.0)
