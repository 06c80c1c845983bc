"""Command-line front end.

    drpsylv coeffs   [--h H]        coefficient tables (JSON)
    drpsylv spectral [--h H]        modified-wavenumber curves (CSV)
    drpsylv analyze                 matrix form, SVD reduction, bound (JSON)
    drpsylv simulate [--scheme S]   error-norm series per scheme (CSV)
    drpsylv sweep                   objective surface from the g-search (CSV)

All subcommands take ``--config``, ``--out``, ``--scheme``, ``--seed`` and
``--format``. On failure a JSON error object is printed to stderr and the
exit status is nonzero.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__, pipeline
from .analysis import G_PARAMS
from .config import RunConfig, emit_config, from_dict, parse_config
from .errors import ConfigError, DRPError
from .io import dumps, write_csv, write_json, write_matrix_csv
from .simulate import ErrorSeries


def _load_config(args) -> RunConfig:
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        cfg = parse_config(text)
    else:
        cfg = from_dict({})
    changes = {}
    if args.out is not None:
        changes["out"] = args.out
    if args.scheme is not None:
        changes["schemes"] = [args.scheme]
        if args.scheme != "leapfrog-drp7":
            changes["scheme"] = args.scheme
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.format is not None:
        changes["format"] = args.format
    if changes:
        d = json.loads(emit_config(cfg))
        d.update(changes)
        cfg = from_dict(d)
    return cfg


def _series_file(out: Path, name: str, series: ErrorSeries, fmt: str) -> Path:
    if fmt == "json":
        return write_json(out / f"series_{name}.json", {h: getattr(series, h) for h in ErrorSeries.HEADER})
    return write_csv(out / f"series_{name}.csv", ErrorSeries.HEADER, series.rows())


def cmd_coeffs(cfg: RunConfig, args, out: Path) -> dict:
    report = pipeline.coeffs_report(args.h, cfg.quad(), cfg.grid())
    write_json(out / "coeffs.json", report)
    sys.stdout.write(dumps(report))
    return {"files": ["coeffs.json"]}


def cmd_spectral(cfg: RunConfig, args, out: Path) -> dict:
    tables = pipeline.spectral_tables(args.h, cfg.spectral_points, cfg.quad())
    files = []
    for name, curve in tables["wavenumber"].items():
        if cfg.format == "json":
            write_json(out / f"wavenumber_{name}.json", {"kappa": curve[:, 0], "re": curve[:, 1], "im": curve[:, 2]})
            files.append(f"wavenumber_{name}.json")
        else:
            write_csv(out / f"wavenumber_{name}.csv", ("kappa", "re", "im"), curve.tolist())
            files.append(f"wavenumber_{name}.csv")
    names = list(tables["integrand"])
    rows = np.column_stack([tables["kappa"]] + [tables["integrand"][n] for n in names])
    write_csv(out / "integrand.csv", ["kappa"] + names, rows.tolist())
    files.append("integrand.csv")
    return {"files": files}


def cmd_analyze(cfg: RunConfig, args, out: Path) -> dict:
    report, matrices = pipeline.analysis_report(cfg)
    write_json(out / "analysis.json", report)
    write_json(out / "system.json", report["system_summary"])
    files = ["analysis.json", "system.json"]
    if cfg.format == "csv":
        for name, M in matrices.items():
            write_matrix_csv(out / f"{name}.csv", M)
            files.append(f"{name}.csv")
    return {"files": files, "flags": report["flags"]}


def cmd_simulate(cfg: RunConfig, args, out: Path) -> dict:
    runs = pipeline.simulate_runs(cfg)
    summary = []
    for run in runs:
        _series_file(out, run["scheme"], run["series"], cfg.format)
        summary.append({k: v for k, v in run.items() if k != "series"})
    write_json(out / "simulate.json", {"runs": summary})
    for s in summary:
        if s["status"] != "ok":
            print(f"{s['scheme']}: unstable, blow-up detected at step {s['blowup_step']}", file=sys.stderr)
    return {"runs": [{"scheme": s["scheme"], "status": s["status"]} for s in summary]}


def cmd_sweep(cfg: RunConfig, args, out: Path) -> dict:
    res = pipeline.sweep_run(cfg)
    header = list(G_PARAMS) + ["g1", "g2", "g3"]
    if cfg.format == "json":
        write_json(out / "surface.json", res.samples)
    else:
        write_csv(out / "surface.csv", header, ([s[h] for h in header] for s in res.samples))
    best = {"params": res.params, "g1": res.g1, "g2": res.g2, "g3": res.g3, "objective": res.objective}
    write_json(out / "sweep.json", best)
    return {"best": best}


COMMANDS = {
    "coeffs": cmd_coeffs,
    "spectral": cmd_spectral,
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (default from config, 'out')")
    common.add_argument("--scheme", help="scheme name; for simulate, a single scheme to run")
    common.add_argument("--seed", type=int, help="seed for randomised checks")
    common.add_argument("--format", choices=("csv", "json"), help="data file format")
    parser = argparse.ArgumentParser(prog="drpsylv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("coeffs", "spectral"):
            p.add_argument("--h", type=float, default=1.0, help="mesh size for the published formulas")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        result = COMMANDS[args.command](cfg, args, out)
    except (DRPError, OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("field", "line", "step"):
            if getattr(exc, attr, None) is not None:
                err[attr] = getattr(exc, attr)
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2
    # timestamps live only in this sidecar so data files stay reproducible
    write_json(
        out / "run_meta.json",
        {
            "command": args.command,
            "argv": list(sys.argv[1:] if argv is None else argv),
            "version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "config": asdict(cfg),
            "result": result,
        },
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
