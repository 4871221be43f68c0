"""Command line: ``podles <suite> [flags]``.

Precedence for every setting is flag > PODLES_<NAME> environment variable > default.
Reports are byte-stable: JSON with sorted keys and %.17g floats, or CSV with one
row per check. Wall time goes to stderr only, so it never perturbs the file.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import fields

from .suites import SUITES, RunConfig, SuiteReport, run_suite

ENV_PREFIX = "PODLES_"

# flag name -> (RunConfig field, type)
_SETTINGS = {
    "hbar": ("hbar", float),
    "truncation": ("truncation", int),
    "cutoff": ("cutoff", int),
    "window": ("window", int),
    "nmax": ("nmax", int),
    "seed": ("seed", int),
    "quad-nodes": ("quad_nodes", int),
    "rel-tol": ("rel_tol", float),
    "format": ("format", str),
}


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, floats as %.17g, non-finite floats as strings."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v) -> str:
    return "%.17g" % v if isinstance(v, float) else str(v)


def render_report(report: SuiteReport, fmt: str) -> str:
    checks = [
        {"name": c.name, "status": c.status, "residual": c.residual, "tolerance": c.tolerance, "anchor": c.anchor}
        for c in report.checks
    ]
    if fmt == "json":
        return dumps({"config": report.config.as_dict(), "checks": checks, "summary": report.summary()}) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["name", "status", "residual", "tolerance", "anchor"]
    writer.writerow(cols)
    for c in checks:
        writer.writerow([_cell(c[k]) for k in cols])
    return buf.getvalue()


def render_table(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return dumps(rows) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        cols = list(rows[0])
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_cell(r[k]) for k in cols])
    return buf.getvalue()


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc


def emit_report(report: SuiteReport, out: str | None, fmt: str):
    _write(out, render_report(report, fmt))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="podles", description="Run verification suites and emit reports.")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--hbar", type=float)
    p.add_argument("--truncation", type=int, help="matrix size N of the ground-state realization")
    p.add_argument("--cutoff", type=int, help="series cutoff M of the sphere generators")
    p.add_argument("--window", type=int, help="arrow window m, m+n <= window")
    p.add_argument("--nmax", type=int, help="largest index for norms and asymptotics")
    p.add_argument("--seed", type=int)
    p.add_argument("--quad-nodes", type=int, dest="quad_nodes")
    p.add_argument("--rel-tol", type=float, dest="rel_tol")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--table", help="also write the suite's data table to this path")
    return p


def resolve_config(args: argparse.Namespace, env: dict | None = None) -> tuple[RunConfig, str | None]:
    env = os.environ if env is None else env
    defaults = {f.name: f.default for f in fields(RunConfig)}
    values = {}
    for flag, (name, typ) in _SETTINGS.items():
        given = getattr(args, name, None)
        key = ENV_PREFIX + flag.replace("-", "_").upper()
        if given is not None:
            values[name] = given
        elif key in env:
            try:
                values[name] = typ(env[key])
            except ValueError as exc:
                raise ValueError(f"{key}={env[key]!r}: {exc}") from exc
        else:
            values[name] = defaults[name]
    out = args.out if args.out is not None else env.get(ENV_PREFIX + "OUT")
    return RunConfig(**values), out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, out = resolve_config(args)
    except ValueError as exc:
        print(f"podles: invalid configuration: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    report = run_suite(args.suite, cfg)
    report.wall_time = time.perf_counter() - start
    try:
        emit_report(report, out, cfg.format)
        if args.table:
            _write(args.table, render_table(report.table, cfg.format))
    except OSError as exc:
        print(f"podles: {exc}", file=sys.stderr)
        return 2
    s = report.summary()
    print(f"{s['suite']}: {s['n_pass']}/{s['n_checks']} checks passed in {report.wall_time:.2f}s", file=sys.stderr)
    return 0 if report.passed else 1
