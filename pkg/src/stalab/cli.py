"""Command-line scenario runner.

    stalab run <scenario.json> [--out DIR] [--grid-n N] [--h H]
    stalab list-checks
    stalab dump <scenario.json> <field> <out.csv>

Exit status is 0 when every check passes, 1 when any fails and 2 for bad
input. The default output directory comes from ``$STALAB_OUT`` (else
``./stalab-out``); ``--out`` and the scenario's ``output.dir`` take precedence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import algebra as ga
from .checks import Context, list_checks, run_check
from .fields import constant_field, residual_report
from .scenario import Scenario, ScenarioError, dump_fields, load_scenario, shipped_scenarios

log = logging.getLogger("stalab")

OUT_ENV = "STALAB_OUT"
CSV_HEADER = ("t", "x", "y", "z") + tuple(ga.BLADE_NAMES)


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def resolve_scenario(ref: str) -> Scenario:
    path = Path(ref)
    if not path.exists():
        shipped = shipped_scenarios()
        key = ref if ref.endswith(".json") else ref + ".json"
        if key not in shipped:
            raise ScenarioError(f"no such scenario file {ref!r}; shipped: {', '.join(shipped)}")
        path = shipped[key]
    return load_scenario(path)


def output_dir(sc: Scenario) -> Path:
    return Path(sc.output.dir or os.environ.get(OUT_ENV) or "stalab-out")


def run_scenario(sc: Scenario) -> dict:
    """Execute every check; the report is deterministic outside ``timing``."""
    ctx = Context(sc)
    t0 = time.perf_counter()
    results = [run_check(c.name, ctx, c.tolerances) for c in sc.checks]
    for r in results:
        log.info(r.summary())
    g = sc.grid
    return {
        "scenario": sc.name,
        "pass": all(r.passed for r in results),
        "checks": [r.to_dict() for r in results],
        "environment": {"seed": sc.seed, "h": g.h, "grid_extents": [g.n] * 4, "grid_center": list(g.center),
                        "events": g.events, "rng": "numpy PCG64"},
        "timing": {"total_seconds": time.perf_counter() - t0,
                   "checks": {r.name: r.timing() for r in results}},
    }


def maxwell_report(sc: Scenario) -> dict:
    """Vacuum Maxwell residual of the boosted Coulomb field on the scenario grid."""
    F = dump_fields(sc)["boosted-coulomb"]
    zero = constant_field(np.zeros(ga.N_BLADES))
    return residual_report(sc.name, F, zero, sc.grid.center, sc.grid.h, sc.grid.n)


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def field_csv(sc: Scenario, name: str) -> str:
    table = dump_fields(sc)
    if name not in table:
        raise ScenarioError(f"unknown field {name!r}; available: {', '.join(table)}")
    grid = sc.grid.grid()
    pts = grid.points().reshape(-1, 4)
    vals = table[name].evaluate(pts)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p, v in zip(pts, vals):
        w.writerow([repr(float(a)) for a in p] + [repr(float(a)) for a in v])
    return buf.getvalue()


def _cmd_run(args) -> int:
    sc = resolve_scenario(args.scenario).with_overrides(args.grid_n, args.h, args.out)
    report = run_scenario(sc)
    out = output_dir(sc)
    write_atomic(out / f"{sc.name}.report.json", report_json(report))
    for name in sc.output.dumps:
        write_atomic(out / f"{sc.name}.{name}.csv", field_csv(sc, name))
    write_atomic(out / f"{sc.name}.residual.json", report_json(maxwell_report(sc)))
    for c in report["checks"]:
        print(f"[{'PASS' if c['pass'] else 'FAIL'}] {c['name']}")
    print(f"report: {out / (sc.name + '.report.json')}")
    return 0 if report["pass"] else 1


def _cmd_list(args) -> int:
    for name, doc in list_checks():
        print(f"{name:24s} {doc}")
    return 0


def _cmd_dump(args) -> int:
    sc = resolve_scenario(args.scenario).with_overrides(args.grid_n, args.h)
    write_atomic(Path(args.out_csv), field_csv(sc, args.field))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stalab", description="Spacetime-algebra gauge checks")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario and write its report")
    r.add_argument("scenario")
    r.add_argument("--out")
    r.add_argument("--grid-n", type=int)
    r.add_argument("--h", type=float)
    r.set_defaults(func=_cmd_run)

    sub.add_parser("list-checks", help="list registered checks").set_defaults(func=_cmd_list)

    d = sub.add_parser("dump", help="write a field sampled on the scenario grid as CSV")
    d.add_argument("scenario")
    d.add_argument("field")
    d.add_argument("out_csv")
    d.add_argument("--grid-n", type=int)
    d.add_argument("--h", type=float)
    d.set_defaults(func=_cmd_dump)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ScenarioError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
