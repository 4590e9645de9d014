"""Command line front-end: ``dsbound run CONFIG --out DIR``.

Writes three files into the output directory:

``ds_table.csv``
    one row per product box and method: box id, input endpoints, image
    endpoints and mass.
``curves.csv``
    CBF, CPF, CCBF and CCPF of each induced structure on the requested grids.
``summary.json``
    exceedance bounds per threshold and method.

Exit status is 0 on success, 1 for configuration errors and 2 for numerical
or domain failures. Set ``DSBOUND_LOG`` (e.g. ``DEBUG``) for more output on
stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import config as cfgmod
from .evidence import DSStructure, cumulative, complementary_cumulative, exceedance_bounds
from .propagate import METHODS, PropagationError, PropagationResult, map_ds

log = logging.getLogger("dsbound")


def fmt(x: float) -> str:
    return f"{x:.6g}"


def _num(x: float) -> float:
    return float(fmt(x))


def curve_abscissae(curve: cfgmod.Curve, ds: DSStructure) -> list[float]:
    """Closed grid from ``start`` to ``stop`` plus every focal endpoint in range.

    Grid points that print identically to a focal endpoint are dropped so
    every written abscissa is distinct.
    """
    n = int(round((curve.stop - curve.start) / curve.step))
    grid = {round(curve.start + i * curve.step, 12) for i in range(n + 1)}
    grid = {x for x in grid if x <= curve.stop} | {curve.stop}
    ends = {x for iv, _ in ds for x in (iv.lo, iv.hi) if curve.start <= x <= curve.stop}
    taken = {fmt(x) for x in ends}
    return sorted(ends | {x for x in grid if fmt(x) not in taken})


def write_table(path: Path, results: dict[str, PropagationResult]) -> None:
    first = next(iter(results.values()))
    header = ["method", "box_id"]
    for name in first.variables:
        header += [f"{name}_lo", f"{name}_hi"]
    header += ["y_lo", "y_hi", "mass"]
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for method, res in results.items():
            for b in res.boxes:
                row = [method, b.box_id]
                for iv in b.inputs:
                    row += [fmt(iv.lo), fmt(iv.hi)]
                row += [fmt(b.output.lo), fmt(b.output.hi), fmt(b.mass)]
                w.writerow(row)


def write_curves(path: Path, results: dict[str, PropagationResult], curves) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "x", "cbf", "cpf", "ccbf", "ccpf"])
        for method, res in results.items():
            xs = {}
            for c in curves:
                for x in curve_abscissae(c, res.output):
                    xs.setdefault(fmt(x), x)
            for x in sorted(xs.values()):
                cbf, cpf = cumulative(res.output, x)
                ccbf, ccpf = complementary_cumulative(res.output, x)
                w.writerow([method, fmt(x), fmt(cbf), fmt(cpf), fmt(ccbf), fmt(ccpf)])


def summarize(problem: cfgmod.ProblemConfig, results: dict[str, PropagationResult]) -> dict:
    p = problem.propagation
    out = {
        "function": str(problem.function),
        "propagation": {"order": p.order, "quad_points": p.quad_points, "subdivisions": p.subdivisions},
        "inputs": {
            name: [{"interval": [_num(iv.lo), _num(iv.hi)], "mass": _num(m)} for iv, m in ds]
            for name, ds in problem.inputs.items()
        },
        "methods": {},
    }
    for method, res in results.items():
        queries = []
        for t in problem.thresholds:
            lo, hi = exceedance_bounds(res.output, t)
            queries.append({"threshold": _num(t), "lower": _num(lo), "upper": _num(hi)})
        out["methods"][method] = {"focal_elements": len(res.output), "exceedance": queries}
    return out


def run(
    config_path,
    out_dir,
    method: str | None = None,
    order: int | None = None,
    quad: int | None = None,
    subdiv: int | None = None,
) -> int:
    try:
        problem = cfgmod.load(config_path)
        overrides = {k: v for k, v in (("order", order), ("quad_points", quad), ("subdivisions", subdiv)) if v is not None}
        if overrides:
            try:
                problem.propagation = replace(problem.propagation, **overrides)
            except ValueError as exc:
                raise cfgmod.ConfigError("propagation", str(exc)) from exc
        if method is not None:
            problem.methods = list(METHODS) if method == "all" else [method]
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    results = {}
    try:
        for m in problem.methods:
            log.info("propagating with %s", m)
            results[m] = map_ds(problem.function, problem.inputs, problem.propagation.with_method(m))
    except PropagationError as exc:
        print(f"numerical error in box {exc.box_id}: {exc.cause}", file=sys.stderr)
        return 2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_table(out / "ds_table.csv", results)
    write_curves(out / "curves.csv", results, problem.curves)
    with (out / "summary.json").open("w") as fh:
        json.dump(summarize(problem, results), fh, indent=2)
        fh.write("\n")
    log.info("wrote results to %s", out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dsbound", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="propagate the problem described in CONFIG")
    r.add_argument("config")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--method", choices=[*METHODS, "all"])
    r.add_argument("--order", type=int)
    r.add_argument("--quad", type=int)
    r.add_argument("--subdiv", type=int)
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=os.environ.get("DSBOUND_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return run(args.config, args.out, args.method, args.order, args.quad, args.subdiv)


if __name__ == "__main__":
    sys.exit(main())
