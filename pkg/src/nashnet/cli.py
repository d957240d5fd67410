"""Command-line interface.

Subcommands: ``run`` (execute a scenario, write trace + metrics), ``oracle``
(grid saddle search, optionally weighted), ``graph-check`` (assumption
verdicts), ``reproduce`` (bundled experiments, self-verifying by default)
and ``sweep`` (one scenario under a list of parameter overrides, optionally
in parallel worker processes).

Failure classes map to fixed exit codes: 2 parse, 3 validation, 4 numeric,
5 resource, 1 anything else.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .digraph import (check_jointly_bipartite, check_ujsc, is_weight_balanced,
                      limiting_stochastic_vector, validate_weight_rule)
from .engine import Scenario, run
from .errors import NashnetError, ParseError, ResourceError, ValidationError
from .metrics import compute_metrics
from .saddle import (SaddleReport, WeightedObjective, grid_minimax,
                     unit_weighted, verify_saddle)
from .scenario_io import (BUNDLED, FLOAT_FMT, bundled_scenario, load_scenario,
                          metrics_to_csv, plotdata_to_csv, trace_to_csv)
from .stepsizes import GammaSchedule


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NashnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def _build_parser():
    p = argparse.ArgumentParser(
        prog="nashnet",
        description="Distributed Nash equilibrium computation over switching networks.")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="execute a scenario and write trace/metrics files")
    pr.add_argument("scenario", help="scenario file path")
    pr.add_argument("--iters", type=int, default=None, help="override iteration count")
    pr.add_argument("--out", default=None, help="trace CSV output path")
    pr.add_argument("--metrics", default=None, help="metrics CSV output path")
    pr.set_defaults(func=cmd_run)

    po = sub.add_parser("oracle", help="grid saddle search for a scenario's sum objective")
    po.add_argument("scenario")
    po.add_argument("--weights", default=None,
                    help="comma-separated positive weights for the subnet-1 objectives")
    po.add_argument("--grid", type=int, default=2001, help="grid resolution per dimension")
    po.add_argument("--out", default=None, help="report CSV output path")
    po.set_defaults(func=cmd_oracle)

    pg = sub.add_parser("graph-check", help="verdicts for the connectivity and weight assumptions")
    pg.add_argument("scenario")
    pg.set_defaults(func=cmd_graph_check)

    pp = sub.add_parser("reproduce", help="run a bundled experiment end to end")
    pp.add_argument("example", help="bundled id: 1, 2, 3 or a bundled scenario name")
    pp.add_argument("--out", default=".", help="output directory")
    pp.add_argument("--trust-bundled", action="store_true",
                    help="use the stored saddle reference instead of re-deriving it")
    pp.set_defaults(func=cmd_reproduce)

    ps = sub.add_parser("sweep", help="run one scenario under several stepsize parameters")
    ps.add_argument("scenario")
    ps.add_argument("--param", default="gamma.c",
                    choices=("gamma.c", "gamma.b", "gamma.eps", "iterations"),
                    help="which knob to sweep")
    ps.add_argument("--values", required=True, help="comma-separated values")
    ps.add_argument("--out", default=".", help="output directory")
    ps.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    ps.set_defaults(func=cmd_sweep)
    return p


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------

def _reference_saddle(scenario: Scenario, resolution: int = 2001):
    """Stored oracle reference if present, else a fresh grid search."""
    if scenario.oracle_x is not None:
        return SaddleReport(x_star=scenario.oracle_x, y_star=scenario.oracle_y,
                            value=float("nan"), minimax_gap=float("nan"),
                            grid_resolution=0)
    return grid_minimax(unit_weighted(scenario.objectives1),
                        scenario.box_x, scenario.box_y, resolution=resolution)


def _print_warnings(scenario):
    for w in getattr(scenario, "warnings", ()):
        print(f"warning: {w}", file=sys.stderr)


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    _print_warnings(scenario)
    trace = run(scenario, iterations=args.iters)
    saddle = _reference_saddle(scenario)
    metrics = compute_metrics(trace, scenario, saddle)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(trace_to_csv(trace, scenario.m1, scenario.m2))
    if args.metrics:
        with open(args.metrics, "w", encoding="utf-8") as fh:
            fh.write(metrics_to_csv(metrics))
    print(f"{scenario.name}: {trace.iterations} iterations, "
          f"nash_error={metrics.nash_error[-1]:.6g}, "
          f"h1={metrics.h1[-1]:.6g}, h2={metrics.h2[-1]:.6g}")
    return 0


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def _report_csv(report: SaddleReport) -> str:
    lines = ["key,value"]
    for d, v in enumerate(report.x_star):
        lines.append(f"x_star[{d}]," + (FLOAT_FMT % v))
    for d, v in enumerate(report.y_star):
        lines.append(f"y_star[{d}]," + (FLOAT_FMT % v))
    lines.append("value," + (FLOAT_FMT % report.value))
    lines.append("minimax_gap," + (FLOAT_FMT % report.minimax_gap))
    lines.append(f"grid_resolution,{report.grid_resolution}")
    return "\n".join(lines) + "\n"


def cmd_oracle(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.weights is None:
        w = unit_weighted(scenario.objectives1)
    else:
        vals = [float(v) for v in args.weights.split(",")]
        if len(vals) != len(scenario.objectives1):
            raise ValidationError(
                f"got {len(vals)} weights for {len(scenario.objectives1)} objectives")
        w = WeightedObjective(tuple((v, e, s) for v, (e, s) in
                                    zip(vals, scenario.objectives1)))
    report = grid_minimax(w, scenario.box_x, scenario.box_y, resolution=args.grid)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(_report_csv(report))
    xs = ", ".join(f"{v:.6g}" for v in report.x_star)
    ys = ", ".join(f"{v:.6g}" for v in report.y_star)
    print(f"saddle: x*=({xs}), y*=({ys}), value={report.value:.6g}, "
          f"gap={report.minimax_gap:.3g}, grid={report.grid_resolution}")
    return 0


# ---------------------------------------------------------------------------
# graph-check
# ---------------------------------------------------------------------------

def cmd_graph_check(args) -> int:
    scenario = load_scenario(args.scenario, check_assumptions=False)
    g = scenario.graph
    failed = []

    problems = validate_weight_rule(g, g.eta)
    print(f"weight rule (eta={g.eta}): {'pass' if not problems else 'FAIL'}")
    for v in problems:
        print(f"  {v}")
    if problems:
        failed.append("weight rule")

    for subnet, T in ((1, g.t1), (2, g.t2)):
        ok = check_ujsc(g, subnet, T)
        print(f"subnet {subnet} jointly strongly connected within T={T}: "
              f"{'pass' if ok else 'FAIL'}")
        if not ok:
            failed.append(f"subnet {subnet} connectivity")
    ok = check_jointly_bipartite(g, g.t_cross)
    print(f"cross layer covers every node within T={g.t_cross}: "
          f"{'pass' if ok else 'FAIL'}")
    if not ok:
        failed.append("cross coverage")

    for subnet, mats in ((1, g.a1), (2, g.a2)):
        flags = [is_weight_balanced(A) for A in mats]
        print(f"subnet {subnet} weight-balanced per phase: "
              + ", ".join(str(f).lower() for f in flags))
    if not failed:
        for subnet in (1, 2):
            for s in range(g.period):
                phi = limiting_stochastic_vector(g, subnet, s).phi
                print(f"subnet {subnet} limit vector (start phase {s}): ("
                      + ", ".join(f"{v:.6g}" for v in phi) + ")")
    if failed:
        raise ValidationError("assumptions failed: " + ", ".join(failed))
    return 0


# ---------------------------------------------------------------------------
# reproduce
# ---------------------------------------------------------------------------

def cmd_reproduce(args) -> int:
    name = f"example{args.example}" if args.example in ("1", "2", "3") else args.example
    if name not in BUNDLED:
        raise ValidationError(f"unknown bundled experiment {args.example!r}")
    scenario = bundled_scenario(name)
    _print_warnings(scenario)

    if args.trust_bundled:
        if scenario.oracle_x is None:
            raise ValidationError(f"{name} carries no stored saddle reference")
        saddle = SaddleReport(x_star=scenario.oracle_x, y_star=scenario.oracle_y,
                              value=float("nan"), minimax_gap=float("nan"),
                              grid_resolution=0)
    else:
        saddle = grid_minimax(unit_weighted(scenario.objectives1),
                              scenario.box_x, scenario.box_y)
        if scenario.oracle_x is not None:
            drift = max(max(abs(a - b) for a, b in zip(saddle.x_star, scenario.oracle_x)),
                        max(abs(a - b) for a, b in zip(saddle.y_star, scenario.oracle_y)))
            if drift > 1e-4:
                raise ValidationError(
                    f"re-derived saddle differs from the stored reference by {drift:.3e}")

    trace = run(scenario)
    metrics = compute_metrics(trace, scenario, saddle)
    os.makedirs(args.out, exist_ok=True)
    paths = {ext: os.path.join(args.out, f"{name}_{ext}.csv")
             for ext in ("trace", "metrics", "plotdata")}
    with open(paths["trace"], "w", encoding="utf-8") as fh:
        fh.write(trace_to_csv(trace, scenario.m1, scenario.m2))
    with open(paths["metrics"], "w", encoding="utf-8") as fh:
        fh.write(metrics_to_csv(metrics))
    with open(paths["plotdata"], "w", encoding="utf-8") as fh:
        fh.write(plotdata_to_csv(trace, metrics))
    print(f"{name}: {trace.iterations} iterations, "
          f"nash_error={metrics.nash_error[-1]:.6g}, "
          f"h1={metrics.h1[-1]:.6g}, h2={metrics.h2[-1]:.6g}; "
          f"wrote {', '.join(paths.values())}")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _apply_override(scenario: Scenario, param: str, value: float) -> Scenario:
    if param == "iterations":
        return replace(scenario, iterations=int(value))
    sched = scenario.rule.schedule
    if sched.table is not None:
        raise ValidationError("cannot sweep a tabulated schedule")
    kw = {"c": sched.c, "b": sched.b, "eps": sched.eps}
    kw[param.split(".", 1)[1]] = value
    return replace(scenario, rule=replace(scenario.rule, schedule=GammaSchedule(**kw)))


def _sweep_worker(job):
    path, param, value, out_dir, tag = job
    scenario = _apply_override(load_scenario(path), param, value)
    trace = run(scenario)
    metrics = compute_metrics(trace, scenario, _reference_saddle(scenario))
    out = os.path.join(out_dir, f"{scenario.name}_{tag}_metrics.csv")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(metrics_to_csv(metrics))
    return value, float(metrics.nash_error[-1]), out


def cmd_sweep(args) -> int:
    values = [float(v) for v in args.values.split(",")]
    load_scenario(args.scenario)  # fail fast before spawning workers
    os.makedirs(args.out, exist_ok=True)
    jobs = [(args.scenario, args.param, v, args.out, f"{args.param.replace('.', '_')}_{i}")
            for i, v in enumerate(values)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_worker, jobs))
    else:
        results = [_sweep_worker(j) for j in jobs]
    summary = os.path.join(args.out, "sweep_summary.csv")
    with open(summary, "w", encoding="utf-8") as fh:
        fh.write(f"{args.param},final_nash_error,metrics_file\n")
        for value, err, out in results:  # job order, independent of scheduling
            fh.write((FLOAT_FMT % value) + "," + (FLOAT_FMT % err) + f",{out}\n")
    for value, err, _ in results:
        print(f"{args.param}={value:g}: final nash_error={err:.6g}")
    print(f"wrote {summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
