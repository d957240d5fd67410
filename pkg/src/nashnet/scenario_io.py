"""Scenario files, bundled examples, and trace/metrics serialization.

Scenario documents are YAML: nested key-value sections with matrix literals
as lists of lists and objectives in prefix notation (see ``exprs.parse_expr``).
Loading validates structure and the weight rule; connectivity-window checks
and convexity sampling attach warnings without failing the load. Traces and
metrics emit as CSV with a fixed header and 17-significant-digit floats so
reimports are bit-faithful.
"""

from __future__ import annotations

import io
from dataclasses import asdict
from importlib import resources

import numpy as np
import yaml

from .digraph import GraphSequenceSpec, check_jointly_bipartite, check_ujsc, validate_weight_rule
from .engine import Scenario, Trace
from .errors import ParseError, ValidationError
from .exprs import BoxSet, format_expr, parse_expr, sample_convexity
from .metrics import MetricsSeries
from .stepsizes import (AdaptiveCommonEigvec, AdaptivePeriodic, GammaSchedule,
                        Homogeneous, OracleHeterogeneous)

BUNDLED = ("example1", "example2", "example3", "perron_weighted", "shared_saddle")

FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def load_scenario(path, check_assumptions: bool = True) -> Scenario:
    """Parse and validate a scenario file.

    Weight-rule violations fail the load; window and convexity findings are
    collected on the returned scenario's ``warnings`` attribute.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return loads_scenario(text, check_assumptions=check_assumptions)


def loads_scenario(text: str, check_assumptions: bool = True) -> Scenario:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ParseError(f"scenario parse error{where}: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a mapping")
    try:
        scenario = _scenario_from_doc(doc)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"scenario document malformed: {exc!r}") from None

    warnings = []
    problems = validate_weight_rule(scenario.graph, scenario.graph.eta)
    if problems:
        raise ValidationError(
            "weight rule violated: " + "; ".join(str(v) for v in problems[:10]))
    if check_assumptions:
        g = scenario.graph
        if not check_ujsc(g, 1, g.t1):
            warnings.append(f"subnet 1 not jointly strongly connected within window {g.t1}")
        if not check_ujsc(g, 2, g.t2):
            warnings.append(f"subnet 2 not jointly strongly connected within window {g.t2}")
        if not check_jointly_bipartite(g, g.t_cross):
            warnings.append(f"cross layer leaves isolated nodes within window {g.t_cross}")
        for label, (e, s) in zip(
                [f"subnet1[{i}]" for i in range(g.n1)] + [f"subnet2[{i}]" for i in range(g.n2)],
                tuple(scenario.objectives1) + tuple(scenario.objectives2)):
            for w in sample_convexity(e, scenario.box_x, scenario.box_y, trials=200):
                warnings.append(f"{label}: {w}")
    object.__setattr__(scenario, "warnings", tuple(warnings))
    return scenario


def _scenario_from_doc(doc: dict) -> Scenario:
    meta = doc.get("meta", {})
    dims = doc["dimensions"]
    m1, m2 = int(dims["m1"]), int(dims["m2"])
    box_x = BoxSet(tuple(doc["boxes"]["x"]["lower"]), tuple(doc["boxes"]["x"]["upper"]))
    box_y = BoxSet(tuple(doc["boxes"]["y"]["lower"]), tuple(doc["boxes"]["y"]["upper"]))

    def agents(section):
        out = []
        for entry in section:
            e = parse_expr(entry["expr"])
            sel = {int(k): float(v) for k, v in (entry.get("selections") or {}).items()}
            out.append((e, sel))
        return tuple(out)

    obj1 = agents(doc["agents"]["subnet1"])
    obj2 = agents(doc["agents"]["subnet2"])

    gdoc = doc["graph"]
    phases = gdoc["phases"]
    n1, n2 = len(obj1), len(obj2)
    a1, a2, c1, c2 = [], [], [], []
    for ph in phases:
        a1.append(np.asarray(ph["a1"], dtype=float))
        a2.append(np.asarray(ph["a2"], dtype=float))
        c1.append(_cross_matrix(ph.get("cross_to_1", []), n1, n2))
        c2.append(_cross_matrix(ph.get("cross_to_2", []), n2, n1))
    windows = gdoc.get("windows", {})
    graph = GraphSequenceSpec(
        n1=n1, n2=n2, period=int(gdoc["period"]),
        a1=tuple(a1), a2=tuple(a2), cross1=tuple(c1), cross2=tuple(c2),
        eta=float(gdoc["eta"]),
        t1=int(windows.get("t1", 1)), t2=int(windows.get("t2", 1)),
        t_cross=int(windows.get("t_cross", 1)))

    rule = _rule_from_doc(doc["stepsize"], graph)
    run_doc = doc.get("run", {})
    oracle = run_doc.get("oracle") or {}
    return Scenario(
        name=str(meta.get("name", "unnamed")), m1=m1, m2=m2,
        objectives1=obj1, objectives2=obj2, graph=graph,
        box_x=box_x, box_y=box_y, rule=rule,
        x0=np.asarray(doc["initial"]["x"], dtype=float),
        y0=np.asarray(doc["initial"]["y"], dtype=float),
        iterations=int(run_doc.get("iterations", 1000)),
        metrics=tuple(run_doc.get("metrics",
                                  ("h1", "h2", "nash_error", "saddle_residual"))),
        oracle_x=tuple(oracle["x_star"]) if "x_star" in oracle else None,
        oracle_y=tuple(oracle["y_star"]) if "y_star" in oracle else None,
        oracle_provenance=str(oracle.get("provenance", "")))


def _cross_matrix(edges, n_to, n_from) -> np.ndarray:
    """Edge list [source, target, weight] -> (n_to, n_from) weight matrix."""
    C = np.zeros((n_to, n_from))
    for src, dst, w in edges:
        C[int(dst), int(src)] = float(w)
    return C


def _rule_from_doc(sdoc: dict, graph: GraphSequenceSpec):
    gdoc = sdoc.get("gamma", {})
    if "table" in gdoc:
        schedule = GammaSchedule(table=tuple(gdoc["table"]))
    else:
        schedule = GammaSchedule(c=float(gdoc.get("c", 1.0)),
                                 b=float(gdoc.get("b", 1.0)),
                                 eps=float(gdoc.get("eps", 0.5)))
    variant = sdoc["variant"]
    if variant == "homogeneous":
        return Homogeneous(schedule)
    if variant == "oracle_heterogeneous":
        if "phi1" in sdoc:
            return OracleHeterogeneous(schedule=schedule, period=graph.period,
                                       phi1=tuple(tuple(v) for v in sdoc["phi1"]),
                                       phi2=tuple(tuple(v) for v in sdoc["phi2"]))
        from .stepsizes import oracle_heterogeneous_build
        return oracle_heterogeneous_build(graph, schedule)
    if variant == "adaptive_common":
        return AdaptiveCommonEigvec(schedule)
    if variant == "adaptive_periodic":
        return AdaptivePeriodic(schedule,
                                p1=int(sdoc.get("p1", graph.period)),
                                p2=int(sdoc.get("p2", graph.period)))
    raise ValidationError(f"unknown stepsize variant {variant!r}")


# ---------------------------------------------------------------------------
# saving
# ---------------------------------------------------------------------------

def scenario_to_doc(s: Scenario) -> dict:
    g = s.graph
    phases = []
    for ph in range(g.period):
        phases.append({
            "a1": [[float(v) for v in row] for row in g.a1[ph]],
            "a2": [[float(v) for v in row] for row in g.a2[ph]],
            "cross_to_1": _edges(g.cross1[ph]),
            "cross_to_2": _edges(g.cross2[ph]),
        })
    sdoc = {"variant": _variant_name(s.rule), "gamma": _gamma_doc(s.rule.schedule)}
    if isinstance(s.rule, OracleHeterogeneous):
        sdoc["phi1"] = [[float(v) for v in vec] for vec in s.rule.phi1]
        sdoc["phi2"] = [[float(v) for v in vec] for vec in s.rule.phi2]
    if isinstance(s.rule, AdaptivePeriodic):
        sdoc["p1"], sdoc["p2"] = s.rule.p1, s.rule.p2
    doc = {
        "meta": {"name": s.name,
                 "determinism": "runs are seed-free and bit-identical"},
        "dimensions": {"m1": s.m1, "m2": s.m2},
        "boxes": {"x": {"lower": list(s.box_x.lower), "upper": list(s.box_x.upper)},
                  "y": {"lower": list(s.box_y.lower), "upper": list(s.box_y.upper)}},
        "agents": {
            "subnet1": [{"expr": format_expr(e), "selections": {int(k): float(v) for k, v in sel.items() if v != 0.0}}
                        for e, sel in s.objectives1],
            "subnet2": [{"expr": format_expr(e), "selections": {int(k): float(v) for k, v in sel.items() if v != 0.0}}
                        for e, sel in s.objectives2],
        },
        "graph": {"eta": g.eta, "period": g.period,
                  "windows": {"t1": g.t1, "t2": g.t2, "t_cross": g.t_cross},
                  "phases": phases},
        "stepsize": sdoc,
        "initial": {"x": [[float(v) for v in row] for row in s.x0],
                    "y": [[float(v) for v in row] for row in s.y0]},
        "run": {"iterations": s.iterations, "metrics": list(s.metrics)},
    }
    if s.oracle_x is not None:
        doc["run"]["oracle"] = {"x_star": [float(v) for v in s.oracle_x],
                                "y_star": [float(v) for v in s.oracle_y],
                                "provenance": s.oracle_provenance}
    return doc


def _edges(C):
    out = []
    for dst in range(C.shape[0]):
        for src in range(C.shape[1]):
            if C[dst, src] > 0:
                out.append([int(src), int(dst), float(C[dst, src])])
    return out


def _variant_name(rule):
    return {Homogeneous: "homogeneous", OracleHeterogeneous: "oracle_heterogeneous",
            AdaptiveCommonEigvec: "adaptive_common",
            AdaptivePeriodic: "adaptive_periodic"}[type(rule)]


def _gamma_doc(schedule: GammaSchedule):
    if schedule.table is not None:
        return {"table": list(schedule.table)}
    return {"c": schedule.c, "b": schedule.b, "eps": schedule.eps}


def save_scenario(s: Scenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(scenario_to_doc(s), fh, sort_keys=False)


def bundled_scenario(name: str) -> Scenario:
    """Load one of the packaged experiment scenarios by name."""
    if name not in BUNDLED:
        raise ValidationError(f"no bundled scenario {name!r}; choose from {BUNDLED}")
    text = resources.files("nashnet.scenarios").joinpath(f"{name}.yaml").read_text()
    return loads_scenario(text)


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

def trace_to_csv(trace: Trace, m1: int, m2: int) -> str:
    """Long-format rows (k, agent, subnet, states..., applied stepsize)."""
    m = max(m1, m2)
    cols = ["k", "agent", "subnet"] + [f"s{d}" for d in range(m)] + ["stepsize"]
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    K = trace.iterations

    def row(k, agent, subnet, state, step_val):
        vals = [str(k), str(agent + 1), str(subnet)]
        vals += [FLOAT_FMT % v for v in state]
        vals += [""] * (m - len(state))
        vals.append(FLOAT_FMT % step_val if step_val is not None else "")
        buf.write(",".join(vals) + "\n")

    for k in range(K + 1):
        for i in range(trace.x.shape[1]):
            row(k, i, 1, trace.x[k, i], trace.alpha[k, i] if k < K else None)
        for i in range(trace.y.shape[1]):
            row(k, i, 2, trace.y[k, i], trace.beta[k, i] if k < K else None)
    return buf.getvalue()


def metrics_to_csv(metrics: MetricsSeries) -> str:
    buf = io.StringIO()
    buf.write("k,h1,h2,nash_error,saddle_residual\n")
    for k in range(len(metrics.h1)):
        buf.write(",".join([str(k)] + [FLOAT_FMT % v for v in
                                       (metrics.h1[k], metrics.h2[k],
                                        metrics.nash_error[k], metrics.saddle_residual[k])]) + "\n")
    return buf.getvalue()


def plotdata_to_csv(trace: Trace, metrics: MetricsSeries | None) -> str:
    """Plot-ready long format: k, series, value."""
    buf = io.StringIO()
    buf.write("k,series,value\n")
    K = trace.iterations
    for k in range(K + 1):
        for i in range(trace.x.shape[1]):
            for d in range(trace.x.shape[2]):
                tag = f"x{i + 1}" if trace.x.shape[2] == 1 else f"x{i + 1}[{d}]"
                buf.write(f"{k},{tag}," + (FLOAT_FMT % trace.x[k, i, d]) + "\n")
        for i in range(trace.y.shape[1]):
            for d in range(trace.y.shape[2]):
                tag = f"y{i + 1}" if trace.y.shape[2] == 1 else f"y{i + 1}[{d}]"
                buf.write(f"{k},{tag}," + (FLOAT_FMT % trace.y[k, i, d]) + "\n")
        if metrics is not None:
            buf.write(f"{k},nash_error," + (FLOAT_FMT % metrics.nash_error[k]) + "\n")
    return buf.getvalue()


def read_trace_csv(text: str, n1: int, n2: int, m1: int, m2: int) -> Trace:
    """Inverse of :func:`trace_to_csv` for regression round-trips."""
    lines = text.strip().split("\n")
    body = [ln.split(",") for ln in lines[1:]]
    K = len(body) // (n1 + n2) - 1
    x = np.empty((K + 1, n1, m1))
    y = np.empty((K + 1, n2, m2))
    alpha = np.empty((K, n1))
    beta = np.empty((K, n2))
    for parts in body:
        k = int(parts[0])
        i = int(parts[1]) - 1
        subnet = int(parts[2])
        m = m1 if subnet == 1 else m2
        state = [float(v) for v in parts[3:3 + m]]
        step_raw = parts[-1]
        if subnet == 1:
            x[k, i] = state
            if k < K and step_raw:
                alpha[k, i] = float(step_raw)
        else:
            y[k, i] = state
            if k < K and step_raw:
                beta[k, i] = float(step_raw)
    return Trace(x=x, y=y, alpha=alpha, beta=beta,
                 contact_x=np.zeros((K, n1), dtype=int),
                 contact_y=np.zeros((K, n2), dtype=int))
