"""Independent saddle-point oracles: exhaustive grid min-max and a
centralized projected subgradient recursion.

The grid oracle is deliberately brute force - for the 1-D / 1-D experiments
it is the most trustworthy ground truth available - and is followed by a
local three-level refinement around the winner for ~100x sharper answers.
Blocks of dimension above two are rejected with a resource error; the
centralized recursion stays available there.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from .errors import ResourceError
from .exprs import BoxSet, compile_objective, project

# 2001 grid points per 1-D block must fit, so the cap sits just above 2001^2
DEFAULT_BUDGET = 4_100_000
BUDGET_ENV = "NASHNET_BUDGET"


@dataclass(frozen=True)
class WeightedObjective:
    """Positively weighted sum of (expr, selection) objective terms."""

    terms: tuple  # of (weight, expr, selection)

    def __post_init__(self):
        terms = tuple((float(w), e, dict(s or {})) for w, e, s in self.terms)
        if any(w <= 0 for w, _, _ in terms):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "terms", terms)

    @property
    def weight_sum(self):
        return sum(w for w, _, _ in self.terms)

    def compiled(self, m1, m2, which="both", vector=False):
        fns = [(w, compile_objective(e, s, m1, m2, which=which, vector=vector))
               for w, e, s in self.terms]
        if which == "value":
            def value(x, y):
                return sum(w * f(x, y) for w, f in fns)
            return value
        if which == "both":
            def both(x, y):
                v = 0.0
                gx = np.zeros(m1)
                gy = np.zeros(m2)
                for w, f in fns:
                    fv, fgx, fgy = f(x, y)
                    v += w * fv
                    gx += np.multiply(w, fgx)
                    gy += np.multiply(w, fgy)
                return v, gx, gy
            return both
        raise ValueError("compiled() supports which='value' or 'both'")


def unit_weighted(objectives) -> WeightedObjective:
    """Unit-weight sum of (expr, selection) pairs."""
    return WeightedObjective(tuple((1.0, e, s) for e, s in objectives))


@dataclass(frozen=True)
class SaddleReport:
    x_star: tuple
    y_star: tuple
    value: float
    minimax_gap: float
    grid_resolution: int


def grid_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(float(raw))
    except ValueError:
        raise ResourceError(f"{BUDGET_ENV}={raw!r} is not a number") from None


def _axis_grids(box: BoxSet, resolution: int):
    return [np.linspace(l, u, resolution) for l, u in zip(box.lower, box.upper)]


def _mesh(axes):
    """Flatten a per-axis grid list into an (N, dim) point array, C order so
    np.argmin ties resolve to the lexicographically smallest index."""
    if len(axes) == 1:
        return axes[0][:, None]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _eval_table(value_fn, xpts, ypts):
    """Value of the objective on the product of point sets, shape (Nx, Ny)."""
    xcols = [xpts[:, d][:, None] for d in range(xpts.shape[1])]
    ycols = [ypts[:, d][None, :] for d in range(ypts.shape[1])]
    return np.broadcast_to(np.asarray(value_fn(xcols, ycols), dtype=float),
                           (xpts.shape[0], ypts.shape[0])).copy()


def grid_minimax(w: WeightedObjective, bx: BoxSet, by: BoxSet,
                 resolution: int = 2001, budget: int | None = None,
                 refine_levels: int = 3) -> SaddleReport:
    """Brute-force saddle search on a regular grid with local refinement.

    x* minimizes the max over the y grid, y* maximizes the min over the x
    grid; the reported minimax gap is their difference on the coarse grid.
    """
    if resolution < 3:
        raise ValueError("resolution must be >= 3")
    m1, m2 = bx.dim, by.dim
    if m1 > 2 or m2 > 2:
        raise ResourceError(
            f"grid oracle limited to blocks of dimension <= 2, got ({m1},{m2}); "
            "use the centralized oracle instead")
    budget = grid_budget() if budget is None else budget
    total = resolution ** m1 * resolution ** m2
    if total > budget:
        need = int(np.floor(budget ** (1.0 / (m1 + m2))))
        raise ResourceError(
            f"grid of {total} evaluations exceeds budget {budget}; "
            f"reduce resolution to at most {need}")

    value_fn = w.compiled(m1, m2, which="value", vector=True)
    x_axes = _axis_grids(bx, resolution)
    y_axes = _axis_grids(by, resolution)
    xpts, ypts = _mesh(x_axes), _mesh(y_axes)
    table = _eval_table(value_fn, xpts, ypts)
    sup_y = table.max(axis=1)
    inf_x = table.min(axis=0)
    ix = int(sup_y.argmin())
    iy = int(inf_x.argmax())
    gap = float(sup_y[ix] - inf_x[iy])
    x_star, y_star = xpts[ix].copy(), ypts[iy].copy()

    # local refinement: shrink a window of one coarse cell around the winner,
    # keeping the opposing sweep global (coarse grid plus the fine window)
    hx = np.array([(u - l) / (resolution - 1) for l, u in zip(bx.lower, bx.upper)])
    hy = np.array([(u - l) / (resolution - 1) for l, u in zip(by.lower, by.upper)])
    fine = min(201, resolution)
    for _ in range(refine_levels):
        fx_axes = [np.linspace(max(l, c - h), min(u, c + h), fine)
                   for c, h, l, u in zip(x_star, hx, bx.lower, bx.upper)]
        fy_axes = [np.linspace(max(l, c - h), min(u, c + h), fine)
                   for c, h, l, u in zip(y_star, hy, by.lower, by.upper)]
        fxp, fyp = _mesh(fx_axes), _mesh(fy_axes)
        y_all = np.concatenate([ypts, fyp], axis=0)
        x_all = np.concatenate([xpts, fxp], axis=0)
        x_star = fxp[int(_eval_table(value_fn, fxp, y_all).max(axis=1).argmin())].copy()
        y_star = fyp[int(_eval_table(value_fn, x_all, fyp).min(axis=0).argmax())].copy()
        hx = hx * 2.0 / (fine - 1)
        hy = hy * 2.0 / (fine - 1)

    val = float(np.asarray(value_fn([np.array([c]) for c in x_star],
                                    [np.array([c]) for c in y_star])).ravel()[0])
    return SaddleReport(x_star=tuple(x_star), y_star=tuple(y_star),
                        value=val, minimax_gap=gap, grid_resolution=resolution)


def centralized_saddle(w: WeightedObjective, bx: BoxSet, by: BoxSet,
                       schedule, iters: int = 100_000) -> SaddleReport:
    """Projected subgradient descent-ascent from the box center.

    `schedule` is anything with a ``value(k)`` method (see stepsizes module).
    Used to cross-validate and refine grid answers.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    m1, m2 = bx.dim, by.dim
    fn = w.compiled(m1, m2, which="both")
    x = bx.center()
    y = by.center()
    for k in range(iters):
        g = schedule.value(k)
        _, gx, gy = fn(tuple(x), tuple(y))
        x = project(x - g * np.asarray(gx), bx)
        y = project(y + g * np.asarray(gy), by)
    v, _, _ = fn(tuple(x), tuple(y))
    return SaddleReport(x_star=tuple(x), y_star=tuple(y), value=float(v),
                        minimax_gap=float("nan"), grid_resolution=0)


def verify_saddle(w: WeightedObjective, candidate, bx: BoxSet, by: BoxSet,
                  samples: int = 10_000) -> float:
    """Largest violation of the saddle inequalities on deterministic samples.

    Returns max over sampled x of value(x*,y*) - value(x,y*) and over sampled
    y of value(x*,y) - value(x*,y*); a value <= tol certifies the candidate
    on the sample.
    """
    x_star, y_star = (np.asarray(candidate[0], dtype=float).ravel(),
                      np.asarray(candidate[1], dtype=float).ravel())
    if not (bx.contains(x_star) and by.contains(y_star)):
        raise ValueError("candidate lies outside the boxes")
    m1, m2 = bx.dim, by.dim
    value_fn = w.compiled(m1, m2, which="value", vector=True)
    per_dim = max(3, int(round(samples ** (1.0 / max(m1, m2)))))
    x_axes = _axis_grids(bx, per_dim)
    y_axes = _axis_grids(by, per_dim)
    xpts, ypts = _mesh(x_axes), _mesh(y_axes)
    xs_col = [np.array([c]) for c in x_star]
    ys_col = [np.array([c]) for c in y_star]
    v_star = float(np.asarray(value_fn(xs_col, ys_col)).ravel()[0])
    v_x = np.asarray(value_fn([xpts[:, d] for d in range(m1)],
                              [np.array([c]) for c in y_star])).ravel()
    v_y = np.asarray(value_fn([np.array([c]) for c in x_star],
                              [ypts[:, d] for d in range(m2)])).ravel()
    return float(max((v_star - v_x).max(), (v_y - v_star).max()))
