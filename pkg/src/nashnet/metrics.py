"""Derived per-iteration metrics of a run: disagreements within each
subnetwork, squared Nash error against a reference saddle, and the saddle
residual U(xbar, y*) - U(x*, ybar), which is nonnegative whenever the
reference really is a saddle point."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import Scenario, Trace
from .saddle import SaddleReport, WeightedObjective, unit_weighted


@dataclass(frozen=True)
class MetricsSeries:
    h1: np.ndarray  # (K+1,) max pairwise distance, subnet 1
    h2: np.ndarray
    nash_error: np.ndarray  # (K+1,) sum of squared distances to the reference
    saddle_residual: np.ndarray  # (K+1,)
    step_min: np.ndarray  # (K,) smallest stepsize applied across both subnets
    step_max: np.ndarray


def _pairwise_max(states):
    """(K+1,) max pairwise Euclidean distance across agents per iteration."""
    diff = states[:, :, None, :] - states[:, None, :, :]
    return np.sqrt((diff ** 2).sum(axis=-1)).max(axis=(1, 2))


def compute_metrics(trace: Trace, scenario: Scenario, saddle: SaddleReport) -> MetricsSeries:
    x_star = np.asarray(saddle.x_star, dtype=float)
    y_star = np.asarray(saddle.y_star, dtype=float)
    if len(x_star) != scenario.m1 or len(y_star) != scenario.m2:
        raise ValueError("saddle reference dimension mismatch")

    h1 = _pairwise_max(trace.x)
    h2 = _pairwise_max(trace.y)
    nash = (((trace.x - x_star) ** 2).sum(axis=(1, 2))
            + ((trace.y - y_star) ** 2).sum(axis=(1, 2)))

    u = unit_weighted(scenario.objectives1).compiled(
        scenario.m1, scenario.m2, which="value", vector=True)
    xbar = trace.x.mean(axis=1)  # (K+1, m1)
    ybar = trace.y.mean(axis=1)
    u_left = np.asarray(u([xbar[:, d] for d in range(scenario.m1)],
                          [np.array([c]) for c in y_star]), dtype=float).ravel()
    u_right = np.asarray(u([np.array([c]) for c in x_star],
                           [ybar[:, d] for d in range(scenario.m2)]), dtype=float).ravel()
    residual = u_left - u_right

    steps = np.concatenate([trace.alpha, trace.beta], axis=1)
    if steps.shape[0]:
        step_min, step_max = steps.min(axis=1), steps.max(axis=1)
    else:
        step_min = step_max = np.zeros(0)
    return MetricsSeries(h1=h1, h2=h2, nash_error=nash, saddle_residual=residual,
                         step_min=step_min, step_max=step_max)
