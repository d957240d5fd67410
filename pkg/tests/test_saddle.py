"""Saddle-point oracles: grid min-max, the centralized recursion, and
candidate certification."""

import numpy as np
import pytest

from nashnet.catalog import subnet1_objectives
from nashnet.errors import ResourceError
from nashnet.exprs import BoxSet, Neg, Pow, Sum, Var, x_var, y_var
from nashnet.saddle import (BUDGET_ENV, DEFAULT_BUDGET, WeightedObjective,
                            centralized_saddle, grid_budget, grid_minimax,
                            unit_weighted, verify_saddle)
from nashnet.stepsizes import GammaSchedule

BOX5 = BoxSet((-5.0,), (5.0,))


def bilinear_toy():
    # x^2 - y^2, saddle exactly at the origin
    return unit_weighted([(Sum((Pow(x_var(0), 2), Neg(Pow(y_var(0), 2)))), {})])


def test_weighted_objective_validation():
    e = Pow(x_var(0), 2)
    with pytest.raises(ValueError):
        WeightedObjective(((0.0, e, {}),))
    w = WeightedObjective(((2.0, e, {}), (1.0, e, {})))
    assert w.weight_sum == 3.0
    fn = w.compiled(1, 1, which="value")
    assert fn([2.0], [0.0]) == pytest.approx(12.0)


def test_grid_minimax_toy():
    report = grid_minimax(bilinear_toy(), BOX5, BOX5, resolution=201)
    assert report.x_star[0] == pytest.approx(0.0, abs=1e-9)
    assert report.y_star[0] == pytest.approx(0.0, abs=1e-9)
    assert report.value == pytest.approx(0.0, abs=1e-12)
    assert report.minimax_gap == pytest.approx(0.0, abs=1e-12)


def test_grid_minimax_catalog_sum():
    report = grid_minimax(unit_weighted(subnet1_objectives()), BOX5, BOX5,
                          resolution=2001)
    assert report.x_star[0] == pytest.approx(0.61025310, abs=1e-6)
    assert report.y_star[0] == pytest.approx(0.88440690, abs=1e-6)
    assert report.minimax_gap < 1e-4


def test_grid_minimax_shifted_quadratic():
    # 2 (x - 1.3)^2 - (y + 0.4)^2: refinement must beat the coarse spacing
    e = Sum((
        Pow(Sum((x_var(0), Neg(1.3))), 2),
        Pow(Sum((x_var(0), Neg(1.3))), 2),
        Neg(Pow(Sum((y_var(0), 0.4)), 2)),
    ))
    report = grid_minimax(unit_weighted([(e, {})]), BOX5, BOX5, resolution=501)
    assert report.x_star[0] == pytest.approx(1.3, abs=1e-6)
    assert report.y_star[0] == pytest.approx(-0.4, abs=1e-6)


def test_grid_budget_enforced(monkeypatch):
    with pytest.raises(ResourceError):
        grid_minimax(bilinear_toy(), BOX5, BOX5, resolution=101, budget=100)
    monkeypatch.setenv(BUDGET_ENV, "100")
    assert grid_budget() == 100
    with pytest.raises(ResourceError):
        grid_minimax(bilinear_toy(), BOX5, BOX5, resolution=101)
    monkeypatch.setenv(BUDGET_ENV, "junk")
    with pytest.raises(ResourceError):
        grid_budget()
    monkeypatch.delenv(BUDGET_ENV)
    assert grid_budget() == DEFAULT_BUDGET


def test_grid_rejects_high_dimensions():
    box3 = BoxSet((-1.0,) * 3, (1.0,) * 3)
    e = Sum(tuple(Pow(Var("x", d), 2) for d in range(3)) + (Neg(Pow(y_var(0), 2)),))
    with pytest.raises(ResourceError):
        grid_minimax(unit_weighted([(e, {})]), box3, BOX5, resolution=11)


def test_grid_two_dimensional_blocks():
    # x1^2 + (x2-1)^2 - y1^2 - (y2+1)^2 on [-2,2]^2 blocks
    e = Sum((Pow(Var("x", 0), 2), Pow(Sum((Var("x", 1), Neg(1))), 2),
             Neg(Pow(Var("y", 0), 2)), Neg(Pow(Sum((Var("y", 1), 1)), 2))))
    box = BoxSet((-2.0, -2.0), (2.0, 2.0))
    report = grid_minimax(unit_weighted([(e, {})]), box, box, resolution=41)
    np.testing.assert_allclose(report.x_star, [0.0, 1.0], atol=1e-6)
    np.testing.assert_allclose(report.y_star, [0.0, -1.0], atol=1e-6)


def test_centralized_saddle_agrees_with_grid():
    sched = GammaSchedule(c=1.0, b=1.0, eps=0.5)
    report = centralized_saddle(unit_weighted(subnet1_objectives()), BOX5, BOX5,
                                sched, iters=20000)
    assert report.x_star[0] == pytest.approx(0.61025310, abs=5e-3)
    assert report.y_star[0] == pytest.approx(0.88440690, abs=5e-3)


def test_verify_saddle():
    w = bilinear_toy()
    assert verify_saddle(w, ((0.0,), (0.0,)), BOX5, BOX5) <= 1e-12
    # a wrong candidate shows a large violation
    assert verify_saddle(w, ((1.0,), (0.0,)), BOX5, BOX5) > 0.5
    with pytest.raises(ValueError):
        verify_saddle(w, ((9.0,), (0.0,)), BOX5, BOX5)


def test_verify_saddle_catalog_reference():
    w = unit_weighted(subnet1_objectives())
    violation = verify_saddle(w, ((0.61025310,), (0.88440690,)), BOX5, BOX5)
    assert violation <= 1e-6
