"""The network dynamics: single-step semantics, the optimized run loop, and
their equivalence."""

import dataclasses

import numpy as np
import pytest

from nashnet.engine import (Scenario, initial_state, make_identical_scenario,
                            run, step)
from nashnet.errors import NumericError, ValidationError
from nashnet.exprs import BoxSet, Neg, Pow, Sum, x_var, y_var
from nashnet.scenario_io import bundled_scenario
from nashnet.stepsizes import GammaSchedule, Homogeneous, stepsize_for

BOX5 = BoxSet((-5.0,), (5.0,))
SCHED = GammaSchedule(c=1.0, b=1.0, eps=0.5)


def toy_identical(iterations=50):
    e = Sum((Pow(x_var(0), 2), Neg(Pow(y_var(0), 2))))
    A = np.array([[0.5, 0.5], [0.5, 0.5]])
    return make_identical_scenario(
        objectives=[(e, {}), (e, {})], a_seq=(A,), eta=0.5, t1=1,
        box_x=BOX5, box_y=BOX5, rule=Homogeneous(SCHED),
        x0=[[2.0], [-1.0]], y0=[[1.0], [3.0]], iterations=iterations)


def test_scenario_validation():
    s = toy_identical()
    with pytest.raises(ValidationError):
        dataclasses.replace(s, objectives1=s.objectives1[:1])
    with pytest.raises(ValidationError):
        dataclasses.replace(s, box_x=BoxSet((-1.0, -1.0), (1.0, 1.0)))
    with pytest.raises(ValidationError):
        dataclasses.replace(s, x0=np.array([[np.inf], [0.0]]))


def test_initial_state_and_trace_shapes():
    s = toy_identical(iterations=10)
    st = initial_state(s)
    assert st.k == 0
    np.testing.assert_allclose(st.x, s.x0)
    assert (st.contact_x == -1).all()
    tr = run(s)
    assert tr.x.shape == (11, 2, 1)
    assert tr.alpha.shape == (10, 2)
    assert tr.iterations == 10
    np.testing.assert_allclose(tr.x[0], s.x0)


def test_single_step_semantics():
    s = toy_identical()
    st = initial_state(s)
    a = np.full(2, SCHED.value(0))
    st1 = step(st, s, a, a)
    # mixing averages both agents to 0.5 (x) and 2.0 (y); cross cache takes
    # the counterpart's time-0 value; then one projected subgradient step
    g0 = SCHED.value(0)
    np.testing.assert_allclose(st1.x[:, 0], [0.5 - g0 * 2 * 0.5] * 2)
    # ascent in y: y + g * (-2 y)
    np.testing.assert_allclose(st1.y[:, 0], [2.0 - g0 * 2 * 2.0] * 2)
    assert (st1.contact_x == 0).all()
    assert st1.k == 1


def test_projection_keeps_states_in_box():
    s = toy_identical(iterations=200)
    big = dataclasses.replace(
        s, rule=Homogeneous(GammaSchedule(c=50.0, b=1.0, eps=0.5)))
    tr = run(big)
    assert tr.x.min() >= -5.0 and tr.x.max() <= 5.0
    assert tr.y.min() >= -5.0 and tr.y.max() <= 5.0


@pytest.mark.parametrize("name", ["example1", "example2", "example3",
                                  "perron_weighted", "shared_saddle"])
def test_run_equals_repeated_step(name):
    """The optimized loop and the reference single-step path agree exactly."""
    scenario = bundled_scenario(name)
    K = 40
    tr = run(scenario, iterations=K)
    st = initial_state(scenario)
    for k in range(K):
        st = step(st, scenario, tr.alpha[k], tr.beta[k])
        np.testing.assert_allclose(st.x, tr.x[k + 1], atol=1e-13)
        np.testing.assert_allclose(st.y, tr.y[k + 1], atol=1e-13)
        np.testing.assert_array_equal(st.contact_x, tr.contact_x[k])
        np.testing.assert_array_equal(st.contact_y, tr.contact_y[k])


def test_recorded_stepsizes_match_rule():
    scenario = bundled_scenario("example2")
    tr = run(scenario, iterations=20)
    for k in (0, 1, 7, 19):
        for i in range(scenario.n1):
            assert tr.alpha[k, i] == pytest.approx(
                stepsize_for(scenario.rule, i, 1, k), rel=1e-12)
        for i in range(scenario.n2):
            assert tr.beta[k, i] == pytest.approx(
                stepsize_for(scenario.rule, i, 2, k), rel=1e-12)


def test_consensus_only_before_first_cross_contact():
    s = toy_identical(iterations=4)
    g = s.graph
    # push the cross layer to phase 1 of a period-2 sequence
    delayed = dataclasses.replace(
        g, period=2, a1=g.a1 * 2, a2=g.a2 * 2,
        cross1=(np.zeros((2, 2)), np.eye(2)),
        cross2=(np.zeros((2, 2)), np.eye(2)), t_cross=2)
    s2 = dataclasses.replace(s, graph=delayed)
    tr = run(s2)
    # step 0 has no cross arcs: pure averaging, no subgradient move
    np.testing.assert_allclose(tr.x[1][:, 0], [0.5, 0.5])
    np.testing.assert_allclose(tr.y[1][:, 0], [2.0, 2.0])
    assert (tr.contact_x[0] == -1).all()
    assert (tr.contact_x[1] == 1).all()


def test_stale_cross_observations_reused():
    """With cross arcs only at even times, odd steps reuse the cached mix."""
    s = toy_identical(iterations=6)
    g = s.graph
    intermittent = dataclasses.replace(
        g, period=2, a1=g.a1 * 2, a2=g.a2 * 2,
        cross1=(np.eye(2), np.zeros((2, 2))),
        cross2=(np.eye(2), np.zeros((2, 2))), t_cross=2)
    tr = run(dataclasses.replace(s, graph=intermittent))
    assert (tr.contact_x[1] == 0).all()  # step 1 still uses the k=0 snapshot
    assert (tr.contact_x[2] == 2).all()


def test_nonfinite_state_raises_numeric_error():
    # an unprojected blow-up: gigantic constant stepsizes on a cubic-growth
    # gradient cannot overflow inside a box, so widen the box to infinity
    e = Sum((Pow(x_var(0), 4), Neg(Pow(y_var(0), 2))))
    box = BoxSet((-np.inf,), (np.inf,))
    s = make_identical_scenario(
        objectives=[(e, {}), (e, {})], a_seq=(np.full((2, 2), 0.5),),
        eta=0.5, t1=1, box_x=box, box_y=box,
        rule=Homogeneous(GammaSchedule(table=(1e200,) * 50)),
        x0=[[1e100], [1e100]], y0=[[0.0], [0.0]], iterations=50)
    with pytest.raises(NumericError):
        run(s)


def test_identical_scenario_matches_centralized_recursion():
    """One-agent subnetworks with identity mixing reduce to the plain
    centralized descent-ascent recursion."""
    from nashnet.exprs import project, subgradient_x, subgradient_y
    e = Sum((Pow(Sum((x_var(0), Neg(0.7))), 2), Neg(Pow(y_var(0), 2))))
    s = make_identical_scenario(
        objectives=[(e, {})], a_seq=(np.eye(1),), eta=1.0, t1=1,
        box_x=BOX5, box_y=BOX5, rule=Homogeneous(SCHED),
        x0=[[3.0]], y0=[[2.0]], iterations=100)
    tr = run(s)
    x, y = np.array([3.0]), np.array([2.0])
    for k in range(100):
        g = SCHED.value(k)
        nx = project(x - g * subgradient_x(e, x, y), BOX5)
        y = project(y + g * subgradient_y(e, x, y), BOX5)
        x = nx
        assert tr.x[k + 1, 0, 0] == pytest.approx(x[0], abs=1e-12)
        assert tr.y[k + 1, 0, 0] == pytest.approx(y[0], abs=1e-12)


def test_zero_iterations():
    s = toy_identical(iterations=0)
    tr = run(s)
    assert tr.x.shape == (1, 2, 1)
    assert tr.alpha.shape == (0, 2)
