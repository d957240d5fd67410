"""The distributed Nash-equilibrium computation dynamics.

Per iteration, every agent averages its in-neighbors within its own
subnetwork, refreshes its cached observation of the other subnetwork if it
has cross in-neighbors this step (otherwise the stale cached mix is kept),
and takes a projected subgradient step on its private objective: subnet 1
descends in x, subnet 2 ascends in y. All quantities within one iteration
are computed from the time-k snapshot (synchronous semantics). Agents that
have not yet had any cross contact perform the mixing step only.

Runs are strictly deterministic: no randomness anywhere, so repeated runs
are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .digraph import GraphSequenceSpec
from .errors import NumericError, ValidationError
from .exprs import BoxSet, check_selection, compile_objective
from .stepsizes import (AdaptiveCommonEigvec, AdaptivePeriodic, Homogeneous,
                        LearnerState, OracleHeterogeneous, StepsizeRule,
                        learner_init_common, learner_init_periodic,
                        learner_step)


@dataclass(frozen=True)
class Scenario:
    """Everything needed for one reproducible run."""

    name: str
    m1: int
    m2: int
    objectives1: tuple  # (expr, selection) per subnet-1 agent
    objectives2: tuple
    graph: GraphSequenceSpec
    box_x: BoxSet
    box_y: BoxSet
    rule: StepsizeRule
    x0: np.ndarray  # (n1, m1), may lie outside the box
    y0: np.ndarray
    iterations: int = 1000
    metrics: tuple = ("h1", "h2", "nash_error", "saddle_residual")
    oracle_x: tuple | None = None  # precomputed saddle reference, if any
    oracle_y: tuple | None = None
    oracle_provenance: str = ""

    def __post_init__(self):
        g = self.graph
        if len(self.objectives1) != g.n1 or len(self.objectives2) != g.n2:
            raise ValidationError("agent count does not match the graph spec")
        if self.box_x.dim != self.m1 or self.box_y.dim != self.m2:
            raise ValidationError("box dimensions do not match (m1, m2)")
        x0 = np.asarray(self.x0, dtype=float).reshape(g.n1, self.m1)
        y0 = np.asarray(self.y0, dtype=float).reshape(g.n2, self.m2)
        if not (np.isfinite(x0).all() and np.isfinite(y0).all()):
            raise ValidationError("initial states must be finite")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "y0", y0)
        for e, s in tuple(self.objectives1) + tuple(self.objectives2):
            check_selection(e, s)

    @property
    def n1(self):
        return self.graph.n1

    @property
    def n2(self):
        return self.graph.n2


@dataclass(frozen=True)
class Trace:
    """States and applied stepsizes of a full run; index 0 is the initial
    state, so arrays have length iterations + 1 (stepsizes: iterations)."""

    x: np.ndarray  # (K+1, n1, m1)
    y: np.ndarray  # (K+1, n2, m2)
    alpha: np.ndarray  # (K, n1)
    beta: np.ndarray  # (K, n2)
    contact_x: np.ndarray  # (K, n1) last cross-contact time used at step k, -1 if none yet
    contact_y: np.ndarray  # (K, n2)
    readout1: np.ndarray | None = None  # (K, n1) adaptive learner readouts
    readout2: np.ndarray | None = None

    @property
    def iterations(self):
        return self.x.shape[0] - 1


@dataclass(frozen=True)
class NetworkState:
    """One-step-at-a-time view of the network, for tests and inspection."""

    k: int
    x: np.ndarray
    y: np.ndarray
    breve_x: np.ndarray  # cached cross observations of subnet-1 agents
    breve_y: np.ndarray
    contact_x: np.ndarray  # last contact time, -1 before first contact
    contact_y: np.ndarray


def initial_state(scenario: Scenario) -> NetworkState:
    return NetworkState(
        k=0,
        x=scenario.x0.copy(),
        y=scenario.y0.copy(),
        breve_x=np.zeros((scenario.n1, scenario.m2)),
        breve_y=np.zeros((scenario.n2, scenario.m1)),
        contact_x=np.full(scenario.n1, -1, dtype=int),
        contact_y=np.full(scenario.n2, -1, dtype=int),
    )


def mix_within(states, A) -> np.ndarray:
    """Row-stochastic neighbor averaging: one convex combination per agent."""
    return np.asarray(A, dtype=float) @ np.asarray(states, dtype=float)


def cross_observe(cross_row, other_states, cache_value, cache_time, k):
    """Refresh one agent's cross cache if it has cross in-neighbors now.

    Returns (value, time): the newly mixed observation stamped k, or the
    unchanged cache when the cross row is empty.
    """
    cross_row = np.asarray(cross_row, dtype=float)
    if cross_row.sum() > 0:
        return cross_row @ np.asarray(other_states, dtype=float), k
    return cache_value, cache_time


def step(state: NetworkState, scenario: Scenario, alpha, beta) -> NetworkState:
    """One synchronous update of the whole network (reference path).

    `alpha`, `beta` are the per-agent stepsizes at time state.k. The fast
    loop in :func:`run` is the optimized equivalent; a test pins them to
    each other.
    """
    g = scenario.graph
    k = state.k
    xh = mix_within(state.x, g.mixing(1, k))
    yh = mix_within(state.y, g.mixing(2, k))
    c1, c2 = g.cross_into(1, k), g.cross_into(2, k)
    breve_x = state.breve_x.copy()
    breve_y = state.breve_y.copy()
    tcx = state.contact_x.copy()
    tcy = state.contact_y.copy()
    for i in range(scenario.n1):
        breve_x[i], tcx[i] = cross_observe(c1[i], state.y, breve_x[i], tcx[i], k)
    for i in range(scenario.n2):
        breve_y[i], tcy[i] = cross_observe(c2[i], state.x, breve_y[i], tcy[i], k)

    from .exprs import project, subgradient_x, subgradient_y

    new_x = xh.copy()
    for i, (e, sel) in enumerate(scenario.objectives1):
        if tcx[i] < 0:
            continue  # never observed the other side: consensus only
        q = subgradient_x(e, xh[i], breve_x[i], sel)
        new_x[i] = project(xh[i] - alpha[i] * q, scenario.box_x)
    new_y = yh.copy()
    for i, (e, sel) in enumerate(scenario.objectives2):
        if tcy[i] < 0:
            continue
        q = subgradient_y(e, breve_y[i], yh[i], sel)
        new_y[i] = project(yh[i] + beta[i] * q, scenario.box_y)
    if not (np.isfinite(new_x).all() and np.isfinite(new_y).all()):
        raise NumericError(f"non-finite state produced at iteration {k}")
    return NetworkState(k=k + 1, x=new_x, y=new_y, breve_x=breve_x,
                        breve_y=breve_y, contact_x=tcx, contact_y=tcy)


def _replay_readouts(learner: LearnerState, mats, K: int) -> np.ndarray:
    """Readout vectors at times 0..K-1 under the periodic matrix list."""
    p = len(mats)
    out = np.empty((K, learner.n))
    banks = list(learner.banks)
    activation = learner.activation
    nb = len(banks)
    for k in range(K):
        bank = banks[k % nb]
        out[k] = 1.0 if bank is None else np.diagonal(bank)
        A = mats[k % p]
        for nu in range(nb):
            if banks[nu] is not None:
                banks[nu] = A @ banks[nu]
            elif activation[nu] == k + 1:
                banks[nu] = np.eye(learner.n)
    return out


def _make_learners(scenario: Scenario):
    rule = scenario.rule
    if isinstance(rule, AdaptiveCommonEigvec):
        return learner_init_common(scenario.n1), learner_init_common(scenario.n2)
    if isinstance(rule, AdaptivePeriodic):
        return (learner_init_periodic(scenario.n1, rule.p1),
                learner_init_periodic(scenario.n2, rule.p2))
    return None, None


def run(scenario: Scenario, iterations: int | None = None) -> Trace:
    """Execute the full dynamics for K iterations and record everything."""
    K = scenario.iterations if iterations is None else int(iterations)
    if K < 0:
        raise ValueError("iterations must be >= 0")
    g = scenario.graph
    n1, n2, m1, m2 = g.n1, g.n2, scenario.m1, scenario.m2
    p = g.period
    rule = scenario.rule
    schedule = rule.schedule

    fx = [compile_objective(e, s, m1, m2, which="x") for e, s in scenario.objectives1]
    fy = [compile_objective(e, s, m1, m2, which="y") for e, s in scenario.objectives2]

    A1 = [g.mixing(1, ph) for ph in range(p)]
    A2 = [g.mixing(2, ph) for ph in range(p)]
    C1 = [g.cross_into(1, ph) for ph in range(p)]
    C2 = [g.cross_into(2, ph) for ph in range(p)]
    contact1 = [c.sum(axis=1) > 0 for c in C1]
    contact2 = [c.sum(axis=1) > 0 for c in C2]

    den1 = den2 = None
    if isinstance(rule, OracleHeterogeneous):
        if rule.period != p:
            raise ValidationError("oracle stepsize rule period does not match the graph")
        den1 = [rule.phi1[(ph + 1) % p] for ph in range(p)]
        den2 = [rule.phi2[(ph + 1) % p] for ph in range(p)]
    learner1, learner2 = _make_learners(scenario)
    adaptive = learner1 is not None
    if adaptive:
        # learner banks depend only on the matrix sequence, so replay them
        # up front instead of interleaving with the state loop
        r1tr_pre = _replay_readouts(learner1, A1, K)
        r2tr_pre = _replay_readouts(learner2, A2, K)

    lo_x, hi_x = list(scenario.box_x.lower), list(scenario.box_x.upper)
    lo_y, hi_y = list(scenario.box_y.lower), list(scenario.box_y.upper)

    xtr = np.empty((K + 1, n1, m1))
    ytr = np.empty((K + 1, n2, m2))
    atr = np.empty((K, n1))
    btr = np.empty((K, n2))
    cxtr = np.empty((K, n1), dtype=int)
    cytr = np.empty((K, n2), dtype=int)
    r1tr = np.empty((K, n1)) if adaptive else None
    r2tr = np.empty((K, n2)) if adaptive else None

    X = scenario.x0.copy()
    Y = scenario.y0.copy()
    xtr[0] = X
    ytr[0] = Y
    breve_x = np.zeros((n1, m2))
    breve_y = np.zeros((n2, m1))
    tcx = np.full(n1, -1, dtype=int)
    tcy = np.full(n2, -1, dtype=int)

    for k in range(K):
        ph = k % p
        Xh = A1[ph] @ X
        Yh = A2[ph] @ Y
        rows = contact1[ph]
        if rows.any():
            breve_x[rows] = C1[ph][rows] @ Y
            tcx[rows] = k
        rows = contact2[ph]
        if rows.any():
            breve_y[rows] = C2[ph][rows] @ X
            tcy[rows] = k
        cxtr[k] = tcx
        cytr[k] = tcy

        gk = schedule.value(k)
        if den1 is not None:
            al = gk / den1[ph]
            be = gk / den2[ph]
        elif adaptive:
            r1tr[k] = r1tr_pre[k]
            r2tr[k] = r2tr_pre[k]
            al = gk / r1tr_pre[k]
            be = gk / r2tr_pre[k]
        else:
            al = np.full(n1, gk)
            be = np.full(n2, gk)
        atr[k] = al
        btr[k] = be

        xh_l = Xh.tolist()
        bx_l = breve_x.tolist()
        new_x = []
        try:
            for i in range(n1):
                row = xh_l[i]
                if tcx[i] >= 0:
                    _, q = fx[i](row, bx_l[i])
                    a = al[i]
                    row = [min(max(row[d] - a * q[d], lo_x[d]), hi_x[d]) for d in range(m1)]
                new_x.append(row)
            yh_l = Yh.tolist()
            by_l = breve_y.tolist()
            new_y = []
            for i in range(n2):
                row = yh_l[i]
                if tcy[i] >= 0:
                    _, q = fy[i](by_l[i], row)
                    b = be[i]
                    row = [min(max(row[d] + b * q[d], lo_y[d]), hi_y[d]) for d in range(m2)]
                new_y.append(row)
        except OverflowError:
            raise NumericError(f"numeric overflow at iteration {k}") from None
        X = np.array(new_x)
        Y = np.array(new_y)
        if not (np.isfinite(X).all() and np.isfinite(Y).all()):
            raise NumericError(f"non-finite state produced at iteration {k}")
        xtr[k + 1] = X
        ytr[k + 1] = Y

    return Trace(x=xtr, y=ytr, alpha=atr, beta=btr, contact_x=cxtr,
                 contact_y=cytr, readout1=r1tr, readout2=r2tr)


def make_identical_scenario(objectives, a_seq, eta: float, t1: int,
                            box_x: BoxSet, box_y: BoxSet, rule: StepsizeRule,
                            x0, y0, name: str = "identical",
                            iterations: int = 1000, **kwargs) -> Scenario:
    """Completely identical two-subnetwork scenario.

    Subnet 2 clones subnet 1 (same objectives, same mixing sequence) and the
    cross layer pairs counterpart agents one-to-one at every step, so the
    full dynamics coincide with the reduced single-network saddle recursion.
    """
    n = len(objectives)
    a_seq = tuple(np.asarray(a, dtype=float) for a in a_seq)
    eye = np.eye(n)
    graph = GraphSequenceSpec(
        n1=n, n2=n, period=len(a_seq), a1=a_seq, a2=a_seq,
        cross1=tuple(eye for _ in a_seq), cross2=tuple(eye for _ in a_seq),
        eta=eta, t1=t1, t2=t1, t_cross=1)
    m1, m2 = box_x.dim, box_y.dim
    return Scenario(name=name, m1=m1, m2=m2,
                    objectives1=tuple(objectives), objectives2=tuple(objectives),
                    graph=graph, box_x=box_x, box_y=box_y, rule=rule,
                    x0=np.asarray(x0, dtype=float).reshape(n, m1),
                    y0=np.asarray(y0, dtype=float).reshape(n, m2),
                    iterations=iterations, **kwargs)
