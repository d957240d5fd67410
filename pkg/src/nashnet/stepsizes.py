"""Stepsize schedules and per-agent stepsize rules.

Three families: the homogeneous diminishing schedule gamma_k; the oracle
heterogeneous rule dividing gamma_k by the components of the limiting
transition vectors (computable for periodic sequences, where the limit
starting at phase nu+1 depends on the phase alone); and adaptive learners
that estimate those components online by mixing auxiliary basis vectors -
one shared learner when all matrices have a common left eigenvector, or one
bank per phase for periodically switching matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .digraph import GraphSequenceSpec, limiting_stochastic_vector, require_stochastic
from .errors import NashnetError, ValidationError


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaSchedule:
    """gamma_k = c / (k + b)^(1/2 + eps), or an explicit table.

    The power-law exponent range eps in (0, 1/2] keeps the sequence
    square-summable but not summable, with gamma_k * sum_{s<k} gamma_s -> 0.
    """

    c: float = 1.0
    b: float = 1.0
    eps: float = 0.5
    table: tuple | None = None

    def __post_init__(self):
        if self.table is not None:
            tab = tuple(float(v) for v in self.table)
            if not tab or any(v <= 0 for v in tab):
                raise ValidationError("schedule table must be nonempty and positive")
            if any(tab[i + 1] > tab[i] for i in range(len(tab) - 1)):
                raise ValidationError("schedule table must be non-increasing")
            object.__setattr__(self, "table", tab)
            return
        if self.c <= 0 or self.b <= 0:
            raise ValidationError("power-law schedule needs c > 0 and b > 0")
        if not 0.0 < self.eps <= 0.5:
            raise ValidationError("power-law exponent eps must lie in (0, 1/2]")

    def value(self, k: int) -> float:
        if k < 0:
            raise ValueError("k must be >= 0")
        if self.table is not None:
            if k >= len(self.table):
                raise ValueError(f"schedule table of length {len(self.table)} has no entry {k}")
            return self.table[k]
        return self.c / (k + self.b) ** (0.5 + self.eps)


def gamma(schedule: GammaSchedule, k: int) -> float:
    return schedule.value(k)


def validate_schedule(schedule: GammaSchedule, horizon: int = 10_000) -> list:
    """Numeric (heuristic, not proof) checks of the diminishing conditions.

    Returns a list of failed-check descriptions over 0..horizon: values must
    be non-increasing, gamma_k * partial-sum must decrease over the back
    half, and the squared partial sums must flatten (last-quarter increment
    below 1% of the total).
    """
    if horizon < 100:
        raise ValueError("horizon must be >= 100")
    g = np.array([schedule.value(k) for k in range(horizon)])
    failures = []
    if np.any(np.diff(g) > 0):
        failures.append("schedule is not non-increasing")
    csum = np.concatenate([[0.0], np.cumsum(g)[:-1]])
    prod = g * csum  # gamma_k * sum_{s<k} gamma_s
    tail = prod[horizon // 2:]
    if not np.all(np.diff(tail) <= 1e-15):
        failures.append("gamma_k * partial-sum is not decreasing over the back half")
    sq = np.cumsum(g ** 2)
    increment = sq[-1] - sq[3 * horizon // 4]
    if increment > 0.01 * sq[-1]:
        failures.append(
            f"squared partial sums still growing: last-quarter increment "
            f"{increment:.3e} exceeds 1% of total {sq[-1]:.3e}")
    return failures


# ---------------------------------------------------------------------------
# rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Homogeneous:
    schedule: GammaSchedule


@dataclass(frozen=True)
class OracleHeterogeneous:
    """Per-phase limiting vectors; at time k divide gamma_k by the component
    of the vector for start phase (k+1) mod period."""

    schedule: GammaSchedule
    period: int
    phi1: tuple  # phase -> vector for subnet 1, start index = that phase
    phi2: tuple

    def __post_init__(self):
        for vecs, label in ((self.phi1, "subnet 1"), (self.phi2, "subnet 2")):
            if len(vecs) != self.period:
                raise ValidationError(f"{label} needs one limit vector per phase")
            for v in vecs:
                v = np.asarray(v, dtype=float)
                if np.any(v <= 0) or abs(v.sum() - 1.0) > 1e-9:
                    raise ValidationError(f"{label} limit vector not positive stochastic")
        object.__setattr__(self, "phi1", tuple(np.asarray(v, dtype=float) for v in self.phi1))
        object.__setattr__(self, "phi2", tuple(np.asarray(v, dtype=float) for v in self.phi2))


@dataclass(frozen=True)
class AdaptiveCommonEigvec:
    schedule: GammaSchedule


@dataclass(frozen=True)
class AdaptivePeriodic:
    schedule: GammaSchedule
    p1: int
    p2: int


StepsizeRule = Homogeneous | OracleHeterogeneous | AdaptiveCommonEigvec | AdaptivePeriodic


def rule_schedule(rule: StepsizeRule) -> GammaSchedule:
    return rule.schedule


def oracle_heterogeneous_build(spec: GraphSequenceSpec, schedule: GammaSchedule) -> OracleHeterogeneous:
    """Precompute the per-phase limiting vectors of a periodic UJSC spec."""
    phi1 = tuple(limiting_stochastic_vector(spec, 1, s).phi for s in range(spec.period))
    phi2 = tuple(limiting_stochastic_vector(spec, 2, s).phi for s in range(spec.period))
    return OracleHeterogeneous(schedule=schedule, period=spec.period, phi1=phi1, phi2=phi2)


# ---------------------------------------------------------------------------
# adaptive learners
# ---------------------------------------------------------------------------

@dataclass
class LearnerState:
    """Auxiliary consensus states whose diagonal readout estimates the
    limiting-vector components.

    `banks[nu]` holds the matrix whose row i is agent i's auxiliary vector
    for phase nu (a row of a product of mixing matrices, hence stochastic);
    a bank is None until its activation time nu+1. The common-eigenvector
    learner is the single-bank case activated at time 0.
    """

    n: int
    banks: list
    activation: tuple  # activation time of each bank
    k: int = 0  # number of mixing steps consumed so far

    def readout(self, agent: int, k: int) -> float:
        """Stepsize denominator for `agent` at time `k`; falls back to 1
        before the owning bank has been activated."""
        nu = k % len(self.banks)
        bank = self.banks[nu]
        if bank is None:
            return 1.0
        return float(bank[agent, agent])

    def readout_vector(self, k: int) -> np.ndarray:
        nu = k % len(self.banks)
        bank = self.banks[nu]
        if bank is None:
            return np.ones(self.n)
        return np.diagonal(bank).copy()


def learner_init_common(n: int) -> LearnerState:
    """Single learner started from the standard basis at time 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return LearnerState(n=n, banks=[np.eye(n)], activation=(0,))


def learner_init_periodic(n: int, p: int) -> LearnerState:
    """One bank per phase; bank nu starts from the basis at time nu + 1."""
    if n < 1 or p < 1:
        raise ValueError("n and p must be >= 1")
    return LearnerState(n=n, banks=[None] * p, activation=tuple(nu + 1 for nu in range(p)))


def learner_step(state: LearnerState, A, k: int) -> LearnerState:
    """Advance every active bank by the mixing matrix A(k); activate banks
    whose start time is k + 1. Mutates and returns `state`."""
    A = require_stochastic(A)
    for nu, bank in enumerate(state.banks):
        if bank is not None:
            state.banks[nu] = A @ bank
    for nu, t0 in enumerate(state.activation):
        if t0 == k + 1 and state.banks[nu] is None:
            state.banks[nu] = np.eye(state.n)
    state.k = k + 1
    return state


def learner_step_common(state: LearnerState, A) -> LearnerState:
    return learner_step(state, A, state.k)


def learner_step_periodic(state: LearnerState, A, k: int) -> LearnerState:
    return learner_step(state, A, k)


# ---------------------------------------------------------------------------
# runtime dispatch
# ---------------------------------------------------------------------------

def stepsize_for(rule: StepsizeRule, agent: int, subnet: int, k: int,
                 learner: LearnerState | None = None) -> float:
    """The stepsize of `agent` in `subnet` at time k under `rule`."""
    g = rule.schedule.value(k)
    if isinstance(rule, Homogeneous):
        return g
    if isinstance(rule, OracleHeterogeneous):
        vecs = rule.phi1 if subnet == 1 else rule.phi2
        phi = vecs[(k + 1) % rule.period]
        return g / float(phi[agent])
    if isinstance(rule, (AdaptiveCommonEigvec, AdaptivePeriodic)):
        if learner is None:
            raise ValueError("adaptive rules need a learner state")
        denom = learner.readout(agent, k)
        if denom <= 0.0:
            raise NashnetError(
                f"adaptive readout {denom} not positive for agent {agent} at k={k}; "
                "weight-rule floor violated upstream")
        return g / denom
    raise TypeError(f"unknown stepsize rule {type(rule).__name__}")
