"""Deficit-queue state machine enforcing the fairness targets.

Each protected arm carries a queue fed by a constant arrival rate (its
target) and drained by the reward it actually accrues; the queue evolves by
the Lindley recursion q <- max(0, q + rate - served). Unprotected arms keep
a structural zero so every formula stays a single vectorised expression.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyHistory, OutOfRangeInput, PreconditionViolated
from .validation import as_unit_range_vector


def _lindley(q, rates, served):
    # shared kernel, no validation: hot loops call this directly
    return np.maximum(0.0, q + rates - served)


@dataclass(frozen=True)
class QueueState:
    """Per-arm deficit queues after round t (t=0 is the all-zero start)."""

    q: np.ndarray
    t: int = 0
    protected: frozenset = frozenset()

    @classmethod
    def initial(cls, n_arms, protected=()):
        return cls(q=np.zeros(n_arms), t=0, protected=frozenset(protected))


def lindley_step(state, rates, served):
    """Advance the queues one round: q_i <- max(0, q_i + rate_i - served_i)."""
    rates = as_unit_range_vector(rates, "arrival rates")
    served = as_unit_range_vector(served, "served amounts")
    if rates.shape != state.q.shape or served.shape != state.q.shape:
        raise OutOfRangeInput("rates/served length does not match queue vector")
    return QueueState(q=_lindley(state.q, rates, served), t=state.t + 1,
                      protected=state.protected)


def lindley_expanded(rate, served_history):
    """Closed-form queue value from the service history of one arm.

    Computes max over 1 <= tau <= t of (rate * tau - sum of the last tau
    served amounts, floored at 0); equals t iterated lindley_step updates
    from an empty queue.
    """
    served = np.asarray(served_history, dtype=float)
    if served.size == 0:
        raise EmptyHistory("served history must contain at least one round")
    suffix = np.cumsum(served[::-1])
    taus = np.arange(1, served.size + 1)
    return float(max(0.0, np.max(rate * taus - suffix)))


def potential(state):
    """Quadratic potential: sum of squared queues over the protected arms."""
    if not state.protected:
        return 0.0
    idx = np.fromiter(state.protected, dtype=int)
    return float(np.sum(state.q[idx] ** 2))


@dataclass(frozen=True)
class DriftCheck:
    lhs: float
    rhs: float
    ok: bool


def drift_check(prev, rates, rewards, x, atol=1e-9):
    """One-round potential-drift diagnostic.

    The change of potential is bounded by 2 + 2 * sum over protected arms of
    q_i * (rate_i - reward_i * x_i); this holds whenever the rates sum to at
    most 1 and x carries at most unit mass, so a failure indicates a bug.
    """
    rates = as_unit_range_vector(rates, "arrival rates")
    rewards = as_unit_range_vector(rewards, "rewards")
    x = np.asarray(x, dtype=float)
    if float(rates.sum()) > 1 + 1e-12:
        raise PreconditionViolated(f"arrival rates sum to {rates.sum():.6g} > 1")
    if float(x.sum()) > 1 + atol:
        raise PreconditionViolated(f"allocation mass {x.sum():.6g} > 1")

    nxt = lindley_step(prev, rates, rewards * x)
    lhs = potential(nxt) - potential(prev)
    if prev.protected:
        idx = np.fromiter(prev.protected, dtype=int)
        coupling = float(np.sum(prev.q[idx] * (rates[idx] - rewards[idx] * x[idx])))
    else:
        coupling = 0.0
    rhs = 2.0 + 2.0 * coupling
    return DriftCheck(lhs=lhs, rhs=rhs, ok=lhs <= rhs + atol)
