"""The online learners and the episode loop.

``BanditQ`` couples deficit queues to a projected-ascent learner: each round
the raw rewards are reweighted by (queue + V_t) before the update, so
starved protected arms look increasingly attractive while V_t keeps the
policy chasing plain reward. ``Hedge`` is the classical exponential-weights
baseline; it tracks the same queues for auditing but ignores them when
updating, which is exactly how it ends up starving protected arms.

Both classes follow the scikit-learn estimator protocol (``get_params`` /
``set_params`` via ``BaseEstimator``, ``fit`` over a (T, N) reward matrix,
``partial_fit`` for streaming) so they compose with the wider ecosystem.
"""

import math

import numpy as np
from sklearn.base import BaseEstimator

from . import queueing
from .config import ConstSqrtT, ExplicitV, validate_config
from .env import FloorTracker, episode_rng
from .errors import LengthMismatch, NegativeInput
from .oracle import benchmark_lp, feasibility_check
from .records import RunSummary, Trace
from .simplex import project
from .validation import as_rewards, as_vector


def surrogate_rewards(q_before, v_t, r):
    """Queue-and-weight reweighted rewards: (q_i + V_t) * r_i.

    Uses the queue vector from *before* the current round's service.
    """
    q_before = as_vector(q_before, "queues")
    if np.any(q_before < 0):
        raise NegativeInput("queues must be non-negative")
    if v_t < 0:
        raise NegativeInput(f"schedule weight {v_t} must be non-negative")
    r = as_rewards(r, q_before.shape[0])
    return (q_before + v_t) * r


def oga_step(x, grad_sq_sum, r_prime):
    """One projected ascent step with the self-tuned step size.

    The denominator is sqrt(2 * sum of past squared gradient norms). On the
    first effective round (empty sum) the current gradient's own norm
    substitutes; a zero gradient moves nothing and leaves the accumulator
    untouched.

    Returns (new_x, new_grad_sq_sum).
    """
    norm_sq = float(r_prime @ r_prime)
    if norm_sq == 0.0:
        return x, grad_sq_sum
    denom_sq = grad_sq_sum if grad_sq_sum > 0.0 else norm_sq
    return project(x + r_prime / math.sqrt(2.0 * denom_sq)), grad_sq_sum + norm_sq


def hedge_step(log_weights, eta, r):
    """Exponential-weights update on gains.

    Returns (new_log_weights, new_distribution).
    """
    lw = log_weights + eta * r
    shifted = np.exp(lw - lw.max())
    return lw, shifted / shifted.sum()


class _PolicyBase(BaseEstimator):
    """Shared bookkeeping: queue tracking, serving, fit/partial_fit plumbing."""

    def _rate_vector(self):
        lam = np.zeros(self.n_arms)
        for arm, rate in (self.target_rates or {}).items():
            lam[int(arm)] = rate
        return lam

    def _start(self, horizon):
        self.horizon_ = horizon if horizon is not None else self.horizon
        self.x_ = np.full(self.n_arms, 1.0 / self.n_arms)
        self.queues_ = np.zeros(self.n_arms)
        self.t_ = 0
        self._lam = self._rate_vector()
        if np.any(self._lam < 0) or float(self._lam.sum()) > 1 + 1e-12:
            raise NegativeInput("target rates must be non-negative and sum to at most 1")
        # the queue recursion is evaluated in its reflection form
        # q(t) = x(t) - min(0, min_tau x(tau)) with x(t) = rate*t - served_sum,
        # with a compensated served sum, so the certified service inequality
        # stays within ~1e-12 of exact at any horizon instead of drifting
        # with iterated rounding
        self._served_sum = np.zeros(self.n_arms)
        self._served_comp = np.zeros(self.n_arms)
        self._deficit_min = np.zeros(self.n_arms)

    def _is_started(self):
        return hasattr(self, "x_")

    def _serve_and_queue(self, r):
        """Common first half of a round: serve at x(t), advance the queues."""
        served = r * self.x_
        q_before = self.queues_
        s, v = self._served_sum, served
        t_new = s + v
        self._served_comp += np.where(np.abs(s) >= np.abs(v), (s - t_new) + v, (v - t_new) + s)
        self._served_sum = t_new
        deficit = self._lam * (self.t_ + 1) - (self._served_sum + self._served_comp)
        np.minimum(self._deficit_min, deficit, out=self._deficit_min)
        self.queues_ = deficit - self._deficit_min
        self.last_x_ = self.x_
        self.last_served_ = served
        self.last_q_before_ = q_before
        return q_before, served

    def fit(self, X, y=None):
        """Run a whole episode over a (T, N) reward matrix, one row per round."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_arms:
            raise LengthMismatch(f"expected a (T, {self.n_arms}) reward matrix, got {X.shape}")
        self._start(self.horizon if self.horizon is not None else X.shape[0])
        for row in X:
            self.partial_fit(row)
        return self

    def predict_proba(self, X=None):
        """Sampling distribution the policy will play next round."""
        if not self._is_started():
            self._start(self.horizon)
        return self.x_.copy()


class BanditQ(_PolicyBase):
    """Fair online prediction with per-arm rate guarantees.

    Parameters
    ----------
    n_arms : number of arms.
    protected : iterable of arm indices carrying rate targets.
    target_rates : dict arm -> guaranteed long-run reward rate.
    v_schedule : weight schedule trading reward seeking against queue
        pressure; defaults to c * sqrt(T) with c = 1.
    horizon : episode length T. May be omitted when ``fit`` is used (the
        matrix length is taken) or when the schedule does not need it.
    """

    def __init__(self, n_arms=2, protected=(), target_rates=None,
                 v_schedule=None, horizon=None):
        self.n_arms = n_arms
        self.protected = protected
        self.target_rates = target_rates
        self.v_schedule = v_schedule
        self.horizon = horizon

    def _start(self, horizon):
        schedule = self.v_schedule if self.v_schedule is not None else ConstSqrtT(1.0)
        if horizon is None and isinstance(schedule, ExplicitV):
            horizon = len(schedule.values)
        super()._start(horizon)
        bad = schedule.violations(horizon=self.horizon_)
        if bad:
            raise NegativeInput("; ".join(bad))
        self._schedule = schedule
        self.grad_sq_sum_ = 0.0

    def partial_fit(self, r, y=None):
        """Consume one reward vector; returns self with x_ set for t+1."""
        if not self._is_started():
            self._start(self.horizon)
        r = as_rewards(r, self.n_arms)
        q_before, _ = self._serve_and_queue(r)
        v_t = self._schedule.value_at(self.t_ + 1, self.horizon_)
        r_prime = (q_before + v_t) * r
        self.x_, self.grad_sq_sum_ = oga_step(self.x_, self.grad_sq_sum_, r_prime)
        self.last_surrogate_ = r_prime
        self.t_ += 1
        return self


class Hedge(_PolicyBase):
    """Exponential weights on raw rewards; the rate-oblivious baseline.

    Queues are tracked so runs remain auditable, but they never feed the
    update. ``eta=None`` picks the classical sqrt(8 ln N / T) tuning.
    """

    def __init__(self, n_arms=2, protected=(), target_rates=None,
                 eta=None, horizon=None):
        self.n_arms = n_arms
        self.protected = protected
        self.target_rates = target_rates
        self.eta = eta
        self.horizon = horizon

    def _start(self, horizon):
        super()._start(horizon)
        if self.eta is not None:
            eta = float(self.eta)
        elif self.n_arms == 1:
            eta = 1.0  # single arm: the distribution is (1,) whatever eta is
        else:
            if self.horizon_ is None:
                raise NegativeInput("Hedge needs either eta or a horizon for the default tuning")
            eta = math.sqrt(8.0 * math.log(self.n_arms) / self.horizon_)
        if eta <= 0:
            raise NegativeInput(f"learning rate {eta} must be positive")
        self.eta_ = eta
        self.log_weights_ = np.zeros(self.n_arms)

    def partial_fit(self, r, y=None):
        if not self._is_started():
            self._start(self.horizon)
        r = as_rewards(r, self.n_arms)
        self._serve_and_queue(r)
        self.log_weights_, self.x_ = hedge_step(self.log_weights_, self.eta_, r)
        self.last_surrogate_ = np.zeros(self.n_arms)
        self.t_ += 1
        return self


def make_policy(cfg):
    """Instantiate the estimator named by a validated config."""
    common = dict(n_arms=cfg.n_arms, protected=tuple(cfg.protected),
                  target_rates=dict(cfg.target_rates), horizon=cfg.horizon)
    if cfg.policy == "hedge":
        return Hedge(**common)
    return BanditQ(v_schedule=cfg.v_schedule, **common)


def run_episode(cfg, source, *, episode_index=0, record_trace=True):
    """Drive one full episode and score it.

    Per round: read rewards, serve at the current distribution, advance the
    queues, then update the policy (the surrogate uses the pre-round
    queues). Deterministic given (cfg.seed, episode_index, source).

    Returns (trace, summary); trace is None when record_trace is False.
    """
    cfg = validate_config(cfg)
    if source.n_arms != cfg.n_arms:
        raise LengthMismatch(f"source has {source.n_arms} arms, config has {cfg.n_arms}")
    horizon, n = cfg.horizon, cfg.n_arms
    policy = make_policy(cfg)
    rng = episode_rng(cfg.seed, episode_index)
    floor_tracker = FloorTracker(n, cfg.window)

    if record_trace:
        cols = {name: np.empty((horizon, n)) for name in
                ("r", "x", "r_prime", "q_after", "served")}
        potentials = np.empty(horizon)
    protected_idx = np.array(sorted(cfg.protected), dtype=int)

    total_reward = 0.0
    cum_rewards = np.zeros(n)
    served_sums = np.zeros(n)
    max_queue = np.zeros(n)

    for t in range(1, horizon + 1):
        r = source.rewards(t, rng)
        policy.partial_fit(r)
        total_reward += float(r @ policy.last_x_)
        cum_rewards += r
        served_sums += policy.last_served_
        np.maximum(max_queue, policy.queues_, out=max_queue)
        floor_tracker.update(r)
        if record_trace:
            i = t - 1
            cols["r"][i] = r
            cols["x"][i] = policy.last_x_
            cols["r_prime"][i] = policy.last_surrogate_
            cols["q_after"][i] = policy.queues_
            cols["served"][i] = policy.last_served_
            q_prot = policy.queues_[protected_idx]
            potentials[i] = float(q_prot @ q_prot)

    floors = floor_tracker.floors()
    report = feasibility_check(cfg.target_rates, floors)
    lower = np.zeros(n)
    for arm, rate in cfg.target_rates.items():
        lower[arm] = rate / floors[arm] if floors[arm] > 0 else math.inf
    if float(lower.sum()) <= 1 + 1e-12:
        benchmark = benchmark_lp(cum_rewards, lower)
    else:
        # empty comparator set: fall back to the unconstrained best arm
        benchmark = benchmark_lp(cum_rewards, np.zeros(n))

    lam = cfg.rate_vector()
    achieved = served_sums / horizon
    summary = RunSummary(
        total_reward=total_reward,
        benchmark_reward=benchmark.value,
        regret=benchmark.value - total_reward,
        max_queue={i: float(max_queue[i]) for i in range(n)},
        achieved_rate={i: float(achieved[i]) for i in range(n)},
        rate_deficit={i: float(max(0.0, lam[i] - achieved[i])) for i in range(n)},
        feasible=report.feasible,
        feasibility_slack=1.0 - report.sum_ratio,
    )
    trace = Trace(r=cols["r"], x=cols["x"], r_prime=cols["r_prime"],
                  q_after=cols["q_after"], served=cols["served"],
                  potential=potentials) if record_trace else None
    return trace, summary
