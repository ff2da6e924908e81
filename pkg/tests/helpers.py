"""Shared test oracles: brute-force grid search, exact summation, and
episode-running conveniences. Everything here is deliberately independent of
the implementation paths it checks."""

import heapq

import numpy as np

from banditq.config import config_from_json, validate_config
from banditq.env import source_from_json
from banditq.policies import run_episode
from banditq.presets import get_preset


def simplex_grid(n, m=1000):
    """All points of the step-1/m grid on the n-simplex (n <= 3)."""
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        i = np.arange(m + 1)
        return np.column_stack([i, m - i]) / m
    if n == 3:
        i, j = np.nonzero(np.add.outer(np.arange(m + 1), np.arange(m + 1)) <= m)
        return np.column_stack([i, j, m - i - j]) / m
    raise ValueError("full enumeration only supported for n <= 3")


def grid_project_enumerate(v, m=1000):
    """Literal exhaustive grid minimiser of ||x - v||_2 over the simplex."""
    pts = simplex_grid(len(v), m)
    d2 = np.sum((pts - np.asarray(v, dtype=float)) ** 2, axis=1)
    return pts[int(np.argmin(d2))]


def grid_project_greedy(v, m=1000):
    """Exact grid minimiser via marginal allocation.

    Allocating the m grid increments one at a time, each to the coordinate
    whose squared distance drops the most, is exact for separable convex
    costs; cross-validated against grid_project_enumerate for n <= 3.
    """
    v = np.asarray(v, dtype=float)
    n = len(v)
    counts = np.zeros(n, dtype=int)
    # marginal cost of moving coordinate i from k/m to (k+1)/m
    heap = [((2 * 0 + 1) / (m * m) - 2 * v[i] / m, i) for i in range(n)]
    heapq.heapify(heap)
    for _ in range(m):
        _, i = heapq.heappop(heap)
        counts[i] += 1
        heapq.heappush(heap, ((2 * counts[i] + 1) / (m * m) - 2 * v[i] / m, i))
    return counts / m


def grid_benchmark_value(cumulative, lower_bounds, m=1000):
    """Best grid allocation value subject to the lower bounds (n <= 3)."""
    pts = simplex_grid(len(cumulative), m)
    feasible = np.all(pts >= np.asarray(lower_bounds) - 1e-12, axis=1)
    assert np.any(feasible), "grid has no feasible point"
    return float(np.max(pts[feasible] @ np.asarray(cumulative, dtype=float)))


def exact_prefix_sums(values):
    """Running sums with Neumaier compensation: exact to ~1 ulp per prefix."""
    out = np.empty(len(values))
    acc = 0.0
    comp = 0.0
    for i, v in enumerate(values):
        v = float(v)
        t = acc + v
        if abs(acc) >= abs(v):
            comp += (acc - t) + v
        else:
            comp += (v - t) + acc
        acc = t
        out[i] = acc + comp
    return out


def run_preset(name, **overrides):
    """Run a named preset, optionally overriding config fields."""
    obj = get_preset(name)
    cfg = validate_config(config_from_json(obj).with_overrides(**overrides))
    source = source_from_json(obj["source"])
    trace, summary = run_episode(cfg, source)
    return cfg, trace, summary


def random_feasible_config_obj(rng, n_arms=None, horizon=None):
    """A random valid config JSON object plus a matching iid source."""
    n = int(n_arms if n_arms is not None else rng.integers(2, 5))
    horizon = int(horizon if horizon is not None else rng.integers(32, 257))
    n_protected = int(rng.integers(1, n + 1))
    protected = sorted(rng.choice(n, size=n_protected, replace=False).tolist())
    lo = np.round(rng.uniform(0.2, 0.6, size=n), 6)
    hi = np.round(np.minimum(1.0, lo + rng.uniform(0.1, 0.4, size=n)), 6)
    # keep the targets jointly servable with slack: sum of rate/floor <= 0.9
    budget = 0.9 / n_protected
    rates = {}
    for arm in protected:
        rates[str(arm)] = float(np.round(lo[arm] * rng.uniform(0.3, 1.0) * budget, 6))
    v_schedule = rng.choice(["const_sqrt_t", "zero"])
    schedule = {"type": "const_sqrt_t", "c": float(np.round(rng.uniform(0.0, 2.0), 3))} \
        if v_schedule == "const_sqrt_t" else {"type": "zero"}
    return {
        "n_arms": n,
        "horizon": horizon,
        "protected": protected,
        "target_rates": rates,
        "v_schedule": schedule,
        "window": 1,
        "seed": int(rng.integers(0, 2**32)),
        "policy": "banditq",
        "source": {"type": "iid_uniform", "lo": lo.tolist(), "hi": hi.tolist()},
    }


def run_random_episode(rng, **kwargs):
    obj = random_feasible_config_obj(rng, **kwargs)
    cfg = validate_config(config_from_json(obj))
    source = source_from_json(obj["source"])
    trace, summary = run_episode(cfg, source)
    return cfg, trace, summary
