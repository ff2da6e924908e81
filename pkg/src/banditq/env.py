"""Reward sources: synthetic adversaries with known per-arm floors, and
bit-exact replay from CSV files.

Replay/record file format: header ``t,r_1,...,r_N``, one row per round,
floats in shortest exact round-trip form.

Randomness is pinned to PCG64 seeded through SeedSequence((seed,
episode_index)), so every (seed, episode) pair yields the same stream on
every platform and sweep episodes can run in parallel without sharing
generator state.
"""

import json
import math
import os

import numpy as np

from .errors import (
    OutOfRangeInput,
    ReplayRowMissing,
    ReplayValueOutOfRange,
    HistoryShorterThanWindow,
)
from .records import fmt
from .validation import as_unit_range_vector, as_vector


def episode_rng(seed, episode_index=0):
    """Deterministic per-episode generator, splittable by episode index."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, episode_index))))


class RewardSource:
    """Base class: yields one reward vector per round, 1-based round index.

    ``declared_floor`` is the per-arm minimum the source guarantees; emitted
    rewards are clipped into [max(floor, 0), 1], a no-op for consistently
    parameterised sources.
    """

    n_arms = None
    declared_floor = None

    def rewards(self, t, rng):
        raise NotImplementedError

    def _clip(self, r):
        return np.clip(r, np.maximum(self.declared_floor, 0.0), 1.0)


class IIDUniform(RewardSource):
    """Independent uniform draws in [lo_i, hi_i] per arm."""

    def __init__(self, lo, hi):
        self.lo = as_unit_range_vector(lo, "lo")
        self.hi = as_unit_range_vector(hi, "hi")
        if self.lo.shape != self.hi.shape:
            raise OutOfRangeInput("lo and hi must have the same length")
        if np.any(self.lo > self.hi):
            raise OutOfRangeInput("lo must be <= hi elementwise")
        self.n_arms = self.lo.shape[0]
        self.declared_floor = self.lo.copy()

    def rewards(self, t, rng):
        return self._clip(rng.uniform(self.lo, self.hi))

    def to_json(self):
        return {"type": "iid_uniform", "lo": list(self.lo), "hi": list(self.hi)}


class Periodic(RewardSource):
    """Deterministic sinusoids, phase-shifted per arm."""

    def __init__(self, base, amplitude, period):
        self.base = as_unit_range_vector(base, "base")
        self.amplitude = as_vector(amplitude, "amplitude")
        if self.base.shape != self.amplitude.shape:
            raise OutOfRangeInput("base and amplitude must have the same length")
        if np.any(self.amplitude < 0):
            raise OutOfRangeInput("amplitude must be non-negative")
        if np.any(self.base - self.amplitude < -1e-12) or np.any(self.base + self.amplitude > 1 + 1e-12):
            raise OutOfRangeInput("base +/- amplitude must stay inside [0, 1]")
        if period < 1:
            raise OutOfRangeInput(f"period={period} must be >= 1")
        self.period = int(period)
        self.n_arms = self.base.shape[0]
        self.declared_floor = self.base - self.amplitude
        self._phase = 2.0 * math.pi * np.arange(self.n_arms) / self.n_arms

    def rewards(self, t, rng):
        r = self.base + self.amplitude * np.sin(2.0 * math.pi * t / self.period + self._phase)
        return self._clip(r)

    def to_json(self):
        return {"type": "periodic", "base": list(self.base),
                "amplitude": list(self.amplitude), "period": self.period}


class Starvation(RewardSource):
    """Two constant arms with the protected arm strictly less rewarding.

    Greedy no-constraint learners concentrate on arm 1 and starve arm 0;
    the deficit queues are what keeps arm 0 alive.
    """

    def __init__(self, protected_reward, rival_reward):
        if not 0 <= protected_reward <= 1 or not 0 <= rival_reward <= 1:
            raise OutOfRangeInput("rewards must lie in [0, 1]")
        if not protected_reward < rival_reward:
            raise OutOfRangeInput("rival reward must exceed the protected arm's")
        self.protected_reward = float(protected_reward)
        self.rival_reward = float(rival_reward)
        self.n_arms = 2
        self.declared_floor = np.array([self.protected_reward, self.rival_reward])

    def rewards(self, t, rng):
        return self.declared_floor.copy()

    def to_json(self):
        return {"type": "starvation", "protected_reward": self.protected_reward,
                "rival_reward": self.rival_reward}


class Replay(RewardSource):
    """Bit-exact playback of a recorded reward file."""

    def __init__(self, path):
        self.path = str(path)
        self._rows = read_rewards_csv(self.path)
        self.n_arms = self._rows.shape[1]
        self.declared_floor = self._rows.min(axis=0)

    def rewards(self, t, rng):
        if not 1 <= t <= self._rows.shape[0]:
            raise ReplayRowMissing(
                f"replay file {self.path} has {self._rows.shape[0]} rounds, round {t} requested"
            )
        return self._rows[t - 1].copy()

    @property
    def horizon(self):
        return self._rows.shape[0]

    def to_json(self):
        return {"type": "replay", "path": self.path}


def source_from_json(obj, base_dir=None):
    """Build a reward source from its JSON description."""
    kind = obj.get("type")
    if kind == "iid_uniform":
        return IIDUniform(lo=obj["lo"], hi=obj["hi"])
    if kind == "periodic":
        return Periodic(base=obj["base"], amplitude=obj["amplitude"], period=obj["period"])
    if kind == "starvation":
        return Starvation(protected_reward=obj["protected_reward"],
                          rival_reward=obj["rival_reward"])
    if kind == "replay":
        path = obj["path"]
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(str(base_dir), path)
        return Replay(path)
    raise OutOfRangeInput(f"unknown reward source type {kind!r}")


def load_source(path):
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return source_from_json(obj.get("source", obj))


def write_rewards_csv(path, rewards):
    """Record a (T, N) reward matrix in the replay format."""
    rewards = np.asarray(rewards, dtype=float)
    n = rewards.shape[1]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t," + ",".join(f"r_{i + 1}" for i in range(n)) + "\n")
        for t in range(rewards.shape[0]):
            fh.write(str(t + 1) + "," + ",".join(fmt(v) for v in rewards[t]) + "\n")


def read_rewards_csv(path):
    """Parse a replay file into a (T, N) matrix, validating the range."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    if header[:1] != ["t"] or len(header) < 2 or header[1:] != [f"r_{i + 1}" for i in range(len(header) - 1)]:
        raise ReplayValueOutOfRange(f"not a replay file: unexpected header in {path}")
    data = np.array([[float(v) for v in row] for row in rows]) if rows else np.zeros((0, len(header)))
    if data.shape[0] == 0:
        raise ReplayRowMissing(f"replay file {path} has no rounds")
    rewards = data[:, 1:]
    if np.any(rewards < -1e-12) or np.any(rewards > 1 + 1e-12) or not np.all(np.isfinite(rewards)):
        raise ReplayValueOutOfRange(f"replay file {path} has rewards outside [0, 1]")
    return rewards


class FloorTracker:
    """Online per-arm windowed reward floors for a single episode.

    Feed one reward vector per round; ``floors()`` then equals
    ``empirical_floor`` of the full history. Keeps only a ring buffer of the
    last ``window`` rounds, so summary-only runs stay O(window) in memory.
    """

    def __init__(self, n_arms, window=1):
        if window < 1:
            raise OutOfRangeInput(f"window={window} must be >= 1")
        self.window = int(window)
        self._ring = np.zeros((self.window, n_arms))
        self._seen = 0
        self._mins = np.full(n_arms, np.inf)

    def update(self, r):
        self._ring[self._seen % self.window] = r
        self._seen += 1
        if self.window == 1:
            np.minimum(self._mins, r, out=self._mins)
        elif self._seen >= self.window:
            np.minimum(self._mins, self._ring.sum(axis=0) / self.window, out=self._mins)

    def floors(self):
        if self._seen < self.window:
            raise HistoryShorterThanWindow(
                f"saw {self._seen} rounds, window is {self.window}"
            )
        return self._mins.copy()


def empirical_floor(history, window=1):
    """Per-arm minimum of window-averaged rewards over all sliding windows.

    ``window=1`` reduces to the plain per-arm minimum. Windows slide one
    round at a time (alignment-free).
    """
    history = np.asarray(history, dtype=float)
    single_arm = history.ndim == 1
    if single_arm:
        history = history[:, None]
    t = history.shape[0]
    if window < 1:
        raise OutOfRangeInput(f"window={window} must be >= 1")
    if t < window:
        raise HistoryShorterThanWindow(f"history has {t} rounds, window is {window}")
    if window == 1:
        floors = history.min(axis=0)
    else:
        sums = np.cumsum(history, axis=0)
        head = sums[window - 1 : t]
        tail = np.vstack([np.zeros((1, history.shape[1])), sums[: t - window]])
        floors = (head - tail).min(axis=0) / window
    return float(floors[0]) if single_arm else floors
