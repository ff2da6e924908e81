"""Per-round trace records, run summaries, and their file formats.

trace.csv columns (1-based arm labels):

    t,r_1..r_N,x_1..x_N,rprime_1..rprime_N,q_1..q_N,served_1..served_N,potential

``q_*`` is the queue vector *after* the round; the pre-round vector is the
previous row's (all zeros before round 1). Floats are written in shortest
exact round-trip form, so parsing a file reproduces the original values
bit for bit.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch


def fmt(value):
    """Shortest decimal string that parses back to the identical float."""
    return repr(float(value))


@dataclass(frozen=True)
class TraceRecord:
    """Everything observable about one round."""

    t: int
    r: np.ndarray
    x: np.ndarray
    r_prime: np.ndarray
    q_before: np.ndarray
    q_after: np.ndarray
    served: np.ndarray
    potential: float


class Trace:
    """Column-oriented episode trace; behaves as a sequence of TraceRecord."""

    def __init__(self, r, x, r_prime, q_after, served, potential):
        self.r = np.asarray(r, dtype=float)
        self.x = np.asarray(x, dtype=float)
        self.r_prime = np.asarray(r_prime, dtype=float)
        self.q_after = np.asarray(q_after, dtype=float)
        self.served = np.asarray(served, dtype=float)
        self.potential = np.asarray(potential, dtype=float)
        shapes = {a.shape for a in (self.r, self.x, self.r_prime, self.q_after, self.served)}
        if len(shapes) != 1 or self.potential.shape[0] != self.r.shape[0]:
            raise LengthMismatch("trace columns disagree in shape")

    @property
    def horizon(self):
        return self.r.shape[0]

    @property
    def n_arms(self):
        return self.r.shape[1]

    @property
    def q_before(self):
        """Queue vectors entering each round (zeros before round 1)."""
        qb = np.empty_like(self.q_after)
        qb[0] = 0.0
        qb[1:] = self.q_after[:-1]
        return qb

    def __len__(self):
        return self.horizon

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        i = range(len(self))[i]  # normalises negatives, raises IndexError
        q_before = self.q_after[i - 1].copy() if i > 0 else np.zeros(self.n_arms)
        return TraceRecord(
            t=i + 1,
            r=self.r[i].copy(),
            x=self.x[i].copy(),
            r_prime=self.r_prime[i].copy(),
            q_before=q_before,
            q_after=self.q_after[i].copy(),
            served=self.served[i].copy(),
            potential=float(self.potential[i]),
        )

    @classmethod
    def from_records(cls, records):
        records = list(records)
        return cls(
            r=np.array([rec.r for rec in records]),
            x=np.array([rec.x for rec in records]),
            r_prime=np.array([rec.r_prime for rec in records]),
            q_after=np.array([rec.q_after for rec in records]),
            served=np.array([rec.served for rec in records]),
            potential=np.array([rec.potential for rec in records]),
        )

    def write_csv(self, path):
        n = self.n_arms
        cols = (
            ["t"]
            + [f"r_{i + 1}" for i in range(n)]
            + [f"x_{i + 1}" for i in range(n)]
            + [f"rprime_{i + 1}" for i in range(n)]
            + [f"q_{i + 1}" for i in range(n)]
            + [f"served_{i + 1}" for i in range(n)]
            + ["potential"]
        )
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for t in range(self.horizon):
                row = [str(t + 1)]
                for block in (self.r, self.x, self.r_prime, self.q_after, self.served):
                    row.extend(fmt(v) for v in block[t])
                row.append(fmt(self.potential[t]))
                fh.write(",".join(row) + "\n")

    @classmethod
    def read_csv(cls, path):
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            rows = [line.strip().split(",") for line in fh if line.strip()]
        if not header or header[0] != "t" or header[-1] != "potential":
            raise LengthMismatch(f"not a trace file: unexpected header in {path}")
        n, rem = divmod(len(header) - 2, 5)
        if rem != 0 or n < 1:
            raise LengthMismatch(f"not a trace file: {len(header)} columns in {path}")
        expected = [f"{name}_{i + 1}" for name in ("r", "x", "rprime", "q", "served")
                    for i in range(n)]
        if header[1:-1] != expected:
            raise LengthMismatch(f"not a trace file: column names mismatch in {path}")
        data = np.array([[float(v) for v in row] for row in rows])
        if data.shape[0] == 0:
            raise LengthMismatch(f"trace file {path} has no rows")
        ts = data[:, 0].astype(int)
        if not np.array_equal(ts, np.arange(1, data.shape[0] + 1)):
            raise LengthMismatch(f"trace file {path} rounds are not contiguous from 1")
        blocks = [data[:, 1 + k * n : 1 + (k + 1) * n] for k in range(5)]
        return cls(r=blocks[0], x=blocks[1], r_prime=blocks[2], q_after=blocks[3],
                   served=blocks[4], potential=data[:, -1])


@dataclass(frozen=True)
class RunSummary:
    """End-of-episode scorecard against the exact offline benchmark."""

    total_reward: float
    benchmark_reward: float
    regret: float
    max_queue: dict = field(default_factory=dict)
    achieved_rate: dict = field(default_factory=dict)
    rate_deficit: dict = field(default_factory=dict)
    feasible: bool = True
    feasibility_slack: float = 1.0

    def to_json(self):
        def num(v):
            return None if not math.isfinite(v) else v

        return {
            "total_reward": self.total_reward,
            "benchmark_reward": self.benchmark_reward,
            "regret": self.regret,
            "max_queue": {str(a): v for a, v in sorted(self.max_queue.items())},
            "achieved_rate": {str(a): v for a, v in sorted(self.achieved_rate.items())},
            "rate_deficit": {str(a): v for a, v in sorted(self.rate_deficit.items())},
            "feasible": self.feasible,
            "feasibility_slack": num(self.feasibility_slack),
        }

    @classmethod
    def from_json(cls, obj):
        slack = obj.get("feasibility_slack")
        return cls(
            total_reward=float(obj["total_reward"]),
            benchmark_reward=float(obj["benchmark_reward"]),
            regret=float(obj["regret"]),
            max_queue={int(a): float(v) for a, v in obj.get("max_queue", {}).items()},
            achieved_rate={int(a): float(v) for a, v in obj.get("achieved_rate", {}).items()},
            rate_deficit={int(a): float(v) for a, v in obj.get("rate_deficit", {}).items()},
            feasible=bool(obj["feasible"]),
            feasibility_slack=float("-inf") if slack is None else float(slack),
        )

    def write_json(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def read_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))
