"""Post-hoc ground truth: feasibility, the exact offline benchmark, regret,
rate audits, and scaling-exponent fits.

Everything here operates on immutable traces or plain arrays; nothing feeds
back into the policies.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadInterval,
    EmptyBenchmarkSet,
    LengthMismatch,
    NonPositiveValue,
    TooFewPoints,
)

AUDIT_CSV_HEADER = "arm,interval_start,interval_end,achieved,target,certified_bound,pass"


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the rate-feasibility conditions against reward floors."""

    feasible: bool
    sum_ratio: float
    per_arm_ok: dict
    diagnostics: tuple = ()


def feasibility_check(target_rates, floors):
    """Check that the targets are jointly servable given per-arm floors.

    Feasible iff the ratios target/floor sum to at most 1 and every target
    lies at or below its arm's floor. A zero floor with a positive target is
    reported as infeasible (infinite ratio) rather than raised.
    """
    floors = np.asarray(floors, dtype=float)
    per_arm_ok = {}
    diagnostics = []
    total = 0.0
    for arm, rate in sorted(target_rates.items()):
        floor = float(floors[arm])
        if floor <= 0.0:
            per_arm_ok[arm] = False
            diagnostics.append(f"arm {arm}: zero reward floor with positive target rate {rate:.6g}")
            total = math.inf
            continue
        per_arm_ok[arm] = rate <= floor + 1e-12
        total += rate / floor
    feasible = total <= 1 + 1e-12 and all(per_arm_ok.values())
    return FeasibilityReport(feasible=feasible, sum_ratio=total,
                             per_arm_ok=per_arm_ok, diagnostics=tuple(diagnostics))


@dataclass(frozen=True)
class BenchmarkResult:
    """Best fixed allocation in hindsight under the rate lower bounds."""

    x_star: np.ndarray
    value: float
    lower_bounds: np.ndarray
    slack: float


def benchmark_lp(cumulative_rewards, lower_bounds):
    """Maximise <x, R> over the simplex subject to x_i >= l_i.

    Closed form: meet every lower bound, then pour the remaining mass onto
    the arm with the largest cumulative reward (ties to the lowest index).
    """
    rewards = np.asarray(cumulative_rewards, dtype=float)
    bounds = np.asarray(lower_bounds, dtype=float)
    if rewards.shape != bounds.shape:
        raise LengthMismatch("cumulative rewards and lower bounds disagree in length")
    total = float(bounds.sum())
    if total > 1 + 1e-12:
        raise EmptyBenchmarkSet(f"lower bounds sum to {total:.6g} > 1; no feasible allocation")
    x_star = bounds.copy()
    x_star[int(np.argmax(rewards))] += 1.0 - total
    return BenchmarkResult(x_star=x_star, value=float(x_star @ rewards),
                           lower_bounds=bounds.copy(), slack=1.0 - total)


def regret(trace, benchmark):
    """Benchmark value minus the policy's realised cumulative reward."""
    if trace.n_arms != benchmark.x_star.shape[0]:
        raise LengthMismatch(
            f"trace has {trace.n_arms} arms, benchmark has {benchmark.x_star.shape[0]}"
        )
    total = float(np.einsum("ti,ti->", trace.r, trace.x))
    return benchmark.value - total


@dataclass(frozen=True)
class RateAuditRow:
    arm: int
    start: int
    end: int
    achieved: float
    target: float
    certified_bound: float
    passed: bool

    def csv_row(self):
        from .records import fmt

        return (f"{self.arm + 1},{self.start},{self.end},{fmt(self.achieved)},"
                f"{fmt(self.target)},{fmt(self.certified_bound)},{str(self.passed).lower()}")


def rate_audit(trace, target_rates, intervals):
    """Per-arm, per-interval achieved rates with the certified lower bound.

    For an interval of length tau ending at round b the queue recursion
    guarantees achieved >= target - Q(b)/tau; a failure therefore indicates
    an implementation bug, not an unlucky run.
    """
    horizon = trace.horizon
    for a, b in intervals:
        if not (1 <= a <= b <= horizon):
            raise BadInterval(f"interval [{a}, {b}] not inside [1, {horizon}]")
    prefix = np.vstack([np.zeros((1, trace.n_arms)), np.cumsum(trace.served, axis=0)])
    rows = []
    for a, b in intervals:
        tau = b - a + 1
        for arm, target in sorted(target_rates.items()):
            achieved = float(prefix[b, arm] - prefix[a - 1, arm]) / tau
            bound = target - float(trace.q_after[b - 1, arm]) / tau
            rows.append(RateAuditRow(arm=arm, start=a, end=b, achieved=achieved,
                                     target=target, certified_bound=bound,
                                     passed=achieved >= bound - 1e-9))
    return rows


def write_audit_csv(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(AUDIT_CSV_HEADER + "\n")
        for row in rows:
            fh.write(row.csv_row() + "\n")


def default_audit_intervals(horizon):
    """Prefixes at the quartiles plus the two halves."""
    marks = sorted({max(1, horizon * k // 4) for k in (1, 2, 3, 4)})
    intervals = [(1, m) for m in marks]
    if horizon >= 2:
        mid = horizon // 2
        intervals.append((mid + 1, horizon))
    return intervals


@dataclass(frozen=True)
class DriftAudit:
    """Vectorised re-check of the per-round potential-drift inequality."""

    lhs: np.ndarray
    rhs: np.ndarray
    ok: bool

    @property
    def worst_margin(self):
        return float(np.min(self.rhs - self.lhs))


def drift_audit(trace, target_rates, protected, atol=1e-9):
    """Re-derive both sides of the drift inequality for every round."""
    idx = np.array(sorted(protected), dtype=int)
    lam = np.zeros(trace.n_arms)
    for arm, rate in target_rates.items():
        lam[arm] = rate
    phi = trace.potential
    lhs = np.empty(trace.horizon)
    lhs[0] = phi[0]
    lhs[1:] = phi[1:] - phi[:-1]
    if idx.size:
        qb = trace.q_before[:, idx]
        coupling = np.sum(qb * (lam[idx] - trace.r[:, idx] * trace.x[:, idx]), axis=1)
    else:
        coupling = np.zeros(trace.horizon)
    rhs = 2.0 + 2.0 * coupling
    return DriftAudit(lhs=lhs, rhs=rhs, ok=bool(np.all(lhs <= rhs + atol)))


@dataclass(frozen=True)
class AdaptiveBoundRow:
    t: int
    vertex_regret: float
    bound: float
    ok: bool


def adaptive_bound_check(trace, checkpoints=None, atol=1e-9):
    """Certify the learner's adaptive guarantee on the surrogate problem.

    At each checkpoint t, the best single arm's cumulative surrogate reward
    may exceed the policy's by at most 2 * sqrt(sum of squared surrogate
    norms up to t). The single-arm comparator dominates every distribution,
    so this is the strongest form of the guarantee.
    """
    if checkpoints is None:
        horizon = trace.horizon
        checkpoints = sorted({max(1, horizon // 4), max(1, horizon // 2), horizon})
    cum_by_arm = np.cumsum(trace.r_prime, axis=0)
    cum_policy = np.cumsum(np.einsum("ti,ti->t", trace.r_prime, trace.x))
    cum_sq = np.cumsum(np.einsum("ti,ti->t", trace.r_prime, trace.r_prime))
    rows = []
    for t in checkpoints:
        if not 1 <= t <= trace.horizon:
            raise BadInterval(f"checkpoint {t} not inside [1, {trace.horizon}]")
        vertex = float(cum_by_arm[t - 1].max() - cum_policy[t - 1])
        bound = 2.0 * math.sqrt(float(cum_sq[t - 1]))
        rows.append(AdaptiveBoundRow(t=t, vertex_regret=vertex, bound=bound,
                                     ok=vertex <= bound + atol))
    return rows


@dataclass(frozen=True)
class ScalingFit:
    exponent: float
    r2: float


def scaling_fit(points):
    """Least-squares slope of log(value) against log(horizon).

    The intercept absorbs constant factors, so (T, c*T^p) recovers p for
    any c > 0.
    """
    pts = [(float(t), float(v)) for t, v in points]
    if len({t for t, _ in pts}) < 3:
        raise TooFewPoints(f"need at least 3 distinct horizons, got {len(pts)} points")
    for t, v in pts:
        if v <= 0 or t <= 0:
            raise NonPositiveValue(f"cannot fit log-log through (T={t:g}, value={v:g})")
    xs = np.log([t for t, _ in pts])
    ys = np.log([v for _, v in pts])
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    slope = float(np.sum(dx * dy) / np.sum(dx * dx))
    residuals = dy - slope * dx
    ss_tot = float(np.sum(dy * dy))
    ss_res = float(np.sum(residuals * residuals))
    r2 = 1.0 if ss_tot <= 0 else 1.0 - ss_res / ss_tot
    return ScalingFit(exponent=slope, r2=r2)
