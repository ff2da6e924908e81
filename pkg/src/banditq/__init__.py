"""Fair online prediction over the probability simplex with per-arm rate
guarantees, plus the adversarial environments, exact offline benchmark, and
audit tooling used to verify its behaviour."""

from .config import (
    ConstSqrtT,
    ExplicitV,
    InstanceConfig,
    ZeroV,
    config_errors,
    config_from_json,
    load_config,
    validate_config,
)
from .env import (
    IIDUniform,
    Periodic,
    Replay,
    RewardSource,
    Starvation,
    empirical_floor,
    episode_rng,
    read_rewards_csv,
    source_from_json,
    write_rewards_csv,
)
from .oracle import (
    BenchmarkResult,
    FeasibilityReport,
    ScalingFit,
    adaptive_bound_check,
    benchmark_lp,
    drift_audit,
    feasibility_check,
    rate_audit,
    regret,
    scaling_fit,
)
from .policies import BanditQ, Hedge, hedge_step, make_policy, oga_step, run_episode, surrogate_rewards
from .queueing import QueueState, drift_check, lindley_expanded, lindley_step, potential
from .records import RunSummary, Trace, TraceRecord
from .simplex import distance_to_simplex, project, threshold_certificate

__all__ = [
    "BanditQ",
    "BenchmarkResult",
    "ConstSqrtT",
    "ExplicitV",
    "FeasibilityReport",
    "Hedge",
    "IIDUniform",
    "InstanceConfig",
    "Periodic",
    "QueueState",
    "Replay",
    "RewardSource",
    "RunSummary",
    "ScalingFit",
    "Starvation",
    "Trace",
    "TraceRecord",
    "ZeroV",
    "adaptive_bound_check",
    "benchmark_lp",
    "config_errors",
    "config_from_json",
    "distance_to_simplex",
    "drift_audit",
    "drift_check",
    "empirical_floor",
    "episode_rng",
    "feasibility_check",
    "hedge_step",
    "lindley_expanded",
    "lindley_step",
    "load_config",
    "make_policy",
    "oga_step",
    "potential",
    "project",
    "rate_audit",
    "read_rewards_csv",
    "regret",
    "run_episode",
    "scaling_fit",
    "source_from_json",
    "surrogate_rewards",
    "threshold_certificate",
    "validate_config",
    "write_rewards_csv",
]

__version__ = "0.1.0"
