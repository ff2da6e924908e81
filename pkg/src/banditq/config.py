"""Experiment configuration: instance description, validation, JSON schema.

The JSON config schema (also documented in the README):

    {
      "n_arms": 2,
      "horizon": 16384,
      "protected": [0],
      "target_rates": {"0": 0.25},
      "v_schedule": {"type": "const_sqrt_t", "c": 1.0},
      "window": 1,
      "seed": 42,
      "policy": "banditq"
    }

``v_schedule`` is one of ``{"type": "const_sqrt_t", "c": <float>}``,
``{"type": "zero"}`` or ``{"type": "explicit", "values": [...]}``.
Arm indices are 0-based everywhere in JSON; CSV column headers are 1-based.
"""

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidConfigError

POLICIES = ("banditq", "hedge")

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class ConstSqrtT:
    """Constant weight schedule V_t = c * sqrt(T)."""

    c: float = 1.0

    def value_at(self, t, horizon):
        if horizon is None:
            raise ValueError("const_sqrt_t schedule needs a horizon")
        return self.c * math.sqrt(horizon)

    def violations(self, horizon=None):
        if not (math.isfinite(self.c) and self.c >= 0):
            return [f"BadVSchedule: const_sqrt_t scale c={self.c} must be finite and >= 0"]
        return []

    def to_json(self):
        return {"type": "const_sqrt_t", "c": self.c}


@dataclass(frozen=True)
class ZeroV:
    """V_t = 0 for all rounds: pure rate satisfaction, no reward seeking."""

    def value_at(self, t, horizon):
        return 0.0

    def violations(self, horizon=None):
        return []

    def to_json(self):
        return {"type": "zero"}


@dataclass(frozen=True)
class ExplicitV:
    """One weight per round, given explicitly (for ablations)."""

    values: tuple = ()

    def value_at(self, t, horizon):
        if not 1 <= t <= len(self.values):
            raise ValueError(f"explicit schedule has {len(self.values)} values, round {t} requested")
        return self.values[t - 1]

    def violations(self, horizon=None):
        out = []
        vals = np.asarray(self.values, dtype=float)
        if vals.size == 0:
            out.append("BadVSchedule: explicit schedule has no values")
            return out
        if not np.all(np.isfinite(vals)):
            out.append("BadVSchedule: explicit schedule has non-finite values")
        elif np.any(vals < 0):
            out.append("BadVSchedule: explicit schedule has negative values")
        elif np.any(np.diff(vals) < 0):
            out.append("BadVSchedule: explicit schedule must be non-decreasing")
        if horizon is not None and vals.size != horizon:
            out.append(
                f"BadVSchedule: explicit schedule has {vals.size} values, horizon is {horizon}"
            )
        return out

    def to_json(self):
        return {"type": "explicit", "values": list(self.values)}


def v_schedule_from_json(obj):
    kind = obj.get("type")
    if kind == "const_sqrt_t":
        return ConstSqrtT(c=float(obj.get("c", 1.0)))
    if kind == "zero":
        return ZeroV()
    if kind == "explicit":
        return ExplicitV(values=tuple(float(v) for v in obj["values"]))
    raise InvalidConfigError([f"BadVSchedule: unknown schedule type {kind!r}"])


@dataclass(frozen=True)
class InstanceConfig:
    """Full description of one experiment instance."""

    n_arms: int
    horizon: int
    protected: tuple = ()
    target_rates: dict = field(default_factory=dict)
    v_schedule: object = field(default_factory=ConstSqrtT)
    window: int = 1
    seed: int = 0
    policy: str = "banditq"

    def rate_vector(self):
        """Target rates as a length-N vector, zero for unprotected arms."""
        lam = np.zeros(self.n_arms)
        for arm, rate in self.target_rates.items():
            lam[arm] = rate
        return lam

    def protected_set(self):
        return frozenset(self.protected)

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)

    def to_json(self):
        return {
            "n_arms": self.n_arms,
            "horizon": self.horizon,
            "protected": sorted(self.protected),
            "target_rates": {str(a): r for a, r in sorted(self.target_rates.items())},
            "v_schedule": self.v_schedule.to_json(),
            "window": self.window,
            "seed": self.seed,
            "policy": self.policy,
        }


def config_from_json(obj):
    """Build an InstanceConfig from a parsed JSON object (unvalidated)."""
    return InstanceConfig(
        n_arms=int(obj["n_arms"]),
        horizon=int(obj["horizon"]),
        protected=tuple(sorted(int(a) for a in obj.get("protected", []))),
        target_rates={int(a): float(r) for a, r in obj.get("target_rates", {}).items()},
        v_schedule=v_schedule_from_json(obj.get("v_schedule", {"type": "const_sqrt_t", "c": 1.0})),
        window=int(obj.get("window", 1)),
        seed=int(obj.get("seed", 0)),
        policy=str(obj.get("policy", "banditq")).lower(),
    )


def config_errors(cfg):
    """Every invariant violation in cfg, as human-readable strings.

    Empty list means the config is valid.
    """
    out = []
    if cfg.n_arms < 1:
        out.append(f"BadArmCount: n_arms={cfg.n_arms} must be >= 1")
    if cfg.horizon < 1:
        out.append(f"BadHorizon: horizon={cfg.horizon} must be >= 1")
    if cfg.window < 1:
        out.append(f"BadWindow: window={cfg.window} must be >= 1")
    elif cfg.horizon >= 1 and cfg.window > cfg.horizon:
        out.append(f"BadWindow: window={cfg.window} exceeds horizon {cfg.horizon}")
    if not 0 <= cfg.seed <= MAX_SEED:
        out.append(f"BadSeed: seed={cfg.seed} must fit in 64 unsigned bits")
    if cfg.policy not in POLICIES:
        out.append(f"BadPolicy: policy={cfg.policy!r} not one of {POLICIES}")

    prot = set(cfg.protected)
    if len(prot) != len(cfg.protected):
        out.append("DuplicateProtectedArm: protected set has repeated indices")
    bad = [a for a in prot if not 0 <= a < cfg.n_arms]
    if bad:
        out.append(f"ProtectedOutOfRange: arms {sorted(bad)} not in [0, {cfg.n_arms - 1}]")

    orphan = [a for a in cfg.target_rates if a not in prot]
    if orphan:
        out.append(
            f"EmptyProtectedWithRates: target rate given for non-protected arms {sorted(orphan)}"
        )
    missing = [a for a in prot if a not in cfg.target_rates]
    if missing:
        out.append(f"MissingTargetRate: protected arms {sorted(missing)} have no target rate")

    for arm, rate in sorted(cfg.target_rates.items()):
        if not (math.isfinite(rate) and 0 < rate <= 1):
            out.append(f"BadTargetRate: arm {arm} rate {rate} not in (0, 1]")
    total = sum(cfg.target_rates.values())
    if total > 1 + 1e-12:
        out.append(f"RateSumExceedsOne: target rates sum to {total:.6g} > 1")

    out.extend(cfg.v_schedule.violations(horizon=cfg.horizon))
    return out


def validate_config(cfg):
    """Return cfg unchanged if valid, else raise InvalidConfigError listing
    every violated invariant."""
    errs = config_errors(cfg)
    if errs:
        raise InvalidConfigError(errs)
    return cfg


def load_config(path):
    """Read, parse and validate a config JSON file."""
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    return validate_config(config_from_json(obj))
