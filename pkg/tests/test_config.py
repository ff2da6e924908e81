import json

import numpy as np
import pytest

from banditq.config import (
    ConstSqrtT,
    ExplicitV,
    InstanceConfig,
    ZeroV,
    config_errors,
    config_from_json,
    load_config,
    v_schedule_from_json,
    validate_config,
)
from banditq.errors import InvalidConfigError


def make(**kwargs):
    base = dict(n_arms=2, horizon=100, protected=(0,), target_rates={0: 0.3},
                v_schedule=ConstSqrtT(1.0), window=1, seed=1, policy="banditq")
    base.update(kwargs)
    return InstanceConfig(**base)


def test_valid_config_passes_through():
    cfg = make()
    assert validate_config(cfg) is cfg
    assert config_errors(cfg) == []


def test_rate_sum_exceeds_one():
    cfg = make(protected=(0, 1), target_rates={0: 0.6, 1: 0.6})
    errs = config_errors(cfg)
    assert any(e.startswith("RateSumExceedsOne") for e in errs)
    with pytest.raises(InvalidConfigError):
        validate_config(cfg)


def test_decreasing_explicit_schedule_rejected():
    cfg = make(horizon=3, v_schedule=ExplicitV((3.0, 2.0, 1.0)))
    errs = config_errors(cfg)
    assert any(e.startswith("BadVSchedule") for e in errs)


def test_rate_for_unprotected_arm_rejected():
    cfg = make(protected=(), target_rates={1: 0.2})
    errs = config_errors(cfg)
    assert any(e.startswith("EmptyProtectedWithRates") for e in errs)


def test_every_violation_is_reported_at_once():
    cfg = make(n_arms=0, horizon=0, window=0, policy="nope",
               protected=(3,), target_rates={3: 1.5})
    errs = config_errors(cfg)
    assert len(errs) >= 5


def test_explicit_schedule_length_must_match_horizon():
    cfg = make(horizon=4, v_schedule=ExplicitV((1.0, 2.0)))
    assert any("BadVSchedule" in e for e in config_errors(cfg))


def test_window_cannot_exceed_horizon():
    cfg = make(horizon=10, window=11)
    assert any(e.startswith("BadWindow") for e in config_errors(cfg))


def test_schedule_values():
    assert ConstSqrtT(2.0).value_at(5, horizon=16) == pytest.approx(8.0, abs=0)
    assert ZeroV().value_at(123, horizon=None) == 0.0
    sched = ExplicitV((1.0, 2.0, 4.0))
    assert [sched.value_at(t, 3) for t in (1, 2, 3)] == [1.0, 2.0, 4.0]


def test_fuzzed_accepted_configs_satisfy_invariants():
    rng = np.random.default_rng(0)
    accepted = 0
    for _ in range(500):
        n = int(rng.integers(1, 6))
        n_prot = int(rng.integers(0, n + 1))
        protected = tuple(sorted(rng.choice(n + 1, size=n_prot, replace=False).tolist()))
        rates = {a: float(np.round(rng.uniform(-0.2, 0.9), 3)) for a in protected}
        kind = rng.choice(["const_sqrt_t", "zero", "explicit"])
        horizon = int(rng.integers(1, 20))
        if kind == "const_sqrt_t":
            sched = ConstSqrtT(float(rng.uniform(-1, 2)))
        elif kind == "zero":
            sched = ZeroV()
        else:
            vals = rng.uniform(-0.5, 2, size=int(rng.integers(0, horizon + 2)))
            if rng.random() < 0.5:
                vals = np.sort(vals)
            sched = ExplicitV(tuple(vals.tolist()))
        cfg = InstanceConfig(n_arms=n, horizon=horizon, protected=protected,
                             target_rates=rates, v_schedule=sched,
                             window=int(rng.integers(0, 4)), seed=int(rng.integers(0, 100)),
                             policy=str(rng.choice(["banditq", "hedge", "greedy"])))
        errs = config_errors(cfg)
        if errs:
            continue
        accepted += 1
        assert cfg.n_arms >= 1 and cfg.horizon >= 1 and cfg.window >= 1
        assert set(cfg.protected) <= set(range(cfg.n_arms))
        assert set(cfg.target_rates) == set(cfg.protected)
        assert all(0 < r <= 1 for r in cfg.target_rates.values())
        assert sum(cfg.target_rates.values()) <= 1 + 1e-12
        assert cfg.policy in ("banditq", "hedge")
    assert accepted > 5  # the fuzz actually exercises the accept path


def test_json_round_trip(tmp_path):
    cfg = make(v_schedule=ExplicitV((0.5, 0.5, 2.0)), horizon=3,
               protected=(0, 1), target_rates={0: 0.25, 1: 0.5})
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_json()))
    loaded = load_config(path)
    assert loaded == cfg


def test_rate_vector_zero_off_protected():
    cfg = make(n_arms=4, protected=(2,), target_rates={2: 0.4})
    lam = cfg.rate_vector()
    assert lam.tolist() == [0.0, 0.0, 0.4, 0.0]


def test_unknown_schedule_type_rejected():
    with pytest.raises(InvalidConfigError):
        v_schedule_from_json({"type": "warmup"})


def test_policy_name_canonicalised():
    cfg = config_from_json({"n_arms": 2, "horizon": 5, "policy": "Hedge"})
    assert cfg.policy == "hedge"
