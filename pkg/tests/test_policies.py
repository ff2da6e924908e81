import numpy as np
import pytest
from sklearn.base import clone

from banditq.config import ConstSqrtT, InstanceConfig, ZeroV, validate_config
from banditq.env import IIDUniform, Starvation, episode_rng
from banditq.errors import LengthMismatch, NegativeInput, SourceExhausted
from banditq.policies import (
    BanditQ,
    Hedge,
    hedge_step,
    make_policy,
    oga_step,
    run_episode,
    surrogate_rewards,
)
from banditq.validation import is_distribution

from helpers import grid_project_greedy, run_random_episode


# ---------------------------------------------------------------- surrogate

def test_surrogate_zero_multiplier():
    r_prime = surrogate_rewards(np.zeros(3), 0.0, [0.2, 0.9, 1.0])
    assert r_prime.tolist() == [0.0, 0.0, 0.0]


def test_surrogate_worked_example():
    r_prime = surrogate_rewards([2.0, 0.0], 3.0, [0.5, 1.0])
    assert r_prime[0] == pytest.approx(2.5, abs=0)
    # unprotected arm: the schedule weight alone drives reward seeking
    assert r_prime[1] == pytest.approx(3.0, abs=0)


def test_surrogate_uses_pre_round_queues_and_bounds():
    rng = np.random.default_rng(0)
    for _ in range(100):
        q = rng.uniform(0, 5, size=4)
        v = rng.uniform(0, 3)
        r = rng.uniform(0, 1, size=4)
        rp = surrogate_rewards(q, v, r)
        assert np.all(rp >= 0)
        assert np.all(rp <= q + v + 1e-12)


def test_surrogate_rejects_negative_inputs():
    with pytest.raises(NegativeInput):
        surrogate_rewards([-0.1], 1.0, [0.5])
    with pytest.raises(NegativeInput):
        surrogate_rewards([0.1], -1.0, [0.5])


# ---------------------------------------------------------------- oga step

def test_oga_constant_direction_is_noop():
    x = np.array([0.25, 0.25, 0.25, 0.25])
    x2, g = oga_step(x, 1.0, np.full(4, 0.7))
    assert np.max(np.abs(x2 - x)) <= 1e-12  # translation invariance
    assert g == pytest.approx(1.0 + 4 * 0.49, abs=1e-12)


def test_oga_worked_example():
    x2, g = oga_step(np.array([0.5, 0.5]), 1.0, np.array([1.0, 0.0]))
    assert x2[0] == pytest.approx(0.8535533905932737, abs=1e-12)
    assert x2[1] == pytest.approx(0.14644660940672627, abs=1e-12)
    assert g == 2.0
    oracle = grid_project_greedy(np.array([0.5 + 1 / np.sqrt(2), 0.5]))
    assert np.max(np.abs(x2 - oracle)) <= 2e-3


def test_oga_zero_gradient_freezes_state():
    x = np.array([0.3, 0.7])
    x2, g = oga_step(x, 0.0, np.zeros(2))
    assert x2 is x and g == 0.0


def test_oga_first_round_self_confident_step():
    # empty accumulator: the current gradient norm substitutes
    x = np.array([0.5, 0.5])
    rp = np.array([0.8, 0.2])
    x2, g = oga_step(x, 0.0, rp)
    expected, _ = oga_step(x, float(rp @ rp), rp)
    assert np.array_equal(x2, expected)
    assert g == pytest.approx(float(rp @ rp), abs=0)


def test_oga_first_step_scale_equivariant_ordering():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        x = np.full(n, 1.0 / n)
        rp = rng.uniform(0, 2, size=n)
        a, _ = oga_step(x, 0.0, rp)
        b, _ = oga_step(x, 0.0, 3.7 * rp)
        assert np.array_equal(np.argsort(a, kind="stable"), np.argsort(b, kind="stable"))


def test_oga_accumulator_never_decreases():
    rng = np.random.default_rng(2)
    x, g = np.full(3, 1 / 3), 0.0
    for _ in range(200):
        rp = rng.uniform(0, 2, size=3) * (rng.random() > 0.1)
        x, g_new = oga_step(x, g, rp)
        assert g_new >= g
        assert is_distribution(x)
        g = g_new


# ---------------------------------------------------------------- hedge step

def test_hedge_worked_example():
    lw, x = hedge_step(np.zeros(2), 0.5, np.array([1.0, 0.0]))
    assert x[0] == pytest.approx(0.6224593312018546, abs=1e-12)
    assert x[1] == pytest.approx(0.37754066879814546, abs=1e-12)


def test_hedge_uniform_reward_keeps_distribution():
    lw = np.array([0.3, -0.1, 0.8])
    _, x_before = hedge_step(lw, 0.5, np.zeros(3))
    _, x_after = hedge_step(lw, 0.5, np.full(3, 0.6))
    assert np.max(np.abs(x_after - x_before)) <= 1e-12


def test_hedge_zero_eta_limit_stays_uniform():
    _, x = hedge_step(np.zeros(4), 1e-12, np.array([1.0, 0.0, 0.5, 0.2]))
    assert np.max(np.abs(x - 0.25)) <= 1e-9


# ---------------------------------------------------------------- estimators

def test_estimator_params_round_trip():
    est = BanditQ(n_arms=3, protected=(0,), target_rates={0: 0.3},
                  v_schedule=ConstSqrtT(2.0), horizon=64)
    cloned = clone(est)
    assert cloned.get_params() == est.get_params()
    est.set_params(horizon=128)
    assert est.horizon == 128


def test_fit_defaults_horizon_to_matrix_length():
    rng = np.random.default_rng(3)
    rewards = rng.uniform(0, 1, size=(32, 2))
    est = BanditQ(n_arms=2, protected=(0,), target_rates={0: 0.2}).fit(rewards)
    assert est.t_ == 32 and est.horizon_ == 32
    assert is_distribution(est.predict_proba())


def test_partial_fit_needs_horizon_for_sqrt_schedule():
    est = BanditQ(n_arms=2, protected=(0,), target_rates={0: 0.2})
    with pytest.raises(ValueError):
        est.partial_fit([0.5, 0.5])


def test_hedge_default_eta_from_horizon():
    est = Hedge(n_arms=4, horizon=100).fit(np.zeros((1, 4)))
    assert est.eta_ == pytest.approx(np.sqrt(8 * np.log(4) / 100), abs=1e-15)


def test_single_arm_policies_run():
    rewards = np.full((10, 1), 0.5)
    for est in (Hedge(n_arms=1, horizon=10), BanditQ(n_arms=1, horizon=10)):
        est.fit(rewards)
        assert est.predict_proba().tolist() == [1.0]


def test_fit_rejects_wrong_width():
    with pytest.raises(LengthMismatch):
        BanditQ(n_arms=3).fit(np.zeros((4, 2)))


def test_hedge_ignores_queues_banditq_uses_them():
    rewards = np.tile([0.4, 0.9], (200, 1))
    kw = dict(n_arms=2, protected=(0,), target_rates={0: 0.25}, horizon=200)
    hedge = Hedge(**kw).fit(rewards)
    bq = BanditQ(**kw).fit(rewards)
    assert hedge.x_[0] < 0.2  # greedy concentrates on the rival arm
    assert bq.x_[0] > hedge.x_[0]
    assert np.all(hedge.queues_ >= 0) and hedge.queues_[0] > bq.queues_[0]


# ---------------------------------------------------------------- episodes

def _config(**kwargs):
    base = dict(n_arms=2, horizon=16, protected=(0,), target_rates={0: 0.25},
                v_schedule=ConstSqrtT(1.0), window=1, seed=5, policy="banditq")
    base.update(kwargs)
    return validate_config(InstanceConfig(**base))


def test_single_round_episode():
    trace, summary = run_episode(_config(horizon=1), Starvation(0.4, 0.9))
    assert len(trace) == 1
    rec = trace[0]
    assert np.array_equal(rec.x, [0.5, 0.5])
    assert np.array_equal(rec.q_before, [0.0, 0.0])
    assert np.isfinite(summary.regret)


def test_zero_schedule_unconstrained_stays_uniform():
    cfg = _config(n_arms=3, protected=(), target_rates={}, v_schedule=ZeroV(),
                  horizon=25)
    trace, _ = run_episode(cfg, IIDUniform(np.zeros(3), np.ones(3)))
    assert np.all(trace.r_prime == 0.0)
    assert np.all(trace.x == 1 / 3)  # exact: the no-movement rule never projects


def test_fixed_seed_reproduces_trace_exactly():
    cfg = _config(horizon=200, n_arms=2)
    src = IIDUniform([0.3, 0.0], [0.9, 1.0])
    t1, s1 = run_episode(cfg, src)
    t2, s2 = run_episode(cfg, src)
    for a, b in ((t1.r, t2.r), (t1.x, t2.x), (t1.r_prime, t2.r_prime),
                 (t1.q_after, t2.q_after), (t1.served, t2.served)):
        assert np.array_equal(a, b)
    assert s1 == s2


def test_distinct_episode_indices_give_distinct_streams():
    cfg = _config(horizon=50)
    src = IIDUniform([0.0, 0.0], [1.0, 1.0])
    t1, _ = run_episode(cfg, src, episode_index=0)
    t2, _ = run_episode(cfg, src, episode_index=1)
    assert not np.array_equal(t1.r, t2.r)


def test_source_shorter_than_horizon_raises():
    class TwoRounds(Starvation):
        def rewards(self, t, rng):
            if t > 2:
                raise SourceExhausted("only two rounds available")
            return super().rewards(t, rng)

    with pytest.raises(SourceExhausted):
        run_episode(_config(horizon=3), TwoRounds(0.4, 0.9))


def test_order_of_operations_surrogate_uses_pre_round_queue():
    cfg = _config(horizon=40)
    trace, _ = run_episode(cfg, Starvation(0.4, 0.9))
    v = cfg.v_schedule.value_at(1, cfg.horizon)
    expected = (trace.q_before + v) * trace.r
    assert np.max(np.abs(trace.r_prime - expected)) <= 1e-12


def test_episode_invariants_on_random_instances():
    rng = np.random.default_rng(12)
    for _ in range(8):
        cfg, trace, summary = run_random_episode(rng, horizon=128)
        lam = cfg.rate_vector()
        # distribution each round
        for t in range(trace.horizon):
            assert is_distribution(trace.x[t])
        # served accounting is exact
        assert np.array_equal(trace.served, trace.r * trace.x)
        # surrogate bound 0 <= r' <= q + V
        v_ts = np.array([cfg.v_schedule.value_at(t + 1, cfg.horizon)
                         for t in range(trace.horizon)])
        assert np.all(trace.r_prime >= 0)
        assert np.all(trace.r_prime <= trace.q_before + v_ts[:, None] + 1e-12)
        # summary invariants
        assert summary.regret == pytest.approx(
            summary.benchmark_reward - summary.total_reward, abs=1e-9)
        for arm, rate in cfg.target_rates.items():
            bound = rate - trace.q_after[-1, arm] / trace.horizon
            assert summary.achieved_rate[arm] >= bound - 1e-9


def test_make_policy_dispatch():
    assert isinstance(make_policy(_config(policy="hedge")), Hedge)
    assert isinstance(make_policy(_config()), BanditQ)


def test_summary_only_mode_matches_traced_run():
    cfg = _config(horizon=300)
    src = IIDUniform([0.3, 0.1], [0.8, 1.0])
    trace, s_full = run_episode(cfg, src, record_trace=True)
    none_trace, s_lean = run_episode(cfg, src, record_trace=False)
    assert none_trace is None
    assert s_full == s_lean
    assert trace is not None
