"""Named ready-to-run experiment and sweep descriptions.

Each preset is a plain JSON-shaped dict, exactly what the corresponding
``--config`` file would contain, so ``--preset NAME`` and a saved copy of
the preset behave identically.
"""

import copy

_IID_N3 = {
    "n_arms": 3,
    "horizon": 16384,
    "protected": [0],
    "target_rates": {"0": 0.3},
    "v_schedule": {"type": "const_sqrt_t", "c": 1.0},
    "window": 1,
    "seed": 7,
    "policy": "banditq",
    # protected arm pays noticeably less than the rivals, so greedy play
    # starves it and the queues have real work to do
    "source": {"type": "iid_uniform", "lo": [0.5, 0.5, 0.5], "hi": [0.7, 1.0, 1.0]},
}

_STARVATION_N2 = {
    "n_arms": 2,
    "horizon": 16384,
    "protected": [0],
    "target_rates": {"0": 0.25},
    "v_schedule": {"type": "const_sqrt_t", "c": 1.0},
    "window": 1,
    "seed": 7,
    "policy": "banditq",
    "source": {"type": "starvation", "protected_reward": 0.4, "rival_reward": 0.9},
}

PRESETS = {
    "starvation-n2": _STARVATION_N2,
    "starvation-n2-hedge": {**_STARVATION_N2, "policy": "hedge"},
    "iid-n3": _IID_N3,
    "iid-n3-v0": {**_IID_N3, "v_schedule": {"type": "zero"}},
    # deliberately unservable target: 0.6 / 0.4 > 1
    "infeasible-n2": {**_STARVATION_N2, "target_rates": {"0": 0.6}},
}

SWEEP_PRESETS = {
    "scaling-sweep": {
        "horizons": [4096, 16384, 65536],
        "repetitions": 5,
        "policies": ["banditq"],
        "metric": "max_queue",
        "base_config": _IID_N3,
    },
    "scaling-sweep-v0": {
        "horizons": [4096, 16384, 65536],
        "repetitions": 5,
        "policies": ["banditq"],
        "metric": "max_queue",
        "base_config": {**_IID_N3, "v_schedule": {"type": "zero"}},
    },
}


def get_preset(name):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return copy.deepcopy(PRESETS[name])


def get_sweep_preset(name):
    if name not in SWEEP_PRESETS:
        raise KeyError(
            f"unknown sweep preset {name!r}; available: {', '.join(sorted(SWEEP_PRESETS))}"
        )
    return copy.deepcopy(SWEEP_PRESETS[name])
