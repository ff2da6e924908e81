import numpy as np
import pytest

from banditq.errors import NonFiniteInput
from banditq.simplex import distance_to_simplex, project, threshold_certificate

from helpers import grid_project_enumerate, grid_project_greedy


def test_identity_on_simplex_points():
    assert np.allclose(project([0.2, 0.3, 0.5]), [0.2, 0.3, 0.5], atol=1e-12)


def test_symmetric_negative_input_gives_barycenter():
    assert np.allclose(project([-1.0, -1.0]), [0.5, 0.5], atol=0)


def test_threshold_examples():
    # theta = (1.4 - 1) / 2 = 0.2
    assert np.allclose(project([0.9, 0.5]), [0.7, 0.3], atol=1e-12)
    # theta = 1 with a single support coordinate
    assert np.allclose(project([2.0, 0.0]), [1.0, 0.0], atol=1e-12)


def test_single_arm_always_returns_one():
    assert project([17.3]) == pytest.approx([1.0], abs=0)
    assert project([-5.0]) == pytest.approx([1.0], abs=0)


def test_distance_examples():
    assert distance_to_simplex([0.2, 0.3, 0.5]) == pytest.approx(0.0, abs=1e-12)
    assert distance_to_simplex([2.0, 0.0]) == pytest.approx(1.0, abs=1e-12)
    assert distance_to_simplex([-1.0, -1.0]) == pytest.approx(1.5 * np.sqrt(2), abs=1e-12)


def test_non_finite_inputs_rejected():
    with pytest.raises(NonFiniteInput):
        project([np.nan, 0.5])
    with pytest.raises(NonFiniteInput):
        distance_to_simplex([np.inf, 0.0])


def test_idempotence():
    rng = np.random.default_rng(1)
    for _ in range(200):
        v = rng.uniform(-3, 3, size=rng.integers(1, 8))
        x = project(v)
        assert np.max(np.abs(project(x) - x)) <= 1e-12


def test_translation_invariance():
    rng = np.random.default_rng(2)
    for _ in range(200):
        v = rng.uniform(-3, 3, size=rng.integers(2, 8))
        c = rng.uniform(-10, 10)
        assert np.max(np.abs(project(v + c) - project(v))) <= 1e-9


def test_non_expansiveness():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n = rng.integers(2, 8)
        u, v = rng.uniform(-3, 3, size=n), rng.uniform(-3, 3, size=n)
        lhs = np.linalg.norm(project(u) - project(v))
        assert lhs <= np.linalg.norm(u - v) + 1e-12


def test_output_is_distribution_with_certificate():
    rng = np.random.default_rng(4)
    for _ in range(300):
        v = rng.uniform(-2, 2, size=rng.integers(1, 10))
        x = project(v)
        assert np.all(x >= 0)
        assert abs(x.sum() - 1) <= 1e-9
        ok, _ = threshold_certificate(v, x)
        assert ok


def test_greedy_grid_oracle_matches_enumeration():
    # validates the allocation oracle itself against literal search
    rng = np.random.default_rng(5)
    for n in (2, 3):
        for _ in range(20):
            v = rng.uniform(-2, 2, size=n)
            a = grid_project_enumerate(v, m=200)
            b = grid_project_greedy(v, m=200)
            assert np.max(np.abs(a - b)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_projection_matches_grid_oracle(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(40):
        v = rng.uniform(-2, 2, size=n)
        x = project(v)
        g = grid_project_greedy(v, m=1000)
        assert np.max(np.abs(x - g)) <= 2e-3
