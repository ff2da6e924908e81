"""Input validation helpers.

Small converters used at public entry points: they normalise array-likes to
float64 vectors and enforce the ranges the algorithms assume. Internal hot
loops skip them and rely on the entry-point checks.
"""

import numpy as np

from .errors import NonFiniteInput, OutOfRangeInput

# Slack for floating-point dust on values that are exact in theory
# (e.g. served = r * x with r <= 1, x <= 1 can round to 1 + 1e-16).
RANGE_ATOL = 1e-9


def as_vector(values, name="input"):
    """Coerce to a 1-D float64 array, rejecting non-finite entries."""
    v = np.asarray(values, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise OutOfRangeInput(f"{name} must be 1-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput(f"{name} contains non-finite values")
    return v


def as_unit_range_vector(values, name="input", lo=0.0, hi=1.0):
    """Coerce to a 1-D float64 array with every entry in [lo, hi]."""
    v = as_vector(values, name)
    if np.any(v < lo - RANGE_ATOL) or np.any(v > hi + RANGE_ATOL):
        raise OutOfRangeInput(
            f"{name} has entries outside [{lo}, {hi}]: "
            f"min={v.min():.6g}, max={v.max():.6g}"
        )
    return v


def as_rewards(values, n_arms=None, name="rewards"):
    """Validate a per-round reward vector: finite, in [0, 1], right length."""
    r = as_unit_range_vector(values, name)
    if n_arms is not None and r.shape[0] != n_arms:
        raise OutOfRangeInput(f"{name} has length {r.shape[0]}, expected {n_arms}")
    return r


def is_distribution(x, atol=1e-9):
    """True iff x is entrywise >= -atol and sums to 1 within atol."""
    x = np.asarray(x, dtype=float)
    return bool(np.all(x >= -atol) and abs(float(x.sum()) - 1.0) <= atol)
