"""Euclidean geometry on the probability simplex.

The projection is the sort-then-threshold algorithm: O(N log N), fine for
the small N used here, and easy to certify via the threshold form
x_i = max(0, v_i - theta).
"""

import numpy as np

from .errors import NonFiniteInput
from .validation import as_vector


def project(v):
    """Euclidean projection of v onto the probability simplex.

    Returns argmin_{x in simplex} ||x - v||_2. Sorting is descending by
    value; equal values are interchangeable for the threshold, so the
    output does not depend on how ties are ordered.
    """
    v = as_vector(v, "projection input")
    n = v.shape[0]
    if n == 1:
        return np.ones(1)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, n + 1)
    support = u - css / ks > 0
    k = int(np.nonzero(support)[0][-1])  # largest k keeps the support maximal
    theta = css[k] / (k + 1)
    return np.maximum(v - theta, 0.0)


def distance_to_simplex(v):
    """l2 distance from v to the simplex; 0 iff v already lies on it."""
    v = as_vector(v, "distance input")
    return float(np.linalg.norm(v - project(v)))


def threshold_certificate(v, x, atol=1e-9):
    """Check the KKT form of a claimed projection: exists theta with
    x_i = max(0, v_i - theta). Returns (ok, theta)."""
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(v)) or not np.all(np.isfinite(x)):
        raise NonFiniteInput("certificate inputs must be finite")
    pos = x > atol
    if not np.any(pos):
        return False, float("nan")
    thetas = v[pos] - x[pos]
    theta = float(thetas.mean())
    if np.any(np.abs(thetas - theta) > atol):
        return False, theta
    # zero coordinates must sit at or below the threshold
    if np.any(v[~pos] - theta > atol):
        return False, theta
    return True, theta
