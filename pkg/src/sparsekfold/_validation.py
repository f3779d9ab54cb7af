"""Input validation shared by the functional API and the estimators."""
import numbers

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import IngestionError


def check_point_cloud(X, *, min_points=1):
    """Return ``X`` as a C-contiguous float array of shape (n, d).

    Raises :class:`IngestionError` for non-finite values, fewer than
    ``min_points`` rows, or repeated points.
    """
    try:
        X = check_array(
            X, dtype=np.float64, ensure_2d=True, ensure_min_samples=1, order="C"
        )
    except ValueError as exc:
        raise IngestionError(str(exc)) from exc
    if X.shape[0] < min_points:
        raise IngestionError(
            f"need at least {min_points} points, got {X.shape[0]}"
        )
    dup = first_duplicate(X)
    if dup is not None:
        raise IngestionError(f"point {dup[1]} duplicates point {dup[0]}")
    return X


def first_duplicate(X):
    """Return ``(i, j)`` with ``i < j`` and ``X[i] == X[j]``, or None."""
    seen = {}
    for j, row in enumerate(map(tuple, np.asarray(X).tolist())):
        if row in seen:
            return seen[row], j
        seen[row] = j
    return None


def check_k(k, n=None):
    if not isinstance(k, numbers.Integral) or isinstance(k, bool) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if n is not None and n < k:
        raise IngestionError(f"need n >= k, got n={n}, k={k}")
    return int(k)


def check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    return epsilon


def check_max_dim(max_dim):
    if not isinstance(max_dim, numbers.Integral) or max_dim < 0:
        raise ValueError(f"max_dim must be a nonnegative integer, got {max_dim!r}")
    return int(max_dim)
