"""Input validation helpers used by the estimators and the CLI."""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.utils import check_array

from .core import InputError, ValidationError


def check_features(X, n_features: Optional[int] = None, *, allow_empty: bool = False) -> np.ndarray:
    """Return ``X`` as a finite 2-D float array.

    Raises :class:`ValidationError` naming the first non-finite cell and
    :class:`InputError` for shape problems, including a column count that
    differs from ``n_features``.
    """
    if allow_empty and np.size(X) == 0:
        X = np.asarray(X, dtype=float).reshape(0, n_features or 0)
        return X
    try:
        X = check_array(X, dtype=float, ensure_all_finite=False, ensure_min_samples=1)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    bad = np.argwhere(~np.isfinite(X))
    if bad.size:
        r, c = bad[0]
        raise ValidationError(f"non-finite value at row {r}, column {c}")
    if n_features is not None and X.shape[1] != n_features:
        raise InputError(f"expected {n_features} features, got {X.shape[1]}")
    return X


def check_importance_vector(raw, n_features: int) -> np.ndarray:
    w = np.asarray(raw, dtype=float)
    if w.shape != (n_features,):
        raise InputError(f"expected {n_features} importance values, got shape {w.shape}")
    return w
