"""Global feature importances for weighting splits and scores."""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ConfigurationError, FeatureImportances, InputError, normalize_importances
from .reject import CLASSIFICATION, KNNClassifier, KNNRegressor, canonical_task
from .validation import check_features

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PermutationResult:
    importances: FeatureImportances
    baseline_loss: float
    mean_increase: np.ndarray
    std_increase: np.ndarray
    fell_back_to_uniform: bool


def _row_loss(task, y_true, y_pred) -> np.ndarray:
    if task == CLASSIFICATION:
        return (np.asarray(y_true) != np.asarray(y_pred)).astype(float)
    return np.abs(np.asarray(y_true, float) - np.asarray(y_pred, float))


def permutation_importance(
    X,
    y,
    task: str = "reg",
    k: int = 5,
    seed: int = 0,
    holdout: float = 0.3,
    n_repeats: int = 5,
) -> PermutationResult:
    """Holdout permutation importance of a kNN baseline.

    Each feature's raw importance is the mean increase in holdout loss (mean
    absolute error, or error rate) over ``n_repeats`` shuffles of that column.
    An increase counts only if it exceeds two standard errors of the per-row
    loss changes (averaged over the repeats, paired against the unshuffled
    holdout); otherwise, or if negative, it is floored to zero. If every feature floors
    to zero the result falls back to uniform weights, with a warning.
    """
    task = canonical_task(task)
    X = check_features(X)
    y = np.asarray(y)
    n, d = X.shape
    if y.shape != (n,):
        raise InputError(f"expected {n} labels, got shape {y.shape}")
    if not 0 < holdout < 1:
        raise ConfigurationError(f"holdout fraction must be in (0, 1), got {holdout}")
    if n_repeats < 1:
        raise ConfigurationError("n_repeats must be >= 1")

    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_hold = max(1, int(round(holdout * n)))
    hold, train = order[:n_hold], order[n_hold:]
    if len(train) < k:
        raise ConfigurationError(f"only {len(train)} training rows left for k={k}")

    y_hold = y[hold]
    if task == CLASSIFICATION:
        if len(np.unique(y_hold)) < 2 or len(np.unique(y[train])) < 2:
            raise ConfigurationError("holdout or training split contains a single class")
        model = KNNClassifier(k)
    else:
        y = y.astype(float)
        y_hold = y[hold]
        if np.all(y_hold == y_hold[0]):
            raise ConfigurationError("holdout labels are constant")
        model = KNNRegressor(k)
    model.fit(X[train], y[train])
    X_hold = X[hold]
    base_rows = _row_loss(task, y_hold, model.predict(X_hold))
    baseline = float(base_rows.mean())

    constant = X.min(axis=0) == X.max(axis=0)
    mean_inc = np.zeros(d)
    std_inc = np.zeros(d)
    noise = np.zeros(d)
    for j in range(d):
        if constant[j]:
            continue
        diffs = np.empty((n_repeats, n_hold))
        for r in range(n_repeats):
            shuffled = X_hold.copy()
            shuffled[:, j] = rng.permutation(shuffled[:, j])
            diffs[r] = _row_loss(task, y_hold, model.predict(shuffled)) - base_rows
        incs = diffs.mean(axis=1)
        mean_inc[j] = incs.mean()
        std_inc[j] = incs.std(ddof=1) if n_repeats > 1 else 0.0
        per_row = diffs.mean(axis=0)
        if n_hold > 1:
            noise[j] = 2.0 * per_row.std(ddof=1) / np.sqrt(n_hold)

    raw = np.where((mean_inc > 0) & (mean_inc > noise), mean_inc, 0.0)
    raw[constant] = 0.0

    fell_back = not np.any(raw > 0)
    if fell_back:
        warnings.warn("no feature showed a permutation effect; using uniform importances")
        raw = np.where(constant, 0.0, 1.0)
    if not np.any(raw > 0):
        raise ConfigurationError("every feature is constant")
    logger.debug("permutation importance: baseline=%g increases=%s", baseline, mean_inc)
    return PermutationResult(normalize_importances(raw, constant), baseline, mean_inc, std_inc, fell_back)


def load_importance_file(path, feature_names) -> np.ndarray:
    """Read a JSON object mapping feature name to nonnegative weight."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{path}: expected a JSON object of feature -> weight")
    missing = [name for name in feature_names if name not in doc]
    extra = [name for name in doc if name not in feature_names]
    if missing or extra:
        raise InputError(f"{path}: feature mismatch (missing={missing}, unknown={extra})")
    try:
        return np.array([float(doc[name]) for name in feature_names])
    except (TypeError, ValueError):
        raise InputError(f"{path}: weights must be numbers") from None


def dump_importances(importances: FeatureImportances, feature_names) -> str:
    return json.dumps(dict(zip(feature_names, importances.weights.tolist())), indent=1) + "\n"
