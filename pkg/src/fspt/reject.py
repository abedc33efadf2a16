"""Reject-option decisions and the built-in kNN baseline predictors."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .core import ConfigurationError, Dataset, InputError, ValidationError, parse_numeric_rows
from .validation import check_features

REGRESSION = "regression"
CLASSIFICATION = "classification"
_TASK_ALIASES = {"reg": REGRESSION, "regression": REGRESSION, "clf": CLASSIFICATION, "classification": CLASSIFICATION}


def canonical_task(task: str) -> str:
    try:
        return _TASK_ALIASES[task]
    except KeyError:
        raise ConfigurationError(f"unknown task {task!r}; expected 'reg' or 'clf'") from None


@dataclass(frozen=True)
class RejectPolicy:
    """Thresholds for accepting a prediction.

    Regression uses ``t`` on the tree score. Classification uses ``t1`` on the
    model's top-class probability and ``t2`` on the tree score.
    """

    kind: str
    t: float = 0.0
    t1: float = 0.0
    t2: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_task(self.kind))
        for name in ("t", "t1", "t2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"threshold {name}={value} outside [0, 1]")

    @classmethod
    def regression(cls, t: float) -> "RejectPolicy":
        return cls(REGRESSION, t=t)

    @classmethod
    def classification(cls, t1: float, t2: float) -> "RejectPolicy":
        return cls(CLASSIFICATION, t1=t1, t2=t2)


@dataclass(frozen=True)
class Prediction:
    """A model output. ``probabilities`` is set for classification only."""

    value: float
    probabilities: Optional[tuple] = None
    classes: Optional[tuple] = None

    def __post_init__(self):
        if self.probabilities is None:
            return
        p = np.asarray(self.probabilities, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError(f"class probabilities must be nonnegative and sum to 1, got {tuple(p)}")
        if self.classes is not None and len(self.classes) != len(p):
            raise ValidationError("classes and probabilities differ in length")

    @property
    def phi_m(self) -> Optional[float]:
        if self.probabilities is None:
            return None
        return float(max(self.probabilities))


def decide_regression(phi_f: float, policy: RejectPolicy, prediction: Prediction):
    """The predicted value if ``phi_f >= t``, otherwise ``None`` (reject)."""
    if policy.kind != REGRESSION:
        raise ConfigurationError("decide_regression needs a regression policy")
    if phi_f >= policy.t:
        return prediction.value
    return None


def decide_classification(phi_f: float, prediction: Prediction, policy: RejectPolicy):
    """The top class if its probability clears ``t1`` and ``phi_f`` clears ``t2``.

    Returns ``None`` to signal a reject.
    """
    if policy.kind != CLASSIFICATION:
        raise ConfigurationError("decide_classification needs a classification policy")
    if prediction.probabilities is None:
        raise InputError("classification decision needs class probabilities")
    if prediction.phi_m >= policy.t1 and phi_f >= policy.t2:
        return prediction.value
    return None


def accept_mask(phi_f, policy: RejectPolicy, phi_m=None) -> np.ndarray:
    """Vectorised acceptance test over arrays of scores."""
    phi_f = np.asarray(phi_f, dtype=float)
    if policy.kind == REGRESSION:
        return phi_f >= policy.t
    if phi_m is None:
        raise InputError("classification acceptance needs model confidences")
    return (np.asarray(phi_m, dtype=float) >= policy.t1) & (phi_f >= policy.t2)


class _KNNBase(BaseEstimator):
    """Brute-force kNN on standardised features with deterministic ties.

    Distance ties go to the lower training index.
    """

    def __init__(self, n_neighbors: int = 5):
        self.n_neighbors = n_neighbors

    def _fit(self, X, y):
        X = check_features(X)
        y = np.asarray(y)
        if len(X) == 0:
            raise ConfigurationError("kNN needs at least one training sample")
        if y.shape != (len(X),):
            raise InputError(f"expected {len(X)} labels, got shape {y.shape}")
        if not 1 <= self.n_neighbors <= len(X):
            raise ConfigurationError(f"n_neighbors must be in [1, {len(X)}], got {self.n_neighbors}")
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale_ = np.where(std > 0, std, 1.0)
        self.train_ = (X - self.mean_) / self.scale_
        self.y_ = y
        self.n_features_in_ = X.shape[1]
        return self

    def kneighbors(self, X):
        check_is_fitted(self, "train_")
        X = check_features(X, self.n_features_in_)
        Z = (X - self.mean_) / self.scale_
        k = self.n_neighbors
        out = np.empty((len(Z), k), dtype=int)
        for i, z in enumerate(Z):
            dist = np.sum((self.train_ - z) ** 2, axis=1)
            out[i] = np.argsort(dist, kind="stable")[:k]
        return out


class KNNRegressor(RegressorMixin, _KNNBase):
    def fit(self, X, y):
        return self._fit(X, np.asarray(y, dtype=float))

    def predict(self, X):
        idx = self.kneighbors(X)
        return self.y_[idx].mean(axis=1)


class KNNClassifier(ClassifierMixin, _KNNBase):
    """Vote-fraction probabilities; argmax ties go to the smallest class."""

    def fit(self, X, y):
        self._fit(X, y)
        self.classes_, self.codes_ = np.unique(self.y_, return_inverse=True)
        return self

    def predict_proba(self, X):
        idx = self.kneighbors(X)
        votes = self.codes_[idx]
        counts = np.zeros((len(idx), len(self.classes_)))
        for c in range(len(self.classes_)):
            counts[:, c] = np.count_nonzero(votes == c, axis=1)
        return counts / self.n_neighbors

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]


def knn_predict(train: Dataset, x, k: int, task: str) -> Prediction:
    """Single-point kNN prediction from a labelled :class:`Dataset`."""
    task = canonical_task(task)
    if train.labels is None:
        raise ConfigurationError("kNN needs a labelled training set")
    x = np.asarray(x, dtype=float).reshape(1, -1)
    if task == REGRESSION:
        model = KNNRegressor(k).fit(train.features, train.labels)
        return Prediction(float(model.predict(x)[0]))
    model = KNNClassifier(k).fit(train.features, train.labels)
    proba = model.predict_proba(x)[0]
    top = int(np.argmax(proba))
    return Prediction(model.classes_[top].item(), tuple(float(p) for p in proba), tuple(model.classes_.tolist()))


def predictions_from_arrays(task: str, values=None, proba=None, classes=None) -> List[Prediction]:
    task = canonical_task(task)
    if task == REGRESSION:
        return [Prediction(float(v)) for v in np.asarray(values, dtype=float)]
    proba = np.asarray(proba, dtype=float)
    classes = tuple(classes) if classes is not None else tuple(range(proba.shape[1]))
    top = np.argmax(proba, axis=1)
    return [Prediction(classes[t], tuple(row.tolist()), classes) for t, row in zip(top, proba)]


def load_predictions(path, task: str, n_rows: Optional[int] = None) -> List[Prediction]:
    """Read an external model's outputs.

    Regression files hold one float per row, optionally under a header.
    Classification files hold one probability per class per row under a
    header naming the classes; numeric class names are parsed as numbers.
    """
    task = canonical_task(task)
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]

    if task == REGRESSION:
        if rows and not _is_numeric_row(rows[0]):
            rows = rows[1:]
        values = parse_numeric_rows(rows, 1, path)[:, 0] if rows else np.empty(0)
        preds = [Prediction(float(v)) for v in values]
    else:
        if not rows:
            raise InputError(f"{path}: missing header row")
        header = [h.strip() for h in rows[0]]
        classes = tuple(_parse_class(h) for h in header)
        proba = parse_numeric_rows(rows[1:], len(header), path)
        preds = []
        for i, row in enumerate(proba):
            if np.any(row < 0) or abs(row.sum() - 1.0) > 1e-6:
                raise ValidationError(
                    f"{path}: line {i + 2}: probabilities {tuple(row)} do not sum to 1"
                )
            row = row / row.sum()
            top = int(np.argmax(row))
            preds.append(Prediction(classes[top], tuple(row.tolist()), classes))

    if n_rows is not None and len(preds) != n_rows:
        raise InputError(f"{path}: {len(preds)} prediction rows for {n_rows} evaluation rows")
    return preds


def _is_numeric_row(row: Sequence[str]) -> bool:
    try:
        [float(c) for c in row]
    except ValueError:
        return False
    return True


def _parse_class(name: str):
    try:
        v = float(name)
    except ValueError:
        return name
    return int(v) if v.is_integer() else v
