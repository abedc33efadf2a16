"""Domain types shared across the package.

A fitted tree is a plain immutable structure of :class:`SplitNode` and
:class:`Leaf` records wrapped in :class:`FsptTree`; algorithms live in the
``split``, ``builder`` and ``scoring`` modules.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

import numpy as np


class FsptError(Exception):
    """Base class for errors raised by this package."""


class InputError(FsptError, ValueError):
    """Malformed or mismatched user input (files, arrays, query rows)."""


class ValidationError(InputError):
    """Input parsed but violates a domain invariant (NaN, bad probabilities)."""


class ConfigurationError(FsptError, ValueError):
    """Invalid hyperparameters or a setup that cannot produce a valid result."""


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with optional labels and per-feature training bounds.

    ``lower``/``upper`` are the column-wise min/max of ``features``; columns
    where they coincide are marked in ``constant_mask``.
    """

    features: np.ndarray
    labels: Optional[np.ndarray] = None
    feature_names: tuple = ()
    lower: np.ndarray = field(init=False, repr=False)
    upper: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        if X.ndim != 2:
            raise InputError(f"features must be 2-D, got shape {X.shape}")
        n, d = X.shape
        if n < 1 or d < 1:
            raise InputError(f"need at least one row and one column, got shape {X.shape}")
        bad = np.argwhere(~np.isfinite(X))
        if bad.size:
            r, c = bad[0]
            raise ValidationError(f"non-finite feature value at row {r}, column {c}")
        X.setflags(write=False)
        object.__setattr__(self, "features", X)

        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.shape != (n,):
                raise InputError(f"labels must have shape ({n},), got {y.shape}")
            y = y.copy()
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)

        names = tuple(self.feature_names) or tuple(f"x{i}" for i in range(d))
        if len(names) != d:
            raise InputError(f"expected {d} feature names, got {len(names)}")
        object.__setattr__(self, "feature_names", names)

        lower = X.min(axis=0)
        upper = X.max(axis=0)
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def global_bounds(self) -> np.ndarray:
        """Array of shape (d, 2) holding (lower, upper) per feature."""
        return np.column_stack([self.lower, self.upper])

    @property
    def constant_mask(self) -> np.ndarray:
        return self.lower == self.upper


@dataclass(frozen=True)
class Partition:
    """Axis-aligned box with the training rows assigned to it."""

    lower: np.ndarray
    upper: np.ndarray
    sample_indices: np.ndarray

    def __post_init__(self):
        if np.any(self.lower > self.upper):
            raise ValueError("partition lower bound exceeds upper bound")

    @property
    def n_plus(self) -> int:
        return int(len(self.sample_indices))

    @property
    def side_lengths(self) -> np.ndarray:
        return self.upper - self.lower

    @classmethod
    def root(cls, dataset: Dataset) -> "Partition":
        return cls(dataset.lower.copy(), dataset.upper.copy(), np.arange(dataset.n_samples))


@dataclass(frozen=True)
class FeatureImportances:
    """Nonnegative per-feature weights summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ConfigurationError("importances must be a finite nonnegative vector")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ConfigurationError(f"importances must sum to 1, got {w.sum()!r}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    @classmethod
    def uniform(cls, constant_mask: Sequence[bool]) -> "FeatureImportances":
        return normalize_importances(np.ones(len(constant_mask)), constant_mask)


def normalize_importances(raw, constant_mask) -> FeatureImportances:
    """Zero out constant features and rescale the rest to sum to one.

    When every feature is constant nothing can be split, so no masking is
    applied and the raw weights are only rescaled.

    Raises
    ------
    ConfigurationError
        If no non-constant feature carries positive weight.
    """
    w = np.array(raw, dtype=float)
    mask = np.asarray(constant_mask, dtype=bool)
    if w.shape != mask.shape:
        raise ConfigurationError(
            f"got {w.size} importance values for {mask.size} features"
        )
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise ConfigurationError("importance values must be finite and nonnegative")
    if not mask.all():
        w[mask] = 0.0
    total = w.sum()
    if total <= 0:
        raise ConfigurationError("all effective feature importances are zero")
    w = w / total
    # Absorb rounding so the sum invariant holds to 1e-9 reliably.
    w[np.argmax(w)] += 1.0 - w.sum()
    return FeatureImportances(w)


@dataclass(frozen=True)
class FsptConfig:
    """Construction hyperparameters.

    ``e_param`` of ``None`` means ``n_samples / n_features`` at fit time.
    ``lambda_rule`` is ``"fixed"`` (use ``lambda_max`` everywhere) or
    ``"log2"`` (see :func:`fspt.builder.adaptive_lambda`).
    """

    epsilon: float = 0.01
    lambda_max: int = 3
    lambda_rule: str = "log2"
    min_samples_stop: int = 5
    e_param: Optional[float] = None
    max_depth: int = 30

    def __post_init__(self):
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise ConfigurationError(f"epsilon must be >= 0, got {self.epsilon}")
        if int(self.lambda_max) != self.lambda_max or self.lambda_max < 1:
            raise ConfigurationError(f"lambda_max must be an integer >= 1, got {self.lambda_max}")
        if self.lambda_rule not in ("fixed", "log2"):
            raise ConfigurationError(f"unknown lambda_rule {self.lambda_rule!r}")
        if int(self.min_samples_stop) != self.min_samples_stop or self.min_samples_stop < 1:
            raise ConfigurationError(
                f"min_samples_stop must be an integer >= 1, got {self.min_samples_stop}"
            )
        if self.e_param is not None and not (self.e_param > 0 and math.isfinite(self.e_param)):
            raise ConfigurationError(f"e_param must be positive, got {self.e_param}")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise ConfigurationError(f"max_depth must be an integer >= 1, got {self.max_depth}")

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "lambda_max": int(self.lambda_max),
            "lambda_rule": self.lambda_rule,
            "min_samples_stop": int(self.min_samples_stop),
            "e_param": self.e_param,
            "max_depth": int(self.max_depth),
        }


@dataclass(frozen=True)
class Leaf:
    """Terminal partition with its training count and scores."""

    leaf_id: int
    lower: tuple
    upper: tuple
    n_plus: int
    raw_score: float
    normalized_score: float
    depth: int


@dataclass(frozen=True)
class SplitNode:
    """Internal node.

    With ``strict`` false the left child takes ``x[feature] <= coordinate``;
    with ``strict`` true it takes ``x[feature] < coordinate``.
    """

    feature: int
    coordinate: float
    strict: bool
    left: "Node"
    right: "Node"

    def goes_left(self, value: float) -> bool:
        if self.strict:
            return value < self.coordinate
        return value <= self.coordinate


Node = Union[Leaf, SplitNode]


@dataclass(frozen=True)
class FsptTree:
    root: Node
    lower: tuple
    upper: tuple
    importances: tuple
    config: FsptConfig
    e_param: float
    n_samples: int
    n_features: int
    feature_names: tuple

    @property
    def constant_mask(self) -> np.ndarray:
        return np.asarray(self.lower) == np.asarray(self.upper)

    def leaves(self) -> list:
        """Leaves in left-to-right order; ``leaves()[i].leaf_id == i``."""
        return list(iter_leaves(self.root))

    @property
    def n_leaves(self) -> int:
        return len(self.leaves())

    @property
    def depth(self) -> int:
        return max(leaf.depth for leaf in iter_leaves(self.root))


def iter_leaves(node: Node) -> Iterator[Leaf]:
    stack = [node]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            yield node
        else:
            stack.append(node.right)
            stack.append(node.left)


def load_dataset(path, label_col: Union[str, int, None] = None) -> Dataset:
    """Read a headed CSV of decimal numbers into a :class:`Dataset`.

    ``label_col`` selects the label column by header name or 0-based index;
    every other column is a feature. Labels are parsed as floats.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    header, rows = read_csv(path)
    if not header:
        raise InputError(f"{path}: missing header row")
    label_idx = None
    if label_col is not None:
        label_idx = resolve_column(header, label_col, path)
    feature_idx = [j for j in range(len(header)) if j != label_idx]
    if not feature_idx:
        raise InputError(f"{path}: no feature columns")
    if not rows:
        raise InputError(f"{path}: no data rows")

    values = parse_numeric_rows(rows, len(header), path)
    labels = values[:, label_idx] if label_idx is not None else None
    names = tuple(header[j] for j in feature_idx)
    return Dataset(values[:, feature_idx], labels, names)


def resolve_column(header, col, path="<csv>") -> int:
    if isinstance(col, int):
        if not 0 <= col < len(header):
            raise InputError(f"{path}: column index {col} out of range")
        return col
    if col in header:
        return header.index(col)
    if str(col).isdigit() and int(col) < len(header):
        return int(col)
    raise InputError(f"{path}: no column named {col!r}")


def read_csv(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    if not rows:
        return [], []
    header = [h.strip() for h in rows[0]]
    return header, rows[1:]


def parse_numeric_rows(rows, width: int, path="<csv>") -> np.ndarray:
    """Parse string rows into a float matrix, naming the offending cell on error.

    Row numbers in messages count the header as line 1.
    """
    out = np.empty((len(rows), width), dtype=float)
    for i, row in enumerate(rows):
        line = i + 2
        if len(row) != width:
            raise InputError(f"{path}: line {line} has {len(row)} fields, expected {width}")
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise InputError(
                    f"{path}: line {line}, column {j + 1}: cannot parse {cell.strip()!r} as a number"
                ) from None
            if not math.isfinite(v):
                raise ValidationError(f"{path}: line {line}, column {j + 1}: non-finite value {cell.strip()!r}")
            out[i, j] = v
    return out
