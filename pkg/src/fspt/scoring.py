"""Leaf scores and point queries."""

from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np

from .core import FeatureImportances, FsptTree, InputError, Leaf, Partition, iter_leaves


def score_from_counts(n_plus, side_ratios, weights, e_param) -> float:
    """``sum_I f_I * n / (n + ratio_I * E)`` over features with ``f_I > 0``.

    An empty leaf scores 0, whatever its size.
    """
    n = float(n_plus)
    if n <= 0:
        return 0.0
    ratios = np.asarray(side_ratios, dtype=float)
    w = np.asarray(weights, dtype=float)
    active = w > 0
    terms = w[active] * n / (n + ratios[active] * e_param)
    return float(terms.sum())


def side_ratios(lower, upper, global_lower, global_upper) -> np.ndarray:
    """Per-feature ``side(R) / side(root)``; constant features give 0."""
    width = np.asarray(global_upper, dtype=float) - np.asarray(global_lower, dtype=float)
    side = np.asarray(upper, dtype=float) - np.asarray(lower, dtype=float)
    out = np.zeros_like(width)
    np.divide(side, width, out=out, where=width > 0)
    return out


def leaf_score(
    partition: Partition,
    importances: FeatureImportances,
    global_bounds,
    e_param: float,
) -> float:
    """Score of a partition from its training count and relative side lengths.

    Parameters
    ----------
    partition : Partition
    importances : FeatureImportances
        Must sum to 1, which keeps the score in [0, 1].
    global_bounds : array of shape (d, 2)
        Root-box (lower, upper) per feature.
    e_param : float
        Positive smoothing mass, by default ``n_samples / n_features``.
    """
    if e_param <= 0:
        raise ValueError("e_param must be positive")
    gb = np.asarray(global_bounds, dtype=float)
    ratios = side_ratios(partition.lower, partition.upper, gb[:, 0], gb[:, 1])
    return score_from_counts(partition.n_plus, ratios, importances.weights, e_param)


def _replace_leaves(node, fn):
    if isinstance(node, Leaf):
        return fn(node)
    return dataclasses.replace(
        node, left=_replace_leaves(node.left, fn), right=_replace_leaves(node.right, fn)
    )


def normalize_scores(tree: FsptTree) -> FsptTree:
    """Min-max map raw leaf scores onto [0, 1], keeping the raw values.

    If every leaf has the same raw score all normalised scores are 1.
    """
    raw = [leaf.raw_score for leaf in iter_leaves(tree.root)]
    lo, hi = min(raw), max(raw)
    span = hi - lo

    def rescale(leaf):
        value = 1.0 if span <= 0 else (leaf.raw_score - lo) / span
        return dataclasses.replace(leaf, normalized_score=float(value))

    return dataclasses.replace(tree, root=_replace_leaves(tree.root, rescale))


class LookupResult(NamedTuple):
    leaf_id: int
    phi_f: float
    beyond_bounds: bool


def _as_query(tree: FsptTree, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (tree.n_features,):
        raise InputError(f"query must have {tree.n_features} features, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("query contains non-finite values")
    return x


def clamp(tree: FsptTree, x):
    """Clip ``x`` into the root box.

    Returns ``(clipped, side)`` where ``side`` is -1/+1 for coordinates moved
    up to the lower / down to the upper bound and 0 elsewhere.
    """
    x = _as_query(tree, x)
    clipped = np.clip(x, tree.lower, tree.upper)
    side = np.sign(x - clipped).astype(int)
    return clipped, side


def descend(tree: FsptTree, x, side=None):
    """Route an in-box point to its leaf; returns ``(leaf, visited_split_nodes)``.

    ``side`` (from :func:`clamp`) routes clamped coordinates as if they sat
    just inside the box, so an outside point never lands in a zero-width
    leaf on the boundary.
    """
    node = tree.root
    path = []
    while not isinstance(node, Leaf):
        path.append(node)
        v = x[node.feature]
        where = 0 if side is None else side[node.feature]
        if where < 0:
            left = v < node.coordinate
        elif where > 0:
            left = v <= node.coordinate
        else:
            left = node.goes_left(v)
        node = node.left if left else node.right
    return node, path


def lookup(tree: FsptTree, x, normalized: bool = False) -> LookupResult:
    """Leaf id and score for a single query point.

    Points outside the training box are clamped onto it first and flagged.
    """
    clipped, side = clamp(tree, x)
    leaf, _ = descend(tree, clipped, side)
    phi = leaf.normalized_score if normalized else leaf.raw_score
    return LookupResult(leaf.leaf_id, phi, bool(np.any(side)))


def lookup_many(tree: FsptTree, X, normalized: bool = False):
    """Vector form of :func:`lookup`: arrays ``(leaf_ids, phi_f, beyond_bounds)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != tree.n_features:
        raise InputError(f"queries must have shape (n, {tree.n_features}), got {X.shape}")
    bad = np.argwhere(~np.isfinite(X))
    if bad.size:
        raise InputError(f"non-finite query value at row {bad[0][0]}, column {bad[0][1]}")
    clipped = np.clip(X, tree.lower, tree.upper)
    sides = np.sign(X - clipped).astype(int)
    beyond = np.any(sides != 0, axis=1)
    ids = np.empty(len(X), dtype=int)
    phi = np.empty(len(X), dtype=float)
    for i, row in enumerate(clipped):
        leaf, _ = descend(tree, row, sides[i] if beyond[i] else None)
        ids[i] = leaf.leaf_id
        phi[i] = leaf.normalized_score if normalized else leaf.raw_score
    return ids, phi, beyond
