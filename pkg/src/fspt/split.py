"""Split search against a uniform background of empty-space points.

Inside a node the background mass is fixed equal to the training count and
spread uniformly over the box, so along one feature the left child receives
background mass in proportion to its side length. The weighted Gini of a
split then only depends on two numbers, the fraction of training rows sent
left (``cdf``) and the fraction of side length sent left (``s``)::

    G_hat = cdf * s / (cdf + s) + (1 - cdf) * (1 - s) / (2 - cdf - s)

Between two consecutive distinct sample values ``cdf`` is constant and
``G_hat`` has no interior minimum, so only splits at, or just below, each
sample value need to be tried. "Just below ``v``" is realised exactly as the
strict comparison ``x < v``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .core import Dataset, FeatureImportances, Partition


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    coordinate: float
    strict: bool
    cdf: float
    fraction: float
    g_hat: float
    gain: float
    weighted_gain: float = 0.0

    def goes_left(self, values):
        values = np.asarray(values)
        if self.strict:
            return values < self.coordinate
        return values <= self.coordinate


def gini(n_plus: float, n_minus: float) -> float:
    """Two-class Gini index ``2 p (1 - p)`` of a (training, background) mix."""
    total = n_plus + n_minus
    if total <= 0:
        raise ValueError("gini of an empty partition is undefined")
    p = n_plus / total
    return 2.0 * p * (1.0 - p)


def closed_form_gini(cdf, s):
    """Weighted Gini of a split in normalised coordinates (vectorised).

    A child with zero combined weight contributes nothing.
    """
    cdf = np.asarray(cdf, dtype=float)
    s = np.asarray(s, dtype=float)
    left_w = cdf + s
    right_w = 2.0 - cdf - s
    with np.errstate(divide="ignore", invalid="ignore"):
        left = np.where(left_w > 0, cdf * s / left_w, 0.0)
        right = np.where(right_w > 0, (1.0 - cdf) * (1.0 - s) / right_w, 0.0)
    out = left + right
    return out if out.ndim else float(out)


def _feature_candidates(values, lo, hi):
    """Candidate arrays for one feature of one node.

    Returns ``(coords, strict, cdf, fraction)`` ordered by coordinate, with the
    inclusive split listed before the strict split at the same value. Splits
    that leave one child with neither side length nor samples are dropped;
    such a split reproduces the parent and is a no-op.
    """
    n = len(values)
    uniq, counts = np.unique(values, return_counts=True)
    le = np.cumsum(counts)
    lt = le - counts
    frac = (uniq - lo) / (hi - lo)

    m = len(uniq)
    coords = np.repeat(uniq, 2)
    strict = np.tile([False, True], m)
    cdf = np.empty(2 * m)
    cdf[0::2] = le / n
    cdf[1::2] = lt / n
    fraction = np.repeat(frac, 2)

    empty_left = (fraction == 0.0) & (cdf == 0.0)
    empty_right = (fraction == 1.0) & (cdf == 1.0)
    keep = ~(empty_left | empty_right)
    return coords[keep], strict[keep], cdf[keep], fraction[keep]


def candidate_splits(partition: Partition, dataset: Dataset, feature: int) -> List[SplitCandidate]:
    """All candidate splits of ``partition`` on ``feature``, with their Gini.

    Empty if the node has no samples or zero width on the feature.
    ``weighted_gain`` is left at 0; :func:`best_split` fills it in.
    """
    lo = float(partition.lower[feature])
    hi = float(partition.upper[feature])
    if hi <= lo or partition.n_plus == 0:
        return []
    values = dataset.features[partition.sample_indices, feature]
    coords, strict, cdf, frac = _feature_candidates(values, lo, hi)
    g_hat = closed_form_gini(cdf, frac)
    parent = gini(1.0, 1.0)
    return [
        SplitCandidate(
            feature=feature,
            coordinate=float(c),
            strict=bool(st),
            cdf=float(p),
            fraction=float(f),
            g_hat=float(g),
            gain=max(0.0, parent - float(g)),
        )
        for c, st, p, f, g in zip(coords, strict, cdf, frac, np.atleast_1d(g_hat))
    ]


def weighted_gini(partition: Partition, dataset: Dataset, candidate: SplitCandidate) -> float:
    """Recompute the weighted Gini of ``candidate`` from the node's samples."""
    feature = candidate.feature
    lo = partition.lower[feature]
    hi = partition.upper[feature]
    values = dataset.features[partition.sample_indices, feature]
    cdf = np.count_nonzero(candidate.goes_left(values)) / len(values)
    frac = (candidate.coordinate - lo) / (hi - lo)
    return closed_form_gini(cdf, frac)


def best_split(
    partition: Partition, dataset: Dataset, importances: FeatureImportances
) -> Optional[SplitCandidate]:
    """Candidate maximising ``f_I * (side_I(R) / side_I) * gain``.

    Features with zero importance or zero global width are never split.
    Ties go to the lowest feature index, then the smallest coordinate, then
    the inclusive comparison. Returns ``None`` when nothing can be split.
    """
    if partition.n_plus == 0:
        return None
    global_width = dataset.upper - dataset.lower
    weights = importances.weights
    parent = gini(1.0, 1.0)

    best = None
    best_score = -np.inf
    for feature in range(dataset.n_features):
        lo = float(partition.lower[feature])
        hi = float(partition.upper[feature])
        if weights[feature] <= 0 or global_width[feature] <= 0 or hi <= lo:
            continue
        values = dataset.features[partition.sample_indices, feature]
        coords, strict, cdf, frac = _feature_candidates(values, lo, hi)
        if not len(coords):
            continue
        g_hat = np.atleast_1d(closed_form_gini(cdf, frac))
        gain = np.maximum(parent - g_hat, 0.0)
        factor = weights[feature] * (hi - lo) / global_width[feature]
        scores = factor * gain
        k = int(np.argmax(scores))
        if scores[k] > best_score:
            best_score = scores[k]
            best = SplitCandidate(
                feature=feature,
                coordinate=float(coords[k]),
                strict=bool(strict[k]),
                cdf=float(cdf[k]),
                fraction=float(frac[k]),
                g_hat=float(g_hat[k]),
                gain=float(gain[k]),
                weighted_gain=float(scores[k]),
            )
    return best
