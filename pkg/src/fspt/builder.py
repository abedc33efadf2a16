"""Recursive tree construction.

A split whose gain is at most ``epsilon`` is only provisional. The number of
consecutive provisional splits along a root-to-node path is tracked in a
counter; the first provisional split of a run is the *anchor*. A split with
gain above ``epsilon`` resets the counter on its path. When the counter
would exceed the node's lambda, the anchor is turned into a leaf and
everything grown beneath it is discarded. The outcome does not depend on the
order in which children are grown.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import Optional

import numpy as np

from .core import (
    ConfigurationError,
    Dataset,
    FeatureImportances,
    FsptConfig,
    FsptTree,
    Leaf,
    Partition,
    SplitNode,
)
from .scoring import leaf_score, normalize_scores
from .split import best_split

logger = logging.getLogger(__name__)


def adaptive_lambda(n_plus: int, config: FsptConfig) -> int:
    """Effective run-length limit for a node holding ``n_plus`` samples.

    Under the ``"log2"`` rule this is ``min(lambda_max, max(1, floor(log2 n)))``
    so data-rich nodes may probe further; ``"fixed"`` always gives
    ``lambda_max``. Nodes below ``min_samples_stop`` get 0.
    """
    n_plus = int(n_plus)
    if n_plus < config.min_samples_stop or n_plus <= 0:
        return 0
    if config.lambda_rule == "fixed":
        return int(config.lambda_max)
    return min(int(config.lambda_max), max(1, n_plus.bit_length() - 1))


class _Collapse(Exception):
    def __init__(self, anchor):
        super().__init__()
        self.anchor = anchor


@dataclasses.dataclass
class _BuildState:
    dataset: Dataset
    importances: FeatureImportances
    config: FsptConfig
    e_param: float
    n_collapses: int = 0


def _leaf(state: _BuildState, part: Partition, depth: int) -> Leaf:
    raw = leaf_score(part, state.importances, state.dataset.global_bounds, state.e_param)
    return Leaf(
        leaf_id=-1,
        lower=tuple(float(v) for v in part.lower),
        upper=tuple(float(v) for v in part.upper),
        n_plus=part.n_plus,
        raw_score=raw,
        normalized_score=raw,
        depth=depth,
    )


def _grow(state: _BuildState, part: Partition, depth: int, counter: int, anchor):
    cfg = state.config
    if part.n_plus < cfg.min_samples_stop or depth >= cfg.max_depth:
        return _leaf(state, part, depth)
    cand = best_split(part, state.dataset, state.importances)
    if cand is None:
        return _leaf(state, part, depth)

    me = object()
    if cand.gain <= cfg.epsilon:
        counter += 1
        if counter == 1:
            anchor = me
    else:
        counter, anchor = 0, None

    if counter > adaptive_lambda(part.n_plus, cfg):
        if anchor is me:
            return _leaf(state, part, depth)
        raise _Collapse(anchor)

    f = cand.feature
    values = state.dataset.features[part.sample_indices, f]
    go_left = cand.goes_left(values)
    left_upper = part.upper.copy()
    left_upper[f] = cand.coordinate
    right_lower = part.lower.copy()
    right_lower[f] = cand.coordinate
    left_part = Partition(part.lower, left_upper, part.sample_indices[go_left])
    right_part = Partition(right_lower, part.upper, part.sample_indices[~go_left])

    try:
        left = _grow(state, left_part, depth + 1, counter, anchor)
        right = _grow(state, right_part, depth + 1, counter, anchor)
    except _Collapse as exc:
        if exc.anchor is not me:
            raise
        state.n_collapses += 1
        return _leaf(state, part, depth)
    return SplitNode(f, cand.coordinate, cand.strict, left, right)


def _number_leaves(node, start=0):
    if isinstance(node, Leaf):
        return dataclasses.replace(node, leaf_id=start), start + 1
    left, nxt = _number_leaves(node.left, start)
    right, nxt = _number_leaves(node.right, nxt)
    return dataclasses.replace(node, left=left, right=right), nxt


def build(
    dataset: Dataset,
    importances: Optional[FeatureImportances] = None,
    config: Optional[FsptConfig] = None,
) -> FsptTree:
    """Grow, score and normalise a tree over ``dataset``.

    ``importances`` defaults to uniform weights over the non-constant
    features. Deterministic: the same inputs always give the same tree.
    """
    config = config or FsptConfig()
    if importances is None:
        importances = FeatureImportances.uniform(dataset.constant_mask)
    if len(importances) != dataset.n_features:
        raise ConfigurationError(
            f"got {len(importances)} importances for {dataset.n_features} features"
        )
    mask = dataset.constant_mask
    if not mask.all() and np.any(importances.weights[mask] > 0):
        raise ConfigurationError("constant features must carry zero importance")
    e_param = config.e_param
    if e_param is None:
        e_param = dataset.n_samples / dataset.n_features

    state = _BuildState(dataset, importances, config, float(e_param))
    root = _grow(state, Partition.root(dataset), 0, 0, None)
    root, n_leaves = _number_leaves(root)
    logger.debug("built tree with %d leaves (%d collapses)", n_leaves, state.n_collapses)

    tree = FsptTree(
        root=root,
        lower=tuple(float(v) for v in dataset.lower),
        upper=tuple(float(v) for v in dataset.upper),
        importances=tuple(float(w) for w in importances.weights),
        config=config,
        e_param=float(e_param),
        n_samples=dataset.n_samples,
        n_features=dataset.n_features,
        feature_names=tuple(dataset.feature_names),
    )
    return normalize_scores(tree)
