"""JSON tree files.

Layout (``format_version`` 1)::

    {"format_version": 1,
     "metadata": {n_samples, n_features, feature_names, global_bounds,
                  config, importances, e_param},
     "root": node}

    internal node: {"feature", "coordinate", "strict", "left", "right"}
    leaf:          {"leaf_id", "bounds", "n_plus", "raw_score",
                    "normalized_score", "depth"}

Floats are written with ``repr`` precision, so loading reproduces every
threshold and score exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import FsptConfig, FsptTree, InputError, Leaf, SplitNode

FORMAT_VERSION = 1


def _node_to_dict(node) -> dict:
    if isinstance(node, Leaf):
        return {
            "leaf_id": node.leaf_id,
            "bounds": [[lo, hi] for lo, hi in zip(node.lower, node.upper)],
            "n_plus": node.n_plus,
            "raw_score": node.raw_score,
            "normalized_score": node.normalized_score,
            "depth": node.depth,
        }
    return {
        "feature": node.feature,
        "coordinate": node.coordinate,
        "strict": node.strict,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d: dict):
    if "leaf_id" in d:
        bounds = d["bounds"]
        return Leaf(
            leaf_id=int(d["leaf_id"]),
            lower=tuple(float(b[0]) for b in bounds),
            upper=tuple(float(b[1]) for b in bounds),
            n_plus=int(d["n_plus"]),
            raw_score=float(d["raw_score"]),
            normalized_score=float(d["normalized_score"]),
            depth=int(d["depth"]),
        )
    return SplitNode(
        feature=int(d["feature"]),
        coordinate=float(d["coordinate"]),
        strict=bool(d["strict"]),
        left=_node_from_dict(d["left"]),
        right=_node_from_dict(d["right"]),
    )


def tree_to_dict(tree: FsptTree) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "metadata": {
            "n_samples": tree.n_samples,
            "n_features": tree.n_features,
            "feature_names": list(tree.feature_names),
            "global_bounds": [[lo, hi] for lo, hi in zip(tree.lower, tree.upper)],
            "config": tree.config.to_dict(),
            "importances": list(tree.importances),
            "e_param": tree.e_param,
        },
        "root": _node_to_dict(tree.root),
    }


def tree_from_dict(doc: dict) -> FsptTree:
    try:
        version = doc["format_version"]
        if version != FORMAT_VERSION:
            raise InputError(f"unsupported tree format_version {version!r}")
        meta = doc["metadata"]
        bounds = meta["global_bounds"]
        return FsptTree(
            root=_node_from_dict(doc["root"]),
            lower=tuple(float(b[0]) for b in bounds),
            upper=tuple(float(b[1]) for b in bounds),
            importances=tuple(float(w) for w in meta["importances"]),
            config=FsptConfig(**meta["config"]),
            e_param=float(meta["e_param"]),
            n_samples=int(meta["n_samples"]),
            n_features=int(meta["n_features"]),
            feature_names=tuple(meta["feature_names"]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed tree document: {exc!r}") from None


def dumps(tree: FsptTree) -> str:
    return json.dumps(tree_to_dict(tree), indent=1) + "\n"


def loads(text: str) -> FsptTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"tree file is not valid JSON: {exc}") from None
    return tree_from_dict(doc)


def save_tree(tree: FsptTree, path) -> None:
    Path(path).write_text(dumps(tree))


def load_tree(path) -> FsptTree:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    return loads(path.read_text())
