"""Command line entry point: ``fspt {fit,score,reject-eval,importance}``.

Exit status is 0 on success, 1 for input errors and 2 for configuration
errors (including bad flags).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import persistence
from .builder import build
from .core import (
    ConfigurationError,
    FeatureImportances,
    FsptConfig,
    InputError,
    load_dataset,
    normalize_importances,
    parse_numeric_rows,
    read_csv,
    resolve_column,
)
from .importance import dump_importances, load_importance_file, permutation_importance
from .reject import CLASSIFICATION, KNNClassifier, KNNRegressor, canonical_task, load_predictions
from .report import DEFAULT_T, DEFAULT_T1, DEFAULT_T2, classification_report, regression_report
from .scoring import lookup_many

logger = logging.getLogger("fspt")

EXIT_OK, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2


def _add_tree_flags(p):
    g = p.add_argument_group("tree construction")
    g.add_argument("--epsilon", type=float, default=0.01)
    g.add_argument("--lambda", dest="lambda_max", type=int, default=3)
    g.add_argument("--lambda-rule", choices=["log2", "fixed"], default="log2")
    g.add_argument("--min-samples", type=int, default=5)
    g.add_argument("--e-param", type=float, default=None)
    g.add_argument("--max-depth", type=int, default=30)


def _add_knn_flags(p, task_required=False):
    p.add_argument("--task", choices=["reg", "clf"], required=task_required, default=None if task_required else "reg")
    p.add_argument("--knn-k", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fspt", description="Feature space partitioning trees")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a tree from a CSV file")
    p.add_argument("train_csv")
    p.add_argument("-o", "--output", required=True, help="tree JSON to write")
    p.add_argument("--label-col", default=None)
    p.add_argument(
        "--importance", default="uniform",
        help="'uniform', 'permutation' (needs --label-col) or a JSON file of feature -> weight",
    )
    p.add_argument("--holdout", type=float, default=0.3)
    _add_knn_flags(p)
    _add_tree_flags(p)

    p = sub.add_parser("score", help="score query rows against a tree")
    p.add_argument("tree")
    p.add_argument("query_csv")
    p.add_argument("--label-col", default=None, help="column to ignore in the query file")
    p.add_argument("--normalized", action="store_true")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("reject-eval", help="threshold sweep of the reject model")
    p.add_argument("tree")
    p.add_argument("test_csv")
    p.add_argument("--label-col", required=True)
    p.add_argument("--predictions", default="knn", help="prediction CSV, 'knn' or 'knn:<k>'")
    p.add_argument("--train", default=None, help="labelled training CSV for the kNN baseline")
    p.add_argument(
        "--thresholds", default=None,
        help="reg: 't,t,...'; clf: 't1,t1,...:t2,t2,...'",
    )
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--csv", default=None, help="write the report CSV here")
    _add_knn_flags(p, task_required=True)

    p = sub.add_parser("importance", help="permutation importance with a kNN baseline")
    p.add_argument("train_csv")
    p.add_argument("--label-col", required=True)
    p.add_argument("--holdout", type=float, default=0.3)
    p.add_argument("-o", "--output", default=None)
    _add_knn_flags(p)
    return parser


def _config(args) -> FsptConfig:
    return FsptConfig(
        epsilon=args.epsilon,
        lambda_max=args.lambda_max,
        lambda_rule=args.lambda_rule,
        min_samples_stop=args.min_samples,
        e_param=args.e_param,
        max_depth=args.max_depth,
    )


def _write(text: str, path, out):
    if path is None:
        out.write(text)
    else:
        Path(path).write_text(text)


def cmd_fit(args, out) -> int:
    config = _config(args)
    ds = load_dataset(args.train_csv, args.label_col)
    source = args.importance
    if source == "uniform":
        imp = FeatureImportances.uniform(ds.constant_mask)
    elif source == "permutation":
        if ds.labels is None:
            raise ConfigurationError("permutation importance needs --label-col")
        imp = permutation_importance(
            ds.features, ds.labels, args.task, args.knn_k, args.seed, args.holdout
        ).importances
    else:
        imp = normalize_importances(load_importance_file(source, ds.feature_names), ds.constant_mask)

    tree = build(ds, imp, config)
    persistence.save_tree(tree, args.output)
    raw = np.array([leaf.raw_score for leaf in tree.leaves()])
    counts, edges = np.histogram(raw, bins=5, range=(0.0, 1.0))
    out.write(f"leaves: {tree.n_leaves}\ndepth: {tree.depth}\n")
    out.write("importances: " + ", ".join(f"{n}={w:.4f}" for n, w in zip(ds.feature_names, imp.weights)) + "\n")
    out.write("leaf raw scores:\n")
    for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
        out.write(f"  [{lo:.1f}, {hi:.1f}{']' if hi == 1.0 else ')'} {c}\n")
    return EXIT_OK


def read_query_matrix(path, tree, label_col=None) -> np.ndarray:
    """Feature matrix of a query CSV, columns aligned to the tree.

    Columns are matched by name when the header contains every tree feature;
    otherwise all columns except ``label_col`` are used positionally.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    header, rows = read_csv(path)
    if not header:
        return np.empty((0, tree.n_features))
    values = parse_numeric_rows(rows, len(header), path) if rows else np.empty((0, len(header)))
    names = list(tree.feature_names)
    if all(n in header for n in names):
        cols = [header.index(n) for n in names]
    else:
        skip = resolve_column(header, label_col, path) if label_col is not None else None
        cols = [j for j in range(len(header)) if j != skip]
        if len(cols) != tree.n_features:
            raise InputError(
                f"{path}: query rows have {len(cols)} feature columns, tree expects {tree.n_features}"
            )
    return values[:, cols]


def cmd_score(args, out) -> int:
    tree = persistence.load_tree(args.tree)
    if Path(args.query_csv).is_file() and not Path(args.query_csv).read_text().strip():
        _write("", args.output, out)
        return EXIT_OK
    X = read_query_matrix(args.query_csv, tree, args.label_col)
    lines = ["leaf_id,phi_f,beyond_bounds"]
    if len(X):
        ids, phi, beyond = lookup_many(tree, X, normalized=args.normalized)
        lines += [f"{i},{p!r},{str(bool(b)).lower()}" for i, p, b in zip(ids, phi.tolist(), beyond)]
    _write("\n".join(lines) + "\n", args.output, out)
    return EXIT_OK


def parse_thresholds(text, task):
    try:
        if task == CLASSIFICATION:
            if text is None:
                return list(DEFAULT_T1), list(DEFAULT_T2)
            left, sep, right = text.partition(":")
            if not sep:
                raise ValueError
            return [float(v) for v in left.split(",")], [float(v) for v in right.split(",")]
        if text is None:
            return list(DEFAULT_T)
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigurationError(f"cannot parse --thresholds {text!r}") from None


def _baseline_predictions(args, task, X_test, n_features):
    source = args.predictions
    k = args.knn_k
    if source.startswith("knn"):
        if source.startswith("knn:"):
            try:
                k = int(source[4:])
            except ValueError:
                raise ConfigurationError(f"bad --predictions {source!r}") from None
        elif source != "knn":
            raise ConfigurationError(f"bad --predictions {source!r}")
        if args.train is None:
            raise ConfigurationError("the kNN baseline needs --train")
        train = load_dataset(args.train, args.label_col)
        if train.n_features != n_features:
            raise InputError(f"training CSV has {train.n_features} features, tree expects {n_features}")
        if task == CLASSIFICATION:
            model = KNNClassifier(k).fit(train.features, train.labels)
            proba = model.predict_proba(X_test)
            return model.classes_[np.argmax(proba, axis=1)], proba.max(axis=1)
        model = KNNRegressor(k).fit(train.features, train.labels)
        return model.predict(X_test), None

    preds = load_predictions(source, task, n_rows=len(X_test))
    values = np.array([p.value for p in preds])
    phi_m = np.array([p.phi_m for p in preds], dtype=float) if task == CLASSIFICATION else None
    return values, phi_m


def cmd_reject_eval(args, out) -> int:
    task = canonical_task(args.task)
    thresholds = parse_thresholds(args.thresholds, task)
    tree = persistence.load_tree(args.tree)
    test = load_dataset(args.test_csv, args.label_col)
    if test.n_features != tree.n_features:
        raise InputError(f"test CSV has {test.n_features} features, tree expects {tree.n_features}")
    _, phi_f, _ = lookup_many(tree, test.features, normalized=args.normalized)
    y_pred, phi_m = _baseline_predictions(args, task, test.features, tree.n_features)

    if task == CLASSIFICATION:
        report = classification_report(phi_f, phi_m, test.labels, y_pred, *thresholds)
    else:
        report = regression_report(phi_f, test.labels, y_pred, thresholds)

    out.write(report.to_table())
    if args.csv is not None:
        Path(args.csv).write_text(report.to_csv())
    else:
        out.write("\n" + report.to_csv())
    return EXIT_OK


def cmd_importance(args, out) -> int:
    ds = load_dataset(args.train_csv, args.label_col)
    result = permutation_importance(ds.features, ds.labels, args.task, args.knn_k, args.seed, args.holdout)
    _write(dump_importances(result.importances, ds.feature_names), args.output, out)
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "score": cmd_score,
    "reject-eval": cmd_reject_eval,
    "importance": cmd_importance,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args, out)
    except ConfigurationError as exc:
        print(f"fspt: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"fspt: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
