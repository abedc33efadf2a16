"""scikit-learn compatible wrappers.

:class:`FeatureSpacePartitioningTree` is a transformer mapping each row to
the score of its partition. The two ``RejectOption*`` meta-estimators pair a
predictor with a tree and abstain where the thresholds are not met.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, MetaEstimatorMixin, RegressorMixin, TransformerMixin, clone
from sklearn.utils.validation import check_is_fitted

from . import persistence
from .builder import build
from .core import ConfigurationError, Dataset, FeatureImportances, FsptConfig, FsptTree, normalize_importances
from .reject import KNNClassifier, KNNRegressor, RejectPolicy, accept_mask
from .scoring import lookup_many
from .validation import check_features, check_importance_vector


class FeatureSpacePartitioningTree(TransformerMixin, BaseEstimator):
    """Partition the feature space and score how well each region is covered.

    Parameters
    ----------
    epsilon : float, default=0.01
        Gains at or below this count as "no structure found".
    lambda_max : int, default=3
        Longest run of low-gain splits that may be kept on a path.
    lambda_rule : {"log2", "fixed"}, default="log2"
        How the run limit shrinks for small nodes.
    min_samples_stop : int, default=5
        Nodes with fewer training rows become leaves.
    e_param : float or None, default=None
        Score smoothing mass; ``None`` means ``n_samples / n_features``.
    max_depth : int, default=30
    feature_importances : array-like of shape (n_features,), "uniform" or None
        Raw nonnegative weights; they are renormalised after zeroing
        constant features.
    normalized : bool, default=False
        Whether :meth:`score_samples` returns min-max normalised scores.

    Attributes
    ----------
    tree_ : FsptTree
    feature_importances_ : ndarray of shape (n_features,)
    n_features_in_ : int
    """

    def __init__(
        self,
        epsilon=0.01,
        lambda_max=3,
        lambda_rule="log2",
        min_samples_stop=5,
        e_param=None,
        max_depth=30,
        feature_importances=None,
        normalized=False,
    ):
        self.epsilon = epsilon
        self.lambda_max = lambda_max
        self.lambda_rule = lambda_rule
        self.min_samples_stop = min_samples_stop
        self.e_param = e_param
        self.max_depth = max_depth
        self.feature_importances = feature_importances
        self.normalized = normalized

    def _config(self) -> FsptConfig:
        return FsptConfig(
            epsilon=self.epsilon,
            lambda_max=self.lambda_max,
            lambda_rule=self.lambda_rule,
            min_samples_stop=self.min_samples_stop,
            e_param=self.e_param,
            max_depth=self.max_depth,
        )

    def fit(self, X, y=None):
        names = getattr(X, "columns", None)
        X = check_features(X)
        dataset = Dataset(X, feature_names=tuple(str(c) for c in names) if names is not None else ())
        raw = self.feature_importances
        if raw is None or (isinstance(raw, str) and raw == "uniform"):
            imp = FeatureImportances.uniform(dataset.constant_mask)
        elif isinstance(raw, FeatureImportances):
            imp = normalize_importances(raw.weights, dataset.constant_mask)
        elif isinstance(raw, str):
            raise ConfigurationError(f"unknown importance setting {raw!r}")
        else:
            imp = normalize_importances(check_importance_vector(raw, dataset.n_features), dataset.constant_mask)
        self._set_tree(build(dataset, imp, self._config()))
        if names is not None:
            self.feature_names_in_ = np.asarray(dataset.feature_names, dtype=object)
        return self

    def _set_tree(self, tree: FsptTree):
        self.tree_ = tree
        self.n_features_in_ = tree.n_features
        self.feature_importances_ = np.asarray(tree.importances)
        self.constant_mask_ = tree.constant_mask
        self.e_param_ = tree.e_param
        self.n_leaves_ = tree.n_leaves
        self.depth_ = tree.depth
        return self

    def _lookup(self, X, normalized=None):
        check_is_fitted(self, "tree_")
        X = check_features(X, self.n_features_in_)
        norm = self.normalized if normalized is None else normalized
        return lookup_many(self.tree_, X, normalized=norm)

    def apply(self, X):
        """Leaf id of each row."""
        return self._lookup(X)[0]

    def score_samples(self, X, normalized=None):
        """Partition score of each row; higher means better covered."""
        return self._lookup(X, normalized)[1]

    def beyond_bounds(self, X):
        """Rows lying outside the training box on at least one feature."""
        return self._lookup(X)[2]

    def transform(self, X):
        return self.score_samples(X).reshape(-1, 1)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["fspt_score"], dtype=object)

    def to_json(self) -> str:
        check_is_fitted(self, "tree_")
        return persistence.dumps(self.tree_)

    def save(self, path):
        check_is_fitted(self, "tree_")
        persistence.save_tree(self.tree_, path)

    @classmethod
    def from_tree(cls, tree: FsptTree, normalized=False) -> "FeatureSpacePartitioningTree":
        cfg = tree.config
        est = cls(
            epsilon=cfg.epsilon,
            lambda_max=cfg.lambda_max,
            lambda_rule=cfg.lambda_rule,
            min_samples_stop=cfg.min_samples_stop,
            e_param=cfg.e_param,
            max_depth=cfg.max_depth,
            feature_importances=np.asarray(tree.importances),
            normalized=normalized,
        )
        return est._set_tree(tree)

    @classmethod
    def load(cls, path, normalized=False) -> "FeatureSpacePartitioningTree":
        return cls.from_tree(persistence.load_tree(path), normalized=normalized)


class RejectOptionRegressor(MetaEstimatorMixin, RegressorMixin, BaseEstimator):
    """Regressor that abstains where the partition score is below ``threshold``.

    ``predict`` returns NaN for rejected rows; :meth:`predict_with_reject`
    returns the raw predictions together with the acceptance mask.
    """

    def __init__(self, estimator=None, fspt=None, threshold=0.5):
        self.estimator = estimator
        self.fspt = fspt
        self.threshold = threshold

    def fit(self, X, y):
        X = check_features(X)
        self.policy_ = RejectPolicy.regression(self.threshold)
        self.estimator_ = clone(self.estimator if self.estimator is not None else KNNRegressor())
        self.estimator_.fit(X, y)
        self.fspt_ = clone(self.fspt if self.fspt is not None else FeatureSpacePartitioningTree())
        self.fspt_.fit(X)
        self.n_features_in_ = X.shape[1]
        return self

    def predict_with_reject(self, X):
        check_is_fitted(self, "estimator_")
        X = check_features(X, self.n_features_in_)
        pred = np.asarray(self.estimator_.predict(X), dtype=float)
        return pred, accept_mask(self.fspt_.score_samples(X), self.policy_)

    def predict(self, X):
        pred, accepted = self.predict_with_reject(X)
        return np.where(accepted, pred, np.nan)


class RejectOptionClassifier(MetaEstimatorMixin, ClassifierMixin, BaseEstimator):
    """Classifier accepting only rows with ``proba >= t1`` and score ``>= t2``.

    Rejected rows are labelled ``fallback_label`` by :meth:`predict`.
    """

    def __init__(self, estimator=None, fspt=None, t1=0.9, t2=0.6, fallback_label=-1):
        self.estimator = estimator
        self.fspt = fspt
        self.t1 = t1
        self.t2 = t2
        self.fallback_label = fallback_label

    def fit(self, X, y):
        X = check_features(X)
        self.policy_ = RejectPolicy.classification(self.t1, self.t2)
        self.estimator_ = clone(self.estimator if self.estimator is not None else KNNClassifier())
        self.estimator_.fit(X, y)
        self.classes_ = self.estimator_.classes_
        self.fspt_ = clone(self.fspt if self.fspt is not None else FeatureSpacePartitioningTree())
        self.fspt_.fit(X)
        self.n_features_in_ = X.shape[1]
        return self

    def predict_with_reject(self, X):
        check_is_fitted(self, "estimator_")
        X = check_features(X, self.n_features_in_)
        proba = self.estimator_.predict_proba(X)
        labels = self.classes_[np.argmax(proba, axis=1)]
        phi_m = proba.max(axis=1)
        return labels, accept_mask(self.fspt_.score_samples(X), self.policy_, phi_m)

    def predict(self, X):
        labels, accepted = self.predict_with_reject(X)
        out = labels.astype(object) if labels.dtype.kind not in "if" else labels.copy()
        out[~accepted] = self.fallback_label
        return out
