"""Feature space partitioning trees for reject-option prediction."""

from .builder import adaptive_lambda, build
from .core import (
    ConfigurationError,
    Dataset,
    FeatureImportances,
    FsptConfig,
    FsptError,
    FsptTree,
    InputError,
    Leaf,
    Partition,
    SplitNode,
    ValidationError,
    load_dataset,
    normalize_importances,
)
from .estimators import FeatureSpacePartitioningTree, RejectOptionClassifier, RejectOptionRegressor
from .importance import permutation_importance
from .persistence import load_tree, save_tree
from .reject import (
    KNNClassifier,
    KNNRegressor,
    Prediction,
    RejectPolicy,
    decide_classification,
    decide_regression,
    knn_predict,
    load_predictions,
)
from .scoring import leaf_score, lookup, lookup_many, normalize_scores
from .split import best_split, candidate_splits, gini, weighted_gini

__version__ = "0.1.0"
