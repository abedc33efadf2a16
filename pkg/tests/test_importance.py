import json

import numpy as np
import pytest

from fspt.core import ConfigurationError, InputError
from fspt.importance import dump_importances, load_importance_file, permutation_importance


def test_informative_feature_wins():
    rng = np.random.default_rng(0)
    X = rng.uniform(0, 1, (200, 2))
    res = permutation_importance(X, X[:, 0].copy(), "reg", seed=0)
    w = res.importances.weights
    assert w[0] > w[1]
    assert not res.fell_back_to_uniform


def test_independent_label_falls_back_to_uniform():
    rng = np.random.default_rng(1)
    X = rng.uniform(0, 1, (200, 3))
    y = rng.integers(0, 2, 200)
    with pytest.warns(UserWarning):
        res = permutation_importance(X, y, "clf", seed=0)
    assert res.fell_back_to_uniform
    np.testing.assert_allclose(res.importances.weights, [1 / 3] * 3)


def test_single_feature():
    rng = np.random.default_rng(2)
    X = rng.uniform(0, 1, (60, 1))
    res = permutation_importance(X, np.sin(6 * X[:, 0]), "reg", seed=3)
    np.testing.assert_array_equal(res.importances.weights, [1.0])


def test_seeded_reproducible():
    rng = np.random.default_rng(4)
    X = rng.uniform(0, 1, (80, 2))
    y = X[:, 0] + 0.1 * X[:, 1]
    a = permutation_importance(X, y, seed=9)
    b = permutation_importance(X, y, seed=9)
    np.testing.assert_array_equal(a.importances.weights, b.importances.weights)


def test_constant_labels_rejected():
    with pytest.raises(ConfigurationError):
        permutation_importance(np.random.default_rng(0).uniform(size=(30, 2)), np.ones(30), "reg")


def test_single_class_rejected():
    with pytest.raises(ConfigurationError):
        permutation_importance(np.random.default_rng(0).uniform(size=(30, 2)), np.zeros(30), "clf")


def test_constant_feature_gets_zero():
    rng = np.random.default_rng(5)
    X = np.c_[rng.uniform(size=100), np.full(100, 3.0)]
    res = permutation_importance(X, 2 * X[:, 0], seed=1)
    assert res.importances.weights[1] == 0.0


def test_importance_file_round_trip(tmp_path):
    from fspt.core import FeatureImportances

    text = dump_importances(FeatureImportances(np.array([0.25, 0.75])), ["a", "b"])
    p = tmp_path / "imp.json"
    p.write_text(text)
    np.testing.assert_array_equal(load_importance_file(p, ["a", "b"]), [0.25, 0.75])


@pytest.mark.parametrize("doc", [{"a": 1}, {"a": 1, "b": 2, "c": 3}, {"a": "x", "b": 1}, [1, 2]])
def test_importance_file_errors(tmp_path, doc):
    p = tmp_path / "imp.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(InputError):
        load_importance_file(p, ["a", "b"])
