"""Seeded synthetic layouts shared by the unit and acceptance tests."""

import numpy as np


def gap_1d(seed=0):
    """40 samples on [0, 5] and 10 on (10, 15]: nothing in between."""
    rng = np.random.default_rng(seed)
    x = np.r_[rng.uniform(0, 5, 40), rng.uniform(10, 15, 10)]
    return x.reshape(-1, 1)


def two_clusters(seed=3, n=150):
    """Two uniform square clusters in [0, 10]^2 leaving the corners empty."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(2, 4, (n, 2))
    b = rng.uniform(6, 8, (n, 2))
    # pin the global box so the empty corners exist
    corners = np.array([[0.0, 0.0], [10.0, 10.0]])
    return np.vstack([a, b, corners])


def opposite_quadrants(m=40, side=0.4):
    """Regular lattices on [0, side]^2 and [1-side, 1]^2.

    Both marginals are nearly uniform, so the best root split gains little;
    each half then separates a dense block from empty space.
    """
    g = np.linspace(0, side, m)
    block = np.array([(a, b) for a in g for b in g])
    return np.vstack([block, block + (1 - side)])


def shifted_regression(seed=7):
    """Dense training on [0, 5], a trickle on [5, 10]; tests cover [0, 10]."""
    rng = np.random.default_rng(seed)
    x_train = np.r_[rng.uniform(0, 5, 150), rng.uniform(5, 10, 8)]
    y_train = np.sin(2 * x_train) + rng.normal(0, 0.05, len(x_train))
    x_test = rng.uniform(0, 10, 300)
    y_test = np.sin(2 * x_test)
    return x_train.reshape(-1, 1), y_train, x_test.reshape(-1, 1), y_test


def _wavy_label(X):
    x1, x2 = X[:, 0], X[:, 1]
    boundary = np.where(x1 <= 4, 5.0, 5 + 3 * np.sin(1.5 * (x1 - 4)))
    return (x2 > boundary).astype(int)


def coverage_gap_classification(seed=5):
    """Dense left block, sparse right block with a boundary the sparse data cannot resolve."""
    rng = np.random.default_rng(seed)
    dense = np.c_[rng.uniform(0, 4, 400), rng.uniform(0, 10, 400)]
    sparse = np.c_[rng.uniform(4, 10, 25), rng.uniform(0, 10, 25)]
    X_train = np.vstack([dense, sparse])
    X_test = rng.uniform(0, 10, (600, 2))
    return X_train, _wavy_label(X_train), X_test, _wavy_label(X_test)
