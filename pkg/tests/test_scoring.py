import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fspt.builder import build
from fspt.core import Dataset, FeatureImportances, FsptConfig, InputError, Leaf, Partition, SplitNode
from fspt.scoring import descend, clamp, leaf_score, lookup, lookup_many, normalize_scores, score_from_counts

from oracles import leaf_regions, reference_leaf_score, region_contains
import synthetic


def _leaf(raw, i=0):
    return Leaf(i, (0.0,), (1.0,), 0, raw, raw, 1)


def _tree_with_leaves(raws):
    base = build(Dataset(np.array([[0.0], [1.0]])))
    node = _leaf(raws[-1], len(raws) - 1)
    for i in range(len(raws) - 2, -1, -1):
        node = SplitNode(0, 0.5, False, _leaf(raws[i], i), node)
    return dataclasses.replace(base, root=node)


class TestLeafScore:
    def test_worked_example(self):
        # d=2, f=(.5,.5), E=50, 50 samples, side ratios (0.5, 1.0)
        ds = Dataset(np.array([[0.0, 0.0], [1.0, 1.0]]))
        part = Partition(np.array([0.0, 0.0]), np.array([0.5, 1.0]), np.arange(50) % 2)
        s = leaf_score(part, FeatureImportances(np.array([0.5, 0.5])), ds.global_bounds, 50.0)
        assert s == pytest.approx(7 / 12, abs=1e-12)
        assert reference_leaf_score(50, (0.5, 1.0), (0.5, 0.5), 50.0) == pytest.approx(7 / 12, abs=1e-12)

    def test_empty_leaf_scores_zero(self):
        assert score_from_counts(0, (1e-9, 1e-9), (0.5, 0.5), 50.0) == 0.0

    def test_tiny_box_scores_one(self):
        assert score_from_counts(10, (1e-9, 1e-9), (0.5, 0.5), 50.0) == pytest.approx(1.0, abs=1e-6)

    def test_zero_weight_feature_ignored(self):
        assert score_from_counts(10, (1.0, 0.0), (1.0, 0.0), 10.0) == pytest.approx(0.5)

    def test_rejects_nonpositive_e(self):
        ds = Dataset(np.array([[0.0], [1.0]]))
        with pytest.raises(ValueError):
            leaf_score(Partition.root(ds), FeatureImportances(np.array([1.0])), ds.global_bounds, 0.0)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(0, 1000),
    st.integers(0, 1000),
    st.lists(st.floats(0, 1), min_size=1, max_size=4),
    st.floats(0.01, 1000),
)
def test_score_monotone_in_samples(n, extra, ratios, e):
    w = np.full(len(ratios), 1 / len(ratios))
    lo = score_from_counts(n, ratios, w, e)
    hi = score_from_counts(n + extra, ratios, w, e)
    assert hi >= lo - 1e-15
    assert 0.0 <= lo <= 1.0 + 1e-12
    assert lo == pytest.approx(reference_leaf_score(n, ratios, w, e), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 1000),
    st.lists(st.floats(0, 1), min_size=1, max_size=4),
    st.integers(0, 3),
    st.floats(0, 1),
)
def test_score_antitone_in_volume(n, ratios, which, grow):
    which %= len(ratios)
    w = np.full(len(ratios), 1 / len(ratios))
    bigger = list(ratios)
    bigger[which] = ratios[which] + (1 - ratios[which]) * grow
    assert score_from_counts(n, bigger, w, 5.0) <= score_from_counts(n, ratios, w, 5.0) + 1e-15


class TestNormalize:
    @pytest.mark.parametrize(
        "raw, expected",
        [([0.2, 0.6], [0.0, 1.0]), ([0.58], [1.0]), ([0.1, 0.3, 0.5], [0.0, 0.5, 1.0]), ([0.4, 0.4], [1.0, 1.0])],
    )
    def test_examples(self, raw, expected):
        tree = normalize_scores(_tree_with_leaves(raw))
        got = [leaf.normalized_score for leaf in tree.leaves()]
        np.testing.assert_allclose(got, expected, atol=1e-12)
        assert [leaf.raw_score for leaf in tree.leaves()] == raw


class TestLookup:
    def setup_method(self):
        self.X = synthetic.gap_1d()
        self.tree = build(Dataset(self.X))

    def test_gap_scores_lower_than_both_sides(self):
        phi = {v: lookup(self.tree, [v]).phi_f for v in (2.5, 7.5, 12.5)}
        assert phi[7.5] < phi[2.5]
        assert phi[7.5] < phi[12.5]

    def test_training_point_lands_in_its_leaf(self):
        regions = dict((leaf.leaf_id, box) for leaf, box in leaf_regions(self.tree))
        for x in self.X:
            res = lookup(self.tree, x)
            assert region_contains(regions[res.leaf_id], x)[0]
            assert not res.beyond_bounds

    def test_outside_point_is_clamped_and_flagged(self):
        lo, hi = self.tree.lower[0], self.tree.upper[0]
        below = lookup(self.tree, [lo - 3.0])
        above = lookup(self.tree, [hi + 3.0])
        assert below.beyond_bounds and above.beyond_bounds
        # routed like a point just inside the box, never into a zero-width slice
        inside_lo = lookup(self.tree, [lo + 1e-9 * (hi - lo)])
        inside_hi = lookup(self.tree, [hi - 1e-9 * (hi - lo)])
        assert below.leaf_id == inside_lo.leaf_id
        assert above.leaf_id == inside_hi.leaf_id
        leaf = self.tree.leaves()[below.leaf_id]
        assert leaf.upper[0] > leaf.lower[0]

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            lookup(self.tree, [1.0, 2.0])
        with pytest.raises(InputError):
            lookup_many(self.tree, np.zeros((3, 2)))

    def test_non_finite_query(self):
        with pytest.raises(InputError):
            lookup(self.tree, [np.nan])

    def test_lookup_many_matches_lookup(self):
        Q = np.linspace(-2, 17, 97).reshape(-1, 1)
        ids, phi, beyond = lookup_many(self.tree, Q, normalized=True)
        for q, i, p, b in zip(Q, ids, phi, beyond):
            assert lookup(self.tree, q, normalized=True) == (i, p, b)

    def test_visits_bounded_by_depth(self):
        rng = np.random.default_rng(0)
        for q in rng.uniform(-1, 16, (500, 1)):
            clipped, side = clamp(self.tree, q)
            leaf, path = descend(self.tree, clipped, side)
            assert len(path) == leaf.depth <= self.tree.depth


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 80), st.integers(1, 3))
def test_leaves_tile_the_box(seed, n, d):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, 1, (n, d)) ** 2
    tree = build(Dataset(X), config=FsptConfig(min_samples_stop=2))
    regions = leaf_regions(tree)
    lo, hi = np.asarray(tree.lower), np.asarray(tree.upper)
    Q = np.vstack([X, lo + (hi - lo) * rng.uniform(size=(300, d))])
    ids, _, _ = lookup_many(tree, Q)
    hits = np.array([region_contains(box, Q) for _, box in regions])
    np.testing.assert_array_equal(hits.sum(axis=0), 1)
    np.testing.assert_array_equal(np.argmax(hits, axis=0), ids)
    assert sum(leaf.n_plus for leaf in tree.leaves()) == n
