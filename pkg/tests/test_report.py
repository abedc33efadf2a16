import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fspt.report import DEFAULT_T, classification_report, regression_report


def test_default_grid():
    assert DEFAULT_T[0] == 0.0 and DEFAULT_T[-1] == 1.0 and len(DEFAULT_T) == 11


def test_regression_t0_covers_everything():
    phi = np.array([0.0, 0.2, 0.4, 0.9])
    y = np.array([1.0, 2.0, 3.0, 4.0])
    yhat = np.array([1.5, 2.0, 2.0, 4.0])
    rows = regression_report(phi, y, yhat).rows
    assert rows[0].accepted == 4
    assert rows[0].mean == pytest.approx(np.mean([0.5, 0.0, 1.0, 0.0]))
    assert rows[0].max == 1.0 and rows[0].min == 0.0
    assert sum(r.bucket_count for r in rows) == 4
    assert math.isnan(rows[-1].mean)  # nothing scores 1.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(-5, 5)), min_size=1, max_size=60))
def test_bucket_counts_sum_to_size(rows):
    phi = np.array([r[0] for r in rows])
    err = np.array([r[1] for r in rows])
    rep = regression_report(phi, err, np.zeros_like(err))
    assert sum(r.bucket_count for r in rep.rows) == len(rows)
    accepted = [r.accepted for r in rep.rows]
    assert accepted == sorted(accepted, reverse=True)


def test_classification_groups_and_nan():
    phi_f = np.array([0.9, 0.2, 0.7, 0.1])
    phi_m = np.array([0.95, 0.99, 0.5, 0.92])
    y = np.array([1, 0, 1, 1])
    yhat = np.array([1, 0, 0, 0])
    rows = classification_report(phi_f, phi_m, y, yhat, [0.9], [0.0, 0.6]).rows
    zero, mid = rows
    assert zero.n_confident == 3
    assert (zero.g1_count, zero.g2_count) == (3, 0)
    assert math.isnan(zero.g2_accuracy) and math.isnan(zero.g2_phi_m)
    assert (mid.g1_count, mid.g2_count) == (1, 2)
    assert mid.g1_accuracy == 1.0 and mid.g2_accuracy == 0.5
    assert mid.g1_proportion + mid.g2_proportion == pytest.approx(1.0)
    assert mid.g2_phi_m == pytest.approx((0.99 + 0.92) / 2)


def test_report_text_prints_nan():
    rep = classification_report([0.5], [0.95], [1], [1], [0.9], [0.0])
    assert "nan" in rep.to_table()
    assert rep.to_csv().splitlines()[1].endswith("nan,nan")


def test_csv_regression_header():
    rep = regression_report([0.5], [1.0], [0.0], [0.0])
    assert rep.to_csv().splitlines()[0] == "threshold,accepted,bucket_count,mean,min,q1,median,q3,max"


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0.5, 1), st.booleans()), min_size=1, max_size=60))
def test_group_accounting(rows):
    phi_f = np.array([r[0] for r in rows])
    phi_m = np.array([r[1] for r in rows])
    correct = np.array([r[2] for r in rows])
    rep = classification_report(phi_f, phi_m, correct.astype(int), np.ones(len(rows), int))
    for r in rep.rows:
        confident = phi_m >= r.t1
        assert r.g1_count == np.count_nonzero(confident & (phi_f >= r.t2))
        assert r.g1_count + r.g2_count == r.n_confident == np.count_nonzero(confident)
        if r.n_confident:
            assert r.g1_proportion + r.g2_proportion == pytest.approx(1.0, abs=1e-12)
