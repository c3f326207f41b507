import numpy as np
import pytest

from bloomclf.balance import smote_balance
from bloomclf.errors import DegenerateClassError


def _toy(seed=0, counts=(8, 3, 5), dims=4):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(sum(counts), dims))
    y = np.concatenate([np.full(c, i) for i, c in enumerate(counts)]).astype(np.int64)
    perm = rng.permutation(len(y))
    return X[perm], y[perm]


def test_equalizes_class_counts():
    X, y = _toy()
    Xb, yb = smote_balance(X, y, seed=1)
    _, counts = np.unique(yb, return_counts=True)
    assert (counts == 8).all()


def test_originals_kept_first_untouched():
    X, y = _toy()
    Xb, yb = smote_balance(X, y, seed=1)
    assert np.array_equal(Xb[: len(y)], X)
    assert np.array_equal(yb[: len(y)], y)


def test_synthetic_rows_interpolate_recorded_parents():
    X, y = _toy()
    Xb, yb, trace = smote_balance(X, y, seed=1, return_trace=True)
    assert len(trace) == len(yb) - len(y)
    for row, entry in zip(Xb[len(y):], trace):
        assert y[entry.parent_a] == entry.label
        assert y[entry.parent_b] == entry.label
        assert 0.0 <= entry.u < 1.0
        expected = X[entry.parent_a] + entry.u * (X[entry.parent_b] - X[entry.parent_a])
        assert np.max(np.abs(row - expected)) < 1e-12


def test_neighbor_comes_from_k_nearest():
    X, y = _toy(seed=3, counts=(12, 6))
    k = 3
    _, _, trace = smote_balance(X, y, seed=2, k=k, return_trace=True)
    for entry in trace:
        cls_idx = np.flatnonzero(y == entry.label)
        a_local = X[entry.parent_a]
        dists = np.linalg.norm(X[cls_idx] - a_local, axis=1)
        order = [i for i in np.argsort(dists, kind="stable") if cls_idx[i] != entry.parent_a]
        nearest = {int(cls_idx[i]) for i in order[:k]}
        assert entry.parent_b in nearest


def test_k_capped_by_class_size():
    # class of 2: the only possible neighbor is the other sample
    X = np.array([[0.0], [1.0], [5.0], [6.0], [7.0]])
    y = np.array([0, 0, 1, 1, 1])
    _, _, trace = smote_balance(X, y, seed=4, k=5, return_trace=True)
    for entry in trace:
        assert entry.label == 0
        assert {entry.parent_a, entry.parent_b} == {0, 1}


def test_singleton_class_is_an_error():
    X = np.array([[1.0, 2.0], [0.0, 0.0], [3.0, 3.0], [4.0, 4.0]])
    y = np.array([0, 1, 1, 1])
    with pytest.raises(DegenerateClassError):
        smote_balance(X, y, seed=5)


def test_balanced_input_is_unchanged():
    X, y = _toy(counts=(4, 4, 4))
    Xb, yb = smote_balance(X, y, seed=6)
    assert np.array_equal(Xb, X)
    assert np.array_equal(yb, y)
    assert Xb is not X  # still a defensive copy


def test_deterministic():
    X, y = _toy()
    a = smote_balance(X, y, seed=7)
    b = smote_balance(X, y, seed=7)
    c = smote_balance(X, y, seed=8)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not np.array_equal(a[0], c[0])


def test_trace_off_by_default():
    X, y = _toy()
    out = smote_balance(X, y, seed=9)
    assert len(out) == 2
