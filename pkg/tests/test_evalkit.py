import numpy as np
import pytest

import bloomclf.evalkit as evalkit
from bloomclf.errors import DegenerateClassError
from bloomclf.evalkit import (
    GridCell,
    compute_metrics,
    confusion_matrix,
    fit_diagnostics,
    grid_search,
    metric_value,
    stratified_kfold,
)


class TestConfusion:
    def test_rows_are_true_columns_predicted(self):
        cm = confusion_matrix([0, 0, 1], [0, 2, 1])
        assert cm[0, 0] == 1 and cm[0, 2] == 1 and cm[1, 1] == 1
        assert cm.sum() == 3

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion_matrix([0], [0, 1])

    def test_empty(self):
        with pytest.raises(ValueError):
            confusion_matrix([], [])


class TestComputeMetrics:
    def test_hand_oracle(self):
        # cm: true 0 -> pred (0,1); true 1 -> pred (1,1)
        r = compute_metrics([0, 0, 1, 1], [0, 1, 1, 1])
        assert r.accuracy == 0.75
        c0, c1 = r.per_class[0], r.per_class[1]
        assert (c0.precision, c0.recall) == (1.0, 0.5)
        assert abs(c0.f1 - 2 / 3) <= 1e-12
        assert abs(c1.precision - 2 / 3) <= 1e-12
        assert c1.recall == 1.0
        assert abs(c1.f1 - 0.8) <= 1e-12
        assert (c0.support, c1.support) == (2, 2)
        # macro over the union of present classes {0, 1} only
        assert abs(r.macro_precision - 5 / 6) <= 1e-12
        assert abs(r.macro_recall - 0.75) <= 1e-12
        assert abs(r.macro_f1 - (2 / 3 + 0.8) / 2) <= 1e-12
        assert r.micro_precision == r.micro_recall == 0.75

    def test_micro_f1_equals_accuracy_bit_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = int(rng.integers(1, 200))
            y_true = rng.integers(0, 6, n)
            y_pred = rng.integers(0, 6, n)
            r = compute_metrics(y_true, y_pred)
            assert r.micro_f1 == r.accuracy

    def test_zero_division_reported_as_zero_and_flagged(self):
        r = compute_metrics([0, 0], [0, 0])
        assert r.accuracy == 1.0
        for c in range(1, 6):
            cls = r.per_class[c]
            assert cls.precision == cls.recall == cls.f1 == 0.0
            assert cls.zero_division
            assert cls.support == 0
        assert not r.per_class[0].zero_division
        # absent classes do not drag the macro average down
        assert r.macro_f1 == 1.0

    def test_predicted_only_class_joins_macro_union(self):
        r = compute_metrics([0, 0], [0, 3])
        # class 3 was predicted but never true: recall 0/0, flagged
        assert r.per_class[3].zero_division
        assert r.macro_f1 == (2 / 3 + 0.0) / 2

    def test_metric_value_accessor(self):
        r = compute_metrics([0, 1], [0, 1])
        assert metric_value(r, "accuracy") == 1.0
        with pytest.raises(ValueError):
            metric_value(r, "rmse")


class TestStratifiedKFold:
    def test_balanced_corpus_splits_evenly(self):
        y = np.repeat(np.arange(6), 80)
        folds = stratified_kfold(y, 5, seed=3)
        assert len(folds) == 5
        seen = []
        for train_idx, val_idx in folds:
            assert len(val_idx) == 96
            counts = np.bincount(y[val_idx], minlength=6)
            assert (counts == 16).all()
            assert np.array_equal(np.sort(val_idx), val_idx)
            assert not set(train_idx) & set(val_idx)
            assert len(train_idx) + len(val_idx) == len(y)
            seen.extend(val_idx.tolist())
        assert sorted(seen) == list(range(len(y)))

    def test_uneven_classes_stay_proportional(self):
        y = np.array([0] * 7 + [1] * 5 + [2] * 2)
        folds = stratified_kfold(y, 2, seed=1)
        sizes = sorted(len(v) for _, v in folds)
        assert sum(sizes) == len(y)
        for _, val_idx in folds:
            assert len(set(val_idx)) == len(val_idx)

    def test_deterministic(self):
        y = np.repeat(np.arange(6), 10)
        a = stratified_kfold(y, 5, seed=4)
        b = stratified_kfold(y, 5, seed=4)
        for (ta, va), (tb, vb) in zip(a, b):
            assert np.array_equal(ta, tb) and np.array_equal(va, vb)

    def test_k_below_two_rejected(self):
        with pytest.raises(ValueError):
            stratified_kfold(np.array([0, 1]), 1, seed=0)

    def test_class_smaller_than_k_rejected(self):
        y = np.array([0] * 5 + [1] * 2)
        with pytest.raises(DegenerateClassError):
            stratified_kfold(y, 3, seed=0)


def _provenance_fixture():
    # 12 originals (2 per class), one augmented copy per original.
    # Feature value marks identity: original i -> i, copy of i -> 100 + i.
    n_original = 12
    y_orig = np.repeat(np.arange(6), 2)
    sources = list(range(n_original))
    X = np.array([[float(i)] for i in range(n_original)]
                 + [[100.0 + i] for i in sources])
    y = np.concatenate([y_orig, y_orig[sources]])
    origin_ids = np.concatenate([np.arange(n_original), np.array(sources)])
    return X, y, origin_ids, n_original


class TestGridSearchProvenance:
    def test_augmented_copies_follow_their_source(self, monkeypatch):
        X, y, origin_ids, n_original = _provenance_fixture()
        fit_calls = []
        predict_calls = []
        monkeypatch.setattr(
            evalkit, "fit_model",
            lambda mt, Xf, yf, hp, seed=0: fit_calls.append(Xf[:, 0].copy()),
        )
        monkeypatch.setattr(
            evalkit, "predict_model",
            lambda mt, params, Xv: (
                predict_calls.append(Xv[:, 0].copy()),
                np.zeros(len(Xv), dtype=np.int64),
            )[1],
        )
        seed = 9
        grid_search(
            X, y, origin_ids, n_original,
            [GridCell.make("nb", {"alpha": 1.0})],
            k=2, seed=seed, use_smote=False,
        )
        folds = stratified_kfold(y[:n_original], 2, seed)
        assert len(fit_calls) == len(predict_calls) == 2
        for (train_idx, val_idx), fit_vals, val_vals in zip(
            folds, fit_calls, predict_calls
        ):
            val_set = set(val_idx.tolist())
            expected_fit = {float(i) for i in range(n_original) if i not in val_set}
            expected_fit |= {100.0 + i for i in range(n_original) if i not in val_set}
            assert set(fit_vals.tolist()) == expected_fit
            # validation side is the in-fold originals, never copies
            assert set(val_vals.tolist()) == {float(i) for i in val_set}

    def test_tie_breaks_to_smallest_cell(self, monkeypatch):
        X, y, origin_ids, n_original = _provenance_fixture()
        monkeypatch.setattr(evalkit, "fit_model", lambda *a, **k: None)
        monkeypatch.setattr(
            evalkit, "predict_model",
            lambda mt, params, Xv: np.zeros(len(Xv), dtype=np.int64),
        )
        cells = [
            GridCell.make("svm", {"lam": 1.0}),
            GridCell.make("nb", {"alpha": 9.0}),
            GridCell.make("lr", {"l2": 5.0}),
            GridCell.make("nb", {"alpha": 0.5}),
        ]
        result = grid_search(
            X, y, origin_ids, n_original, cells, k=2, seed=1, use_smote=False
        )
        scores = {c.mean_score for c in result.cells}
        assert len(scores) == 1
        assert result.best.cell == GridCell.make("lr", {"l2": 5.0})

    def test_input_validation(self):
        X, y, origin_ids, n_original = _provenance_fixture()
        cell = [GridCell.make("nb", {"alpha": 1.0})]
        with pytest.raises(ValueError):
            grid_search(X, y, origin_ids[:-1], n_original, cell, k=2, seed=0)
        bad_ids = origin_ids.copy()
        bad_ids[0] = 3
        with pytest.raises(ValueError):
            grid_search(X, y, bad_ids, n_original, cell, k=2, seed=0)
        with pytest.raises(ValueError):
            grid_search(X, y, origin_ids, n_original, [], k=2, seed=0)


class TestGridSearchEndToEnd:
    def test_separable_data_scores_perfectly(self):
        X = np.vstack([np.eye(6)] * 4) * 3.0
        y = np.tile(np.arange(6), 4)
        origin_ids = np.arange(len(y))
        cells = [
            GridCell.make("nb", {"alpha": 0.5}),
            GridCell.make("nb", {"alpha": 1.0}),
        ]
        result = grid_search(
            X, y, origin_ids, len(y), cells, k=2, seed=2, use_smote=False
        )
        assert result.metric == "macro_f1"
        assert result.best.mean_score == 1.0
        assert len(result.cells) == 2
        assert len(result.best.fold_scores) == 2
        # equal scores: alpha 0.5 sorts before 1.0
        assert result.best.cell.hyperparam_dict() == {"alpha": 0.5}


class TestFitDiagnostics:
    def test_gap(self):
        d = fit_diagnostics(
            np.array([0, 1, 2, 3]), np.array([0, 1, 2, 2]),
            np.array([0, 1]), np.array([1, 1]),
        )
        assert d.train_accuracy == 0.75
        assert d.test_accuracy == 0.5
        assert abs(d.gap - 0.25) <= 1e-12

    def test_train_as_test_gap_is_zero(self):
        y = np.array([0, 1, 2])
        pred = np.array([0, 2, 2])
        d = fit_diagnostics(y, pred, y, pred)
        assert abs(d.gap) <= 1e-12
