"""Evaluation: confusion matrix, per-class and averaged metrics,
stratified cross-validation, grid search, and overfit diagnostics."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .balance import smote_balance
from .corpus import NUM_CLASSES
from .errors import DegenerateClassError
from .models import fit_model, predict_model
from .seeds import derive_seed


def confusion_matrix(
    y_true: Sequence[int] | np.ndarray,
    y_pred: Sequence[int] | np.ndarray,
    n_classes: int = NUM_CLASSES,
) -> np.ndarray:
    """Count matrix with true classes on rows and predictions on columns."""
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have the same length")
    if y_true.size == 0:
        raise ValueError("cannot evaluate empty predictions")
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    zero_division: bool


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: tuple[ClassMetrics, ...]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    micro_precision: float
    micro_recall: float
    micro_f1: float
    confusion: np.ndarray


def _safe_div(num: float, den: float) -> tuple[float, bool]:
    if den == 0:
        return 0.0, True
    return num / den, False


def compute_metrics(
    y_true: Sequence[int] | np.ndarray,
    y_pred: Sequence[int] | np.ndarray,
    n_classes: int = NUM_CLASSES,
) -> MetricsReport:
    """Full metric set for one prediction run.

    Per-class metrics with a zero denominator are reported as 0 and
    flagged. Macro averages run over the union of classes present in
    y_true or y_pred; micro averages pool true/false positives across
    classes.
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    cm = confusion_matrix(y_true, y_pred, n_classes)
    per_class: list[ClassMetrics] = []
    tp_total = fp_total = fn_total = 0
    for c in range(n_classes):
        tp = int(cm[c, c])
        fp = int(cm[:, c].sum()) - tp
        fn = int(cm[c, :].sum()) - tp
        precision, p_zero = _safe_div(tp, tp + fp)
        recall, r_zero = _safe_div(tp, tp + fn)
        f1, f_zero = _safe_div(2 * precision * recall, precision + recall)
        per_class.append(
            ClassMetrics(
                precision=precision,
                recall=recall,
                f1=f1,
                support=int(cm[c, :].sum()),
                zero_division=p_zero or r_zero or f_zero,
            )
        )
        tp_total += tp
        fp_total += fp
        fn_total += fn
    present = sorted(set(y_true.tolist()) | set(y_pred.tolist()))
    macro_p = float(np.mean([per_class[c].precision for c in present]))
    macro_r = float(np.mean([per_class[c].recall for c in present]))
    macro_f1 = float(np.mean([per_class[c].f1 for c in present]))
    micro_p, _ = _safe_div(tp_total, tp_total + fp_total)
    micro_r, _ = _safe_div(tp_total, tp_total + fn_total)
    # pooled-count form: one rounding, so micro F1 == accuracy bit-exactly
    # whenever every prediction assigns exactly one class
    micro_f1, _ = _safe_div(2 * tp_total, 2 * tp_total + fp_total + fn_total)
    accuracy = float(np.trace(cm) / cm.sum())
    return MetricsReport(
        accuracy=accuracy,
        per_class=tuple(per_class),
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_f1=macro_f1,
        micro_precision=micro_p,
        micro_recall=micro_r,
        micro_f1=micro_f1,
        confusion=cm,
    )


METRIC_NAMES = ("accuracy", "macro_f1", "micro_f1", "macro_precision", "macro_recall")


def metric_value(report: MetricsReport, metric: str) -> float:
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown selection metric {metric!r}")
    return float(getattr(report, metric))


def stratified_kfold(
    y: Sequence[int] | np.ndarray,
    k: int,
    seed: int,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Split indices into k folds preserving class ratios.

    Per class, indices are shuffled once and dealt round-robin to folds.
    Returns (train_idx, val_idx) pairs with indices sorted ascending.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    y = np.asarray(y, dtype=np.int64)
    rng = random.Random(derive_seed(seed, "cv"))
    fold_members: list[list[int]] = [[] for _ in range(k)]
    for cls in sorted(set(y.tolist())):
        idxs = np.flatnonzero(y == cls).tolist()
        if len(idxs) < k:
            raise DegenerateClassError(
                f"class {cls} has {len(idxs)} member(s), need at least {k} for {k}-fold CV"
            )
        rng.shuffle(idxs)
        for j, idx in enumerate(idxs):
            fold_members[j % k].append(idx)
    folds = []
    all_idx = set(range(len(y)))
    for members in fold_members:
        val = np.array(sorted(members), dtype=np.int64)
        train = np.array(sorted(all_idx - set(members)), dtype=np.int64)
        folds.append((train, val))
    return folds


@dataclass(frozen=True)
class GridCell:
    model_type: str
    hyperparams: tuple[tuple[str, float], ...]

    @staticmethod
    def make(model_type: str, hyperparams: Mapping[str, float]) -> "GridCell":
        return GridCell(model_type, tuple(sorted(hyperparams.items())))

    def hyperparam_dict(self) -> dict:
        return dict(self.hyperparams)


@dataclass(frozen=True)
class CellScore:
    cell: GridCell
    fold_scores: tuple[float, ...]
    mean_score: float


@dataclass(frozen=True)
class GridResult:
    best: CellScore
    cells: tuple[CellScore, ...]
    metric: str


def grid_search(
    X: np.ndarray,
    y: np.ndarray,
    origin_ids: np.ndarray,
    n_original: int,
    cells: Sequence[GridCell],
    k: int,
    seed: int,
    metric: str = "macro_f1",
    use_smote: bool = True,
    smote_k: int = 5,
) -> GridResult:
    """Cross-validated grid search honoring augmentation provenance.

    Rows 0..n_original-1 must be the original items; later rows are
    augmented copies whose origin_ids point at their source row. Folds
    are stratified over the originals only. A fold's fit side contains
    the out-of-fold originals plus every augmented copy whose source is
    out of fold, so no information from a validation item ever reaches
    the fit side. Validation always scores original items only. When
    use_smote is set the fit side is rebalanced independently per
    (cell, fold) with a seed derived from both indices.

    Ties on the mean score resolve toward the lexicographically smallest
    (model_type, sorted hyperparams) tuple.
    """
    if not cells:
        raise ValueError("grid must contain at least one cell")
    origin_ids = np.asarray(origin_ids, dtype=np.int64)
    if origin_ids.shape[0] != X.shape[0]:
        raise ValueError("origin_ids must align with X rows")
    if not np.array_equal(origin_ids[:n_original], np.arange(n_original)):
        raise ValueError("rows 0..n_original-1 must be the original items")
    folds = stratified_kfold(y[:n_original], k, seed)
    scored: list[CellScore] = []
    for cell_index, cell in enumerate(cells):
        fold_scores = []
        for fold_index, (_, val_idx) in enumerate(folds):
            in_val = np.zeros(n_original, dtype=bool)
            in_val[val_idx] = True
            fit_mask = ~in_val[origin_ids]
            X_fit, y_fit = X[fit_mask], y[fit_mask]
            cell_seed = derive_seed(seed, f"cell:{cell_index}:fold:{fold_index}")
            if use_smote:
                X_fit, y_fit = smote_balance(X_fit, y_fit, seed=cell_seed, k=smote_k)
            params = fit_model(
                cell.model_type, X_fit, y_fit, cell.hyperparam_dict(), seed=cell_seed
            )
            pred = predict_model(cell.model_type, params, X[val_idx])
            report = compute_metrics(y[val_idx], pred)
            fold_scores.append(metric_value(report, metric))
        scored.append(
            CellScore(
                cell=cell,
                fold_scores=tuple(fold_scores),
                mean_score=float(np.mean(fold_scores)),
            )
        )
    best = min(scored, key=lambda s: (-s.mean_score, s.cell.model_type, s.cell.hyperparams))
    return GridResult(best=best, cells=tuple(scored), metric=metric)


@dataclass(frozen=True)
class FitDiagnostics:
    """Train/test accuracy pair and their gap as an overfit signal."""

    train_accuracy: float
    test_accuracy: float
    gap: float


def fit_diagnostics(
    y_train: np.ndarray,
    y_train_pred: np.ndarray,
    y_test: np.ndarray,
    y_test_pred: np.ndarray,
) -> FitDiagnostics:
    train_acc = float(np.mean(np.asarray(y_train) == np.asarray(y_train_pred)))
    test_acc = float(np.mean(np.asarray(y_test) == np.asarray(y_test_pred)))
    return FitDiagnostics(
        train_accuracy=train_acc,
        test_accuracy=test_acc,
        gap=train_acc - test_acc,
    )
