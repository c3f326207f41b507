"""Synthetic minority oversampling: equalize class counts by interpolating
between a sample and one of its nearest same-class neighbors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateClassError
from .seeds import derive_seed


@dataclass(frozen=True)
class SmoteTraceEntry:
    """Provenance of one synthetic row: global parent row indices, the
    interpolation coefficient, and the class."""

    parent_a: int
    parent_b: int
    u: float
    label: int


def _neighbor_table(class_rows: np.ndarray, k: int) -> np.ndarray:
    """Indices (within the class) of the k nearest neighbors of each row,
    by Euclidean distance, excluding the row itself. Distance ties are
    broken toward the lower row index via a stable sort.
    """
    n = class_rows.shape[0]
    diffs = class_rows[:, None, :] - class_rows[None, :, :]
    dists = np.sqrt(np.sum(diffs * diffs, axis=2))
    table = np.zeros((n, k), dtype=np.int64)
    for i in range(n):
        order = np.argsort(dists[i], kind="stable")
        order = order[order != i]
        table[i] = order[:k]
    return table


def smote_balance(
    X: np.ndarray,
    y: np.ndarray,
    seed: int,
    k: int = 5,
    return_trace: bool = False,
):
    """Oversample every minority class up to the majority class count.

    Synthetic rows are x + u * (neighbor - x) with u uniform on [0, 1)
    and the neighbor drawn from the k nearest same-class rows; k is
    capped at class_size - 1. Every class must have at least two rows.
    Original rows are kept first, synthetic rows are appended in class
    code order.

    Returns (X_out, y_out) or (X_out, y_out, trace) when return_trace.
    """
    rng = np.random.default_rng(derive_seed(seed, "smote"))
    classes, counts = np.unique(y, return_counts=True)
    for cls, count in zip(classes, counts):
        if int(count) < 2:
            raise DegenerateClassError(
                f"class {int(cls)} has {int(count)} row(s), need at least 2 to oversample"
            )
    target = int(counts.max())
    new_rows: list[np.ndarray] = []
    new_labels: list[int] = []
    trace: list[SmoteTraceEntry] = []
    for cls, count in zip(classes, counts):
        need = target - int(count)
        if need == 0:
            continue
        global_idx = np.flatnonzero(y == cls)
        class_rows = X[global_idx]
        k_eff = min(k, int(count) - 1)
        table = _neighbor_table(class_rows, k_eff)
        for _ in range(need):
            a = int(rng.integers(int(count)))
            b = int(table[a, int(rng.integers(k_eff))])
            u = float(rng.random())
            row = class_rows[a] + u * (class_rows[b] - class_rows[a])
            new_rows.append(row)
            new_labels.append(int(cls))
            trace.append(
                SmoteTraceEntry(
                    parent_a=int(global_idx[a]),
                    parent_b=int(global_idx[b]),
                    u=u,
                    label=int(cls),
                )
            )
    if new_rows:
        X_out = np.vstack([X, np.array(new_rows)])
        y_out = np.concatenate([y, np.array(new_labels, dtype=y.dtype)])
    else:
        X_out = X.copy()
        y_out = y.copy()
    if return_trace:
        return X_out, y_out, trace
    return X_out, y_out
