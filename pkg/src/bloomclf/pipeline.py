"""End-to-end training pipeline: preprocess, augment, featurize, balance,
grid-search, final fit, evaluate."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .augment import AugmentResult, augment_corpus, load_synonyms
from .balance import smote_balance
from .config import RunConfig
from .corpus import LabeledSentence, split_train_test
from .evalkit import (
    FitDiagnostics,
    GridCell,
    GridResult,
    MetricsReport,
    compute_metrics,
    fit_diagnostics,
    grid_search,
)
from .features import Vocabulary, build_vocab, load_pos_lexicon, vectorize_corpus
from .models import ModelArtifact, fit_model, predict_model
from .seeds import derive_seed
from .textprep import load_lemmas, load_stopwords, prep_corpus

GRID_PARAM_KEYS = {"nb": "alpha", "lr": "l2", "svm": "lam"}


@dataclass
class ModelRunResult:
    """Everything the report needs about one trained model."""

    model_type: str
    grid: GridResult
    best_hyperparams: dict
    test_metrics: MetricsReport
    diagnostics: FitDiagnostics
    artifact: ModelArtifact
    y_test: np.ndarray
    y_test_pred: np.ndarray


@dataclass
class RunResult:
    """Outcome of a full pipeline run."""

    models: list[ModelRunResult]
    vocab: Vocabulary
    n_items: int
    n_dropped_prep: int
    n_train: int
    n_test: int
    n_augmented: int
    augment_shortfall: int
    timings: dict


def build_grid_cells(cfg: RunConfig, model_type: str) -> list[GridCell]:
    """Expand a model's hyperparameter grid into cells, folding in the
    fixed training settings that are not searched over."""
    grid = cfg.grids.get(model_type) or {}
    fixed: dict[str, float] = {}
    if model_type == "lr":
        fixed = {"epochs": cfg.lr_epochs, "learning_rate": cfg.lr_learning_rate}
    elif model_type == "svm":
        fixed = {"passes": cfg.svm_passes}
    keys = sorted(grid)
    cells: list[GridCell] = []

    def expand(i: int, chosen: dict) -> None:
        if i == len(keys):
            cells.append(GridCell.make(model_type, {**fixed, **chosen}))
            return
        for value in grid[keys[i]]:
            expand(i + 1, {**chosen, keys[i]: value})

    expand(0, {})
    if not cells:
        cells.append(GridCell.make(model_type, dict(fixed)))
    return cells


def run_pipeline(items: Sequence[LabeledSentence], cfg: RunConfig) -> RunResult:
    """Run the full training pipeline on a labeled corpus."""
    assert cfg.seed is not None
    timings: dict[str, float] = {}
    resources = cfg.resources or {}
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    stopwords = load_stopwords(resources.get("stopwords"))
    lemmas = load_lemmas(resources.get("lemmas"))
    pos_lexicon = load_pos_lexicon(resources.get("pos_lexicon")) if cfg.include_pos else None
    prepped, dropped = prep_corpus(items, lemmas, stopwords)
    timings["preprocess_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    train, test = split_train_test(prepped, cfg.test_frac, cfg.seed)
    if cfg.augment:
        synonyms = load_synonyms(resources.get("synonyms"))
        aug = augment_corpus(
            train, synonyms, stopwords, rate=cfg.augment_rate, seed=cfg.seed
        )
    else:
        aug = AugmentResult(items=list(train), sources=[], shortfall=0)
    timings["augment_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    vocab = build_vocab(aug.items, include_pos=cfg.include_pos)
    X_train, y_train = vectorize_corpus(aug.items, vocab, pos_lexicon)
    X_test, y_test = vectorize_corpus(test, vocab, pos_lexicon)
    n_original = len(train)
    origin_ids = np.concatenate(
        [np.arange(n_original, dtype=np.int64), np.asarray(aug.sources, dtype=np.int64)]
    )
    timings["vectorize_s"] = time.perf_counter() - t0

    results: list[ModelRunResult] = []
    for model_type in cfg.models:
        t0 = time.perf_counter()
        cells = build_grid_cells(cfg, model_type)
        grid = grid_search(
            X_train,
            y_train,
            origin_ids,
            n_original,
            cells,
            k=cfg.cv_folds,
            seed=derive_seed(cfg.seed, f"grid:{model_type}"),
            metric=cfg.selection_metric,
            use_smote=cfg.use_smote,
            smote_k=cfg.smote_k,
        )
        timings[f"grid_{model_type}_s"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        best = grid.best.cell.hyperparam_dict()
        final_seed = derive_seed(cfg.seed, f"final:{model_type}")
        X_fit, y_fit = X_train, y_train
        if cfg.use_smote:
            X_fit, y_fit = smote_balance(X_fit, y_fit, seed=final_seed, k=cfg.smote_k)
        params = fit_model(model_type, X_fit, y_fit, best, seed=final_seed)
        y_test_pred = predict_model(model_type, params, X_test)
        y_train_pred = predict_model(model_type, params, X_train)
        test_metrics = compute_metrics(y_test, y_test_pred)
        diagnostics = fit_diagnostics(y_train, y_train_pred, y_test, y_test_pred)
        artifact = ModelArtifact(
            model_type=model_type,
            params=params,
            hyperparams=best,
            vocab=vocab,
        )
        timings[f"fit_{model_type}_s"] = time.perf_counter() - t0
        results.append(
            ModelRunResult(
                model_type=model_type,
                grid=grid,
                best_hyperparams=best,
                test_metrics=test_metrics,
                diagnostics=diagnostics,
                artifact=artifact,
                y_test=y_test,
                y_test_pred=y_test_pred,
            )
        )
    timings["total_s"] = time.perf_counter() - t_start
    return RunResult(
        models=results,
        vocab=vocab,
        n_items=len(prepped),
        n_dropped_prep=dropped,
        n_train=len(train),
        n_test=len(test),
        n_augmented=len(aug.sources),
        augment_shortfall=aug.shortfall,
        timings=timings,
    )
