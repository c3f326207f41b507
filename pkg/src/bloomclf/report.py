"""Render run outputs: deterministic JSON metrics, a delimited confusion
matrix, a Markdown report, a confusion heatmap image, and a manifest.

Every file except manifest.json is byte-identical across reruns with the
same inputs: no timestamps, stable key order, stable float repr.
"""

from __future__ import annotations

import hashlib
import json
import platform
import re
import time
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .config import RunConfig
from .corpus import LABELS
from .evalkit import MetricsReport
from .llm import Verdict
from .models import save_artifact
from .pipeline import ModelRunResult, RunResult


def _dump_json(path: Path, doc: dict) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    path.write_text(text, encoding="utf-8")
    return text


def _metrics_block(report: MetricsReport) -> dict:
    return {
        "accuracy": report.accuracy,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "macro_f1": report.macro_f1,
        "micro_precision": report.micro_precision,
        "micro_recall": report.micro_recall,
        "micro_f1": report.micro_f1,
        "per_class": [
            {
                "label": LABELS[c],
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "zero_division": m.zero_division,
            }
            for c, m in enumerate(report.per_class)
        ],
    }


def write_confusion_csv(path: Path, confusion: np.ndarray) -> None:
    lines = ["label," + ",".join(LABELS)]
    for c, name in enumerate(LABELS):
        lines.append(name + "," + ",".join(str(int(v)) for v in confusion[c]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_confusion_png(path: Path, confusion: np.ndarray, title: str) -> None:
    fig, ax = plt.subplots(figsize=(7.2, 6.0))
    im = ax.imshow(confusion, cmap="Blues")
    ax.set_xticks(range(len(LABELS)), LABELS, rotation=45, ha="right")
    ax.set_yticks(range(len(LABELS)), LABELS)
    ax.set_xlabel("Predicted")
    ax.set_ylabel("True")
    ax.set_title(title)
    threshold = confusion.max() / 2 if confusion.max() else 0.5
    for i in range(confusion.shape[0]):
        for j in range(confusion.shape[1]):
            color = "white" if confusion[i, j] > threshold else "black"
            ax.text(j, i, str(int(confusion[i, j])), ha="center", va="center", color=color)
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _fmt(x: float) -> str:
    return f"{x:.4f}"


_MODEL_LONG = {
    "nb": "Naïve Bayes (NB)",
    "lr": "Logistic Regression (LR)",
    "svm": "Support Vector Machine (SVM)",
}
_MODEL_SHORT = {"nb": "NB", "lr": "LR", "svm": "SVM"}

RESULTS_HEADER = "| Model | Accuracy | Precision | Recall | F1-micro | F1-macro |"


def _model_row_name(model_type: str, cfg: RunConfig) -> str:
    mods = []
    if cfg.include_pos:
        mods.append("POS")
    if cfg.augment and cfg.augment_rate > 0:
        mods.append("Augmentation")
    if not mods:
        return _MODEL_LONG[model_type]
    return f"{_MODEL_SHORT[model_type]} w/ {' + '.join(mods)}"


def _results_row(name: str, accuracy, precision, recall, f1_micro, f1_macro) -> str:
    return (
        f"| {name} | {accuracy:.2f} | {precision:.2f} | {recall:.2f} | "
        f"{f1_micro:.2f} | {f1_macro:.2f} |"
    )


def _run_report_md(cfg: RunConfig, result: RunResult) -> str:
    lines = [
        "# Classification run report",
        "",
        "## Corpus",
        "",
        f"- items after preprocessing: {result.n_items} "
        f"(dropped: {result.n_dropped_prep})",
        f"- train/test: {result.n_train}/{result.n_test} "
        f"(test fraction {cfg.test_frac})",
        f"- augmented copies: {result.n_augmented} "
        f"(shortfall: {result.augment_shortfall})",
        f"- vocabulary: {len(result.vocab.tokens)} tokens"
        + (", plus part-of-speech counts" if result.vocab.include_pos else ""),
        f"- class balancing: {'on' if cfg.use_smote else 'off'}",
        "",
        "## Results",
        "",
        RESULTS_HEADER,
        "|---|---|---|---|---|---|",
    ]
    for mr in result.models:
        rep = mr.test_metrics
        lines.append(
            _results_row(
                _model_row_name(mr.model_type, cfg),
                rep.accuracy,
                rep.macro_precision,
                rep.macro_recall,
                rep.micro_f1,
                rep.macro_f1,
            )
        )
    lines.append("")
    for mr in result.models:
        rep = mr.test_metrics
        hp = ", ".join(f"{k}={v}" for k, v in sorted(mr.best_hyperparams.items()))
        lines += [
            f"## Model: {mr.model_type}",
            "",
            f"- best hyperparameters: {hp}",
            f"- cross-validation {mr.grid.metric}: {_fmt(mr.grid.best.mean_score)} "
            f"(fold scores: {', '.join(_fmt(s) for s in mr.grid.best.fold_scores)})",
            f"- train/test accuracy: {_fmt(mr.diagnostics.train_accuracy)}/"
            f"{_fmt(mr.diagnostics.test_accuracy)} (gap {_fmt(mr.diagnostics.gap)})",
            "",
            "| metric | value |",
            "|---|---|",
            f"| accuracy | {_fmt(rep.accuracy)} |",
            f"| macro precision | {_fmt(rep.macro_precision)} |",
            f"| macro recall | {_fmt(rep.macro_recall)} |",
            f"| macro F1 | {_fmt(rep.macro_f1)} |",
            f"| micro F1 | {_fmt(rep.micro_f1)} |",
            "",
            "| class | precision | recall | F1 | support |",
            "|---|---|---|---|---|",
        ]
        for c, m in enumerate(rep.per_class):
            flag = " *" if m.zero_division else ""
            lines.append(
                f"| {LABELS[c]} | {_fmt(m.precision)} | {_fmt(m.recall)} | "
                f"{_fmt(m.f1)}{flag} | {m.support} |"
            )
        if any(m.zero_division for m in rep.per_class):
            lines.append("")
            lines.append("`*` zero denominator reported as 0.")
        lines.append("")
    return "\n".join(lines)


def write_run_outputs(
    outdir: str | Path,
    cfg: RunConfig,
    result: RunResult,
    corpus_source: str,
    input_hashes: Mapping[str, str] | None = None,
) -> list[str]:
    """Write all artifacts of a training run into outdir.

    With a single model the canonical file names are used; with several,
    per-model files carry a _<model> suffix. Returns the file names
    written.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    single = len(result.models) == 1

    def suffixed(stem: str, ext: str, model_type: str) -> str:
        return f"{stem}{ext}" if single else f"{stem}_{model_type}{ext}"

    written: list[str] = []

    config_text = _dump_json(outdir / "config.json", cfg.as_dict())
    written.append("config.json")

    models_doc = {}
    for mr in result.models:
        models_doc[mr.model_type] = {
            "selection_metric": mr.grid.metric,
            "grid": [
                {
                    "hyperparams": s.cell.hyperparam_dict(),
                    "fold_scores": list(s.fold_scores),
                    "mean_score": s.mean_score,
                }
                for s in mr.grid.cells
            ],
            "best_hyperparams": mr.best_hyperparams,
            "test": _metrics_block(mr.test_metrics),
            "diagnostics": {
                "train_accuracy": mr.diagnostics.train_accuracy,
                "test_accuracy": mr.diagnostics.test_accuracy,
                "gap": mr.diagnostics.gap,
            },
        }
    metrics_doc = {
        "corpus": {
            "items": result.n_items,
            "dropped_preprocess": result.n_dropped_prep,
            "train": result.n_train,
            "test": result.n_test,
            "augmented": result.n_augmented,
            "augment_shortfall": result.augment_shortfall,
        },
        "vocabulary": {
            "size": len(result.vocab.tokens),
            "dim": result.vocab.dim,
            "include_pos": result.vocab.include_pos,
            "fingerprint": result.vocab.fingerprint,
        },
        "models": models_doc,
    }
    _dump_json(outdir / "metrics.json", metrics_doc)
    written.append("metrics.json")

    for mr in result.models:
        name = suffixed("confusion", ".csv", mr.model_type)
        write_confusion_csv(outdir / name, mr.test_metrics.confusion)
        written.append(name)
        name = suffixed("confusion", ".png", mr.model_type)
        write_confusion_png(
            outdir / name,
            mr.test_metrics.confusion,
            f"Test confusion ({mr.model_type})",
        )
        written.append(name)
        name = suffixed("model", ".json", mr.model_type)
        save_artifact(mr.artifact, outdir / name)
        written.append(name)
        written.append(suffixed("model", ".bin", mr.model_type))

    (outdir / "report.md").write_text(_run_report_md(cfg, result), encoding="utf-8")
    written.append("report.md")

    manifest = {
        "package_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "corpus_source": corpus_source,
        "config_sha256": hashlib.sha256(config_text.encode("utf-8")).hexdigest(),
        "input_sha256": dict(sorted((input_hashes or {}).items())),
        "timings_s": {k: round(v, 6) for k, v in result.timings.items()},
        "report_s": round(time.perf_counter() - start, 6),
        "files": sorted(set(written)),
    }
    _dump_json(outdir / "manifest.json", manifest)
    written.append("manifest.json")
    return written


ZeroshotRun = tuple[str, Sequence[Verdict], dict]


def _safe_provider_name(name: str) -> str:
    out = re.sub(r"[^a-z0-9]+", "_", name.lower()).strip("_")
    return out or "provider"


def _zeroshot_report_md(runs: Sequence[ZeroshotRun]) -> str:
    lines = [
        "# Zero-shot run report",
        "",
        "## Results",
        "",
        RESULTS_HEADER,
        "|---|---|---|---|---|---|",
    ]
    for name, _, scores in runs:
        h = scores["headline"]
        lines.append(
            _results_row(
                name,
                h["accuracy"],
                h["macro_precision"],
                h["macro_recall"],
                h["micro_f1"],
                h["macro_f1"],
            )
        )
    lines.append("")
    for name, _, scores in runs:
        headline = scores["headline"]
        parseable = scores["parseable_only"]
        lines += [
            f"## Provider: {name}",
            "",
            f"- sentences: {headline['count']}",
            f"- parse failures: {scores['parse_failures']} "
            f"(rate {_fmt(scores['parse_failure_rate'])})",
            "",
            "### Headline metrics (parse failures count against every class)",
            "",
            "| metric | value |",
            "|---|---|",
            f"| accuracy | {_fmt(headline['accuracy'])} |",
            f"| macro precision | {_fmt(headline['macro_precision'])} |",
            f"| macro recall | {_fmt(headline['macro_recall'])} |",
            f"| macro F1 | {_fmt(headline['macro_f1'])} |",
            f"| micro F1 | {_fmt(headline['micro_f1'])} |",
            "",
            "| class | precision | recall | F1 | support |",
            "|---|---|---|---|---|",
        ]
        for m in headline["per_class"]:
            flag = " *" if m["zero_division"] else ""
            lines.append(
                f"| {m['label']} | {_fmt(m['precision'])} | {_fmt(m['recall'])} | "
                f"{_fmt(m['f1'])}{flag} | {m['support']} |"
            )
        lines += [
            "",
            "### Parseable subset",
            "",
            f"- count: {parseable['count']}",
            f"- accuracy: {_fmt(parseable['accuracy'])}",
            f"- macro F1: {_fmt(parseable['macro_f1'])}",
            "",
            "`*` zero denominator reported as 0.",
            "",
        ]
    return "\n".join(lines)


def write_zeroshot_outputs(
    outdir: str | Path,
    cfg: RunConfig,
    runs: Sequence[ZeroshotRun],
    corpus_source: str,
    input_hashes: Mapping[str, str] | None = None,
    prompt_sha256: str | None = None,
) -> list[str]:
    """Write verdicts, scores, and the report for zero-shot runs.

    runs holds (provider name, verdicts, scores) triples; files and table
    rows come out provider-name-sorted. A single run keeps the canonical
    verdicts.jsonl name, several get a _<provider> suffix.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    runs = sorted(runs, key=lambda r: r[0])
    single = len(runs) == 1
    written: list[str] = []

    config_text = _dump_json(outdir / "config.json", cfg.as_dict())
    written.append("config.json")

    for name, verdicts, _ in runs:
        lines = []
        for v in verdicts:
            lines.append(
                json.dumps(
                    {
                        "id": v.id,
                        "raw": v.raw,
                        "parsed": None if v.parsed is None else LABELS[v.parsed],
                        "latency_ms": v.latency_ms,
                        "attempts": v.attempts,
                    },
                    sort_keys=True,
                )
            )
        fname = (
            "verdicts.jsonl"
            if single
            else f"verdicts_{_safe_provider_name(name)}.jsonl"
        )
        (outdir / fname).write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(fname)

    _dump_json(
        outdir / "metrics.json",
        {"providers": {name: scores for name, _, scores in runs}},
    )
    written.append("metrics.json")

    (outdir / "report.md").write_text(_zeroshot_report_md(runs), encoding="utf-8")
    written.append("report.md")

    manifest = {
        "package_version": __version__,
        "python_version": platform.python_version(),
        "corpus_source": corpus_source,
        "config_sha256": hashlib.sha256(config_text.encode("utf-8")).hexdigest(),
        "input_sha256": dict(sorted((input_hashes or {}).items())),
        "prompt_sha256": prompt_sha256,
        "files": sorted(set(written)),
    }
    _dump_json(outdir / "manifest.json", manifest)
    written.append("manifest.json")
    return written
