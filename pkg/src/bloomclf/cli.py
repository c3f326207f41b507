"""Command line interface.

Subcommands: run (train and evaluate), zeroshot (LLM harness), gensynth
(write a synthetic corpus), inspect (describe a model artifact), metrics
(rescore saved verdicts). Exit codes: 0 success, 2 configuration error,
3 data error, 4 provider error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .config import load_config
from .corpus import LABEL_TO_CODE, LABELS, generate_synthetic, load_csv, save_csv
from .errors import (
    ConfigError,
    DataFormatError,
    DegenerateClassError,
    EmptyCorpusError,
    ProviderError,
)
from .llm import (
    Verdict,
    classify_zero_shot,
    load_prompt_template,
    make_provider,
    score_verdicts,
    template_fingerprint,
)
from .models import class_feature_weights, load_artifact
from .pipeline import run_pipeline
from .report import write_run_outputs, write_zeroshot_outputs


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--input", help="labeled corpus CSV with Sentence,Label columns")
    group.add_argument(
        "--synthetic",
        type=int,
        metavar="N",
        help="generate a synthetic corpus with N sentences per level",
    )


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, default=None, help="root random seed")


def _load_items(args, cfg):
    if args.input is not None:
        items, dropped = load_csv(args.input)
        digest = hashlib.sha256(Path(args.input).read_bytes()).hexdigest()
        return items, dropped, str(args.input), {str(args.input): digest}
    items = generate_synthetic(args.synthetic, cfg.seed)
    source = f"synthetic(per_class={args.synthetic}, seed={cfg.seed})"
    return items, 0, source, {}


def cmd_run(args) -> int:
    overrides = {
        "seed": args.seed,
        "models": args.models,
        "test_frac": args.test_frac,
        "augment": args.augment,
        "use_smote": args.smote,
        "include_pos": args.include_pos,
        "augment_rate": args.augment_rate,
        "selection_metric": args.metric,
        "cv_folds": args.folds,
    }
    cfg = load_config(args.config, overrides)
    cfg.validate()
    items, _, source, input_hashes = _load_items(args, cfg)
    result = run_pipeline(items, cfg)
    write_run_outputs(args.outdir, cfg, result, source, input_hashes)
    for mr in result.models:
        print(
            f"{mr.model_type}: test accuracy {mr.test_metrics.accuracy:.4f}, "
            f"macro F1 {mr.test_metrics.macro_f1:.4f} "
            f"(best: {mr.best_hyperparams})"
        )
    print(f"outputs written to {args.outdir}")
    return 0


def cmd_zeroshot(args) -> int:
    overrides = {
        "seed": args.seed,
        "provider": args.provider,
        "concurrency": args.concurrency,
    }
    cfg = load_config(args.config, overrides)
    cfg.validate(require_seed=args.synthetic is not None)
    items, _, source, input_hashes = _load_items(args, cfg)
    # comma-separated provider names run back to back, reported name-sorted
    names = sorted(dict.fromkeys(p.strip() for p in cfg.provider.split(",") if p.strip()))
    if not names:
        raise ConfigError("provider must name at least one provider")
    template = load_prompt_template((cfg.resources or {}).get("prompt"))
    texts = [it.text for it in items]
    labels = [it.label for it in items]
    runs = []
    for name in names:
        provider = make_provider(name, cfg.provider_settings)
        verdicts = classify_zero_shot(texts, provider, template, cfg.concurrency)
        runs.append((name, verdicts, score_verdicts(labels, verdicts)))
    write_zeroshot_outputs(
        args.outdir, cfg, runs, source, input_hashes,
        prompt_sha256=template_fingerprint(template),
    )
    for name, _, scores in runs:
        headline = scores["headline"]
        print(
            f"{name}: accuracy {headline['accuracy']:.4f}, "
            f"macro F1 {headline['macro_f1']:.4f}, "
            f"parse failures {scores['parse_failures']}/{headline['count']}"
        )
    print(f"outputs written to {args.outdir}")
    return 0


def cmd_gensynth(args) -> int:
    items = generate_synthetic(args.n, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(items, args.out)
    print(f"wrote {len(items)} sentences ({args.n} per level) to {args.out}")
    return 0


def cmd_inspect(args) -> int:
    artifact = load_artifact(args.artifact)
    arrays = {}
    for name in vars(artifact.params):
        arrays[name] = list(getattr(artifact.params, name).shape)
    weights = class_feature_weights(artifact)
    names = artifact.vocab.feature_names()
    k = min(10, weights.shape[1])
    top_features = {}
    for c, label in enumerate(artifact.labels):
        order = np.argsort(-weights[c], kind="stable")[:k]
        top_features[label] = [
            [names[j], round(float(weights[c, j]), 4)] for j in order
        ]
    doc = {
        "model_type": artifact.model_type,
        "hyperparams": artifact.hyperparams,
        "labels": list(artifact.labels),
        "vocabulary": {
            "size": len(artifact.vocab.tokens),
            "dim": artifact.vocab.dim,
            "include_pos": artifact.vocab.include_pos,
            "fingerprint": artifact.vocab.fingerprint,
        },
        "arrays": arrays,
        "top_features": top_features,
    }
    print(json.dumps(doc, indent=2, sort_keys=True))
    return 0


def _read_verdicts(path: str | Path) -> list[Verdict]:
    verdicts = []
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            try:
                parsed_name = doc["parsed"]
                parsed = None if parsed_name is None else LABEL_TO_CODE[parsed_name.lower()]
                verdicts.append(
                    Verdict(
                        id=int(doc["id"]),
                        raw=str(doc["raw"]),
                        parsed=parsed,
                        latency_ms=float(doc["latency_ms"]),
                        attempts=int(doc["attempts"]),
                    )
                )
            except (KeyError, AttributeError, ValueError) as exc:
                raise DataFormatError(f"{path}:{lineno}: bad verdict record: {exc}") from exc
    verdicts.sort(key=lambda v: v.id)
    return verdicts


def cmd_metrics(args) -> int:
    items, _ = load_csv(args.corpus)
    verdicts = _read_verdicts(args.verdicts)
    if len(verdicts) != len(items):
        raise DataFormatError(
            f"{len(verdicts)} verdicts for {len(items)} corpus items; they must align"
        )
    scores = score_verdicts([it.label for it in items], verdicts)
    text = json.dumps(scores, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"metrics written to {args.out}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bloomclf",
        description=(
            "Classify exam questions and learning outcomes into six "
            "cognitive levels; train classical models or query an LLM "
            "provider zero-shot."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train, select, and evaluate classifiers")
    _add_corpus_args(p)
    _add_config_args(p)
    p.add_argument("--outdir", default="out", help="output directory (default: out)")
    p.add_argument("--models", help="comma-separated subset of nb,lr,svm")
    p.add_argument("--test-frac", type=float, default=None, dest="test_frac")
    p.add_argument("--augment", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--smote", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument(
        "--include-pos",
        action=argparse.BooleanOptionalAction,
        default=None,
        dest="include_pos",
    )
    p.add_argument("--augment-rate", type=float, default=None, dest="augment_rate")
    p.add_argument("--metric", help="selection metric, e.g. accuracy or macro_f1")
    p.add_argument("--folds", type=int, default=None, help="cross-validation folds")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("zeroshot", help="classify through an LLM provider")
    _add_corpus_args(p)
    _add_config_args(p)
    p.add_argument("--outdir", default="out", help="output directory (default: out)")
    p.add_argument(
        "--provider",
        help="provider name: mock:verbs, mock:unparseable, or http",
    )
    p.add_argument("--concurrency", type=int, default=None)
    p.set_defaults(func=cmd_zeroshot)

    p = sub.add_parser("gensynth", help="write a synthetic labeled corpus CSV")
    p.add_argument("n", type=int, help="sentences per level")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, default=Path("synthetic.csv"), help="output CSV path")
    p.set_defaults(func=cmd_gensynth)

    p = sub.add_parser("inspect", help="describe a saved model artifact")
    p.add_argument("artifact", help="path to a model .json artifact")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("metrics", help="rescore saved zero-shot verdicts")
    p.add_argument("--corpus", required=True, help="labeled corpus CSV")
    p.add_argument("--verdicts", required=True, help="verdicts.jsonl from a zeroshot run")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_metrics)

    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    # one JSON object on stderr so callers can parse failures
    print(json.dumps({"error": kind, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail("config", exc, 2)
    except (DataFormatError, DegenerateClassError, EmptyCorpusError, OSError) as exc:
        return _fail("data", exc, 3)
    except ProviderError as exc:
        return _fail("provider", exc, 4)


if __name__ == "__main__":
    sys.exit(main())
