"""Corpus types, CSV I/O, synthetic generation, and the train/test split."""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DataFormatError, DegenerateClassError, EmptyCorpusError
from .seeds import derive_seed

LABELS: tuple[str, ...] = (
    "Knowledge",
    "Comprehension",
    "Application",
    "Analysis",
    "Synthesis",
    "Evaluation",
)
NUM_CLASSES = len(LABELS)
LABEL_TO_CODE: dict[str, int] = {name.lower(): code for code, name in enumerate(LABELS)}
CODE_TO_LABEL: dict[int, str] = dict(enumerate(LABELS))

DATA_DIR = Path(__file__).resolve().parent / "data"


@dataclass(frozen=True)
class LabeledSentence:
    """A raw sentence with its cognitive-level code (0..5)."""

    text: str
    label: int


@dataclass(frozen=True)
class PreppedItem:
    """A normalized token sequence with its cognitive-level code."""

    tokens: tuple[str, ...]
    label: int


def parse_label(value: str) -> int | None:
    """Parse a label cell: canonical level name or numeric code 0..5.

    Returns None when the cell is not a valid label.
    """
    text = value.strip()
    if not text:
        return None
    low = text.lower()
    if low in LABEL_TO_CODE:
        return LABEL_TO_CODE[low]
    try:
        code = int(text)
    except ValueError:
        return None
    return code if 0 <= code < NUM_CLASSES else None


def load_csv(path: str | Path) -> tuple[list[LabeledSentence], int]:
    """Load a labeled corpus from a CSV file with Sentence and Label columns.

    Header names are matched case-insensitively; extra columns are ignored.
    Rows with an empty sentence are dropped and counted; a row with a
    missing or unrecognized label is a hard error.

    Returns
    -------
    (items, dropped) where dropped counts the discarded rows.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file, expected a header row")
        names = [h.strip().lower() for h in header]
        try:
            sent_col = names.index("sentence")
            label_col = names.index("label")
        except ValueError:
            raise DataFormatError(
                f"{path}: header must contain Sentence and Label columns, got {header!r}"
            )
        items: list[LabeledSentence] = []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) <= max(sent_col, label_col):
                raise DataFormatError(f"{path}: row {lineno} has too few columns: {row!r}")
            raw_label = row[label_col]
            label = parse_label(raw_label)
            if label is None:
                raise DataFormatError(f"{path}: row {lineno} has unknown label {raw_label!r}")
            text = row[sent_col].strip()
            if not text:
                dropped += 1
                continue
            items.append(LabeledSentence(text=text, label=label))
    if not items:
        raise EmptyCorpusError(f"{path}: no usable rows")
    return items, dropped


def save_csv(items: Sequence[LabeledSentence], path: str | Path) -> None:
    """Write a corpus as a two-column CSV with a Sentence,Label header."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Sentence", "Label"])
        for item in items:
            writer.writerow([item.text, LABELS[item.label]])


def load_verb_lexicons(directory: str | Path | None = None) -> dict[int, tuple[str, ...]]:
    """Load the per-level action-verb lists bundled with the package."""
    directory = Path(directory) if directory is not None else DATA_DIR / "verbs"
    lexicons: dict[int, tuple[str, ...]] = {}
    for code, name in enumerate(LABELS):
        path = directory / f"{name.lower()}.txt"
        words = tuple(w for w in path.read_text(encoding="utf-8").split() if w)
        if not words:
            raise DataFormatError(f"{path}: empty verb list")
        lexicons[code] = words
    return lexicons


FILLER_NOUNS: tuple[str, ...] = (
    "concept", "principle", "process", "structure", "mechanism",
    "framework", "theory", "method", "function", "origin",
    "impact", "role", "behavior", "property", "significance",
    "model", "diagram", "equation", "outcome", "notion",
    "pattern", "trend", "factor", "layer", "component",
    "boundary", "variable", "constraint", "pathway", "gradient",
    "threshold", "distribution", "architecture", "hierarchy", "interaction",
    "lifecycle", "workflow", "anomaly", "dynamics", "foundation",
)

TOPICS: tuple[str, ...] = (
    "photosynthesis", "osmosis", "mitosis", "evolution", "gravity",
    "electromagnetism", "thermodynamics", "oxidation", "cellular respiration",
    "inflation", "federalism", "colonialism", "probability", "recursion",
    "encryption", "erosion", "glaciation", "biodiversity", "urbanization",
    "globalization", "the water cycle", "plate tectonics",
    "the French Revolution", "natural selection", "the nitrogen cycle",
    "market equilibrium", "binary search", "supply and demand",
    "neural networks", "the Industrial Revolution", "thermal expansion",
    "chemical bonding", "genetic drift", "enzyme kinetics",
    "orbital mechanics", "wave interference", "acid rain", "food webs",
    "trade deficits", "opportunity cost", "checks and balances",
    "the scientific method", "signal processing", "protein folding",
    "cell division", "heat transfer", "magnetic fields", "sound waves",
)

TAILS: tuple[str, ...] = (
    "in your own words", "for the unit review", "before the next seminar",
    "during the laboratory session", "for the final examination",
    "with reference to the case study", "using the supplied dataset",
    "in a short paragraph", "for the accreditation portfolio",
    "as part of the capstone project", "in the context of the lecture series",
    "for the revision workshop", "for the peer assessment",
    "in the group tutorial", "for the weekly assignment",
    "before the closing plenary",
)

TEMPLATES: tuple[str, ...] = (
    "{verb} the {noun} of {topic}{tail}.",
    "{verb} the {noun} behind {topic}{tail}.",
    "{verb} how {topic} affects the {noun}{tail}.",
)

# chance of pairing two same-level verbs / of appending a tail clause
_SECOND_VERB_P = 0.25
_TAIL_P = 0.4


def generate_synthetic(
    per_class: int,
    seed: int,
    verbs: Mapping[int, Sequence[str]] | None = None,
) -> list[LabeledSentence]:
    """Generate a balanced synthetic corpus of per_class sentences per level.

    Each sentence opens with one action verb characteristic of its level,
    sometimes paired with a second one ("Compare and contrast ..."), as
    real exam stems do. Nouns, topics, and tail clauses come from shared
    label-neutral pools.
    """
    if per_class <= 0:
        raise ValueError("per_class must be positive")
    if verbs is None:
        verbs = load_verb_lexicons()
    rng = random.Random(derive_seed(seed, "gensynth"))
    items: list[LabeledSentence] = []
    for code in range(NUM_CLASSES):
        lexicon = list(verbs[code])
        order = rng.sample(lexicon, len(lexicon))
        for i in range(per_class):
            verb = order[i % len(order)]
            phrase = verb.capitalize()
            if len(lexicon) > 1 and rng.random() < _SECOND_VERB_P:
                second = rng.choice([v for v in lexicon if v != verb])
                phrase = f"{phrase} and {second}"
            tail = " " + rng.choice(TAILS) if rng.random() < _TAIL_P else ""
            sentence = rng.choice(TEMPLATES).format(
                verb=phrase,
                noun=rng.choice(FILLER_NOUNS),
                topic=rng.choice(TOPICS),
                tail=tail,
            )
            items.append(LabeledSentence(text=sentence, label=code))
    return items


def split_train_test(
    items: Sequence[LabeledSentence],
    test_frac: float,
    seed: int,
) -> tuple[list[LabeledSentence], list[LabeledSentence]]:
    """Stratified train/test split.

    Per class, round(test_frac * class_size) items are drawn into the test
    side after a seeded shuffle. Classes are processed in code order, so
    the output is deterministic for a given seed. Every class present must
    have at least two members.
    """
    if not 0.0 < test_frac < 1.0:
        raise ValueError("test_frac must be in (0, 1)")
    rng = random.Random(derive_seed(seed, "split"))
    by_class: dict[int, list[int]] = {}
    for idx, item in enumerate(items):
        by_class.setdefault(item.label, []).append(idx)
    for code, idxs in by_class.items():
        if len(idxs) < 2:
            raise DegenerateClassError(
                f"class {LABELS[code]} has {len(idxs)} member(s), need at least 2 to split"
            )
    train: list[LabeledSentence] = []
    test: list[LabeledSentence] = []
    for code in sorted(by_class):
        idxs = by_class[code][:]
        rng.shuffle(idxs)
        # round half up so 0.2 of 100 is exactly 20
        n_test = int(test_frac * len(idxs) + 0.5)
        for idx in idxs[:n_test]:
            test.append(items[idx])
        for idx in idxs[n_test:]:
            train.append(items[idx])
    return train, test
