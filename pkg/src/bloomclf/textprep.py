"""Six-step text normalization: case folding, punctuation stripping,
tokenization, dictionary lemmatization, stopword removal, length filtering.
"""

from __future__ import annotations

from pathlib import Path
from typing import AbstractSet, Mapping, Sequence

from .corpus import DATA_DIR, LabeledSentence, PreppedItem
from .errors import DataFormatError, EmptyCorpusError


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load the stopword list, one word per line."""
    path = Path(path) if path is not None else DATA_DIR / "stopwords.txt"
    words = frozenset(w for w in path.read_text(encoding="utf-8").split() if w)
    if not words:
        raise DataFormatError(f"{path}: empty stopword list")
    return words


def load_lemmas(path: str | Path | None = None) -> dict[str, str]:
    """Load the lemma dictionary from a two-column TSV (form TAB lemma).

    The mapping must be a fixed point: a lemma may not itself map to a
    different lemma, otherwise normalization would not be idempotent.
    All forms and lemmas must be lowercase alphanumeric.
    """
    path = Path(path) if path is not None else DATA_DIR / "lemmas.tsv"
    lemmas: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise DataFormatError(f"{path}:{lineno}: expected 'form<TAB>lemma'")
            form, lemma = parts
            for field in (form, lemma):
                if not field.isalnum() or field != field.lower():
                    raise DataFormatError(
                        f"{path}:{lineno}: {field!r} is not lowercase alphanumeric"
                    )
            if form in lemmas and lemmas[form] != lemma:
                raise DataFormatError(f"{path}:{lineno}: conflicting entry for {form!r}")
            lemmas[form] = lemma
    for form, lemma in lemmas.items():
        if lemmas.get(lemma, lemma) != lemma:
            raise DataFormatError(
                f"{path}: {form!r} -> {lemma!r} is not a fixed point, "
                f"{lemma!r} maps to {lemmas[lemma]!r}"
            )
    return lemmas


def normalize(
    text: str,
    lemmas: Mapping[str, str],
    stopwords: AbstractSet[str],
) -> list[str]:
    """Normalize a sentence to a token list.

    Steps: lowercase, replace non-alphanumeric characters with spaces,
    split on whitespace, lemmatize by dictionary lookup (identity on
    misses), drop tokens whose lemma is a stopword, drop lemmas of
    length 2 or less.
    """
    lowered = text.lower()
    cleaned = "".join(ch if ch.isalnum() else " " for ch in lowered)
    out: list[str] = []
    for token in cleaned.split():
        lemma = lemmas.get(token, token)
        if lemma in stopwords:
            continue
        if len(lemma) <= 2:
            continue
        out.append(lemma)
    return out


def prep_corpus(
    items: Sequence[LabeledSentence],
    lemmas: Mapping[str, str],
    stopwords: AbstractSet[str],
) -> tuple[list[PreppedItem], int]:
    """Normalize a corpus, dropping items that normalize to nothing.

    Returns (prepped, dropped). Raises EmptyCorpusError when no item
    survives.
    """
    prepped: list[PreppedItem] = []
    dropped = 0
    for item in items:
        tokens = normalize(item.text, lemmas, stopwords)
        if not tokens:
            dropped += 1
            continue
        prepped.append(PreppedItem(tokens=tuple(tokens), label=item.label))
    if not prepped:
        raise EmptyCorpusError("no items survived preprocessing")
    return prepped, dropped
