"""Synonym-replacement augmentation for the training side of a split."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import AbstractSet, Mapping, Sequence

from .corpus import DATA_DIR, PreppedItem
from .errors import DataFormatError
from .seeds import derive_seed


def load_synonyms(path: str | Path | None = None) -> dict[str, tuple[str, ...]]:
    """Load the synonym table from a TSV (word TAB syn1,syn2,...)."""
    path = Path(path) if path is not None else DATA_DIR / "synonyms.tsv"
    table: dict[str, tuple[str, ...]] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise DataFormatError(f"{path}:{lineno}: expected 'word<TAB>syn1,syn2,...'")
            word = parts[0]
            syns = tuple(s for s in parts[1].split(",") if s)
            if not syns:
                raise DataFormatError(f"{path}:{lineno}: no synonyms for {word!r}")
            for tok in (word, *syns):
                if not tok.isalnum() or tok != tok.lower():
                    raise DataFormatError(
                        f"{path}:{lineno}: {tok!r} is not lowercase alphanumeric"
                    )
            if word in table:
                raise DataFormatError(f"{path}:{lineno}: duplicate entry for {word!r}")
            table[word] = syns
    return table


@dataclass(frozen=True)
class AugmentResult:
    """Outcome of augmentation.

    items holds the originals followed by the generated copies, sources
    gives the index of the original each copy was derived from, and
    shortfall counts requested copies that could not be produced.
    """

    items: list[PreppedItem]
    sources: list[int]
    shortfall: int


def eligible_positions(
    tokens: Sequence[str],
    synonyms: Mapping[str, Sequence[str]],
    stopwords: AbstractSet[str],
) -> list[int]:
    """Indices of tokens that may be replaced: longer than three
    characters, not a stopword, and having at least one synonym distinct
    from the token itself.
    """
    positions = []
    for i, tok in enumerate(tokens):
        if len(tok) <= 3 or tok in stopwords:
            continue
        syns = synonyms.get(tok)
        if syns and any(s != tok for s in syns):
            positions.append(i)
    return positions


def augment_corpus(
    items: Sequence[PreppedItem],
    synonyms: Mapping[str, Sequence[str]],
    stopwords: AbstractSet[str],
    rate: float,
    seed: int,
    max_attempts: int = 10,
) -> AugmentResult:
    """Append synonym-replacement copies of randomly drawn items.

    The number of copies requested is round(rate * len(items)). Each copy
    differs from its source in exactly one token position. An attempt
    fails when the drawn item has no eligible token; after max_attempts
    consecutive failures the slot is abandoned and counted as shortfall.
    """
    if rate < 0:
        raise ValueError("rate must be non-negative")
    rng = random.Random(derive_seed(seed, "augment"))
    target = int(rate * len(items) + 0.5)
    out = list(items)
    sources: list[int] = []
    shortfall = 0
    for _ in range(target):
        copy = None
        source = -1
        for _attempt in range(max_attempts):
            source = rng.randrange(len(items))
            item = items[source]
            positions = eligible_positions(item.tokens, synonyms, stopwords)
            if not positions:
                continue
            pos = rng.choice(positions)
            token = item.tokens[pos]
            choices = [s for s in synonyms[token] if s != token]
            replacement = rng.choice(choices)
            tokens = list(item.tokens)
            tokens[pos] = replacement
            copy = PreppedItem(tokens=tuple(tokens), label=item.label)
            break
        if copy is None:
            shortfall += 1
            continue
        out.append(copy)
        sources.append(source)
    return AugmentResult(items=out, sources=sources, shortfall=shortfall)
