"""Bag-of-words count features with an optional part-of-speech count block."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import DATA_DIR, PreppedItem
from .errors import DataFormatError, EmptyVocabularyError

POS_TAGS: tuple[str, ...] = ("NOUN", "VERB", "ADJ", "ADV", "OTHER")

# ordered: first matching suffix wins; lexicon lookup takes precedence
SUFFIX_RULES: tuple[tuple[str, str], ...] = (
    ("ing", "VERB"),
    ("tion", "NOUN"),
    ("sion", "NOUN"),
    ("ment", "NOUN"),
    ("ness", "NOUN"),
    ("ity", "NOUN"),
    ("ance", "NOUN"),
    ("ence", "NOUN"),
    ("ism", "NOUN"),
    ("ly", "ADV"),
    ("ous", "ADJ"),
    ("ful", "ADJ"),
    ("ive", "ADJ"),
    ("able", "ADJ"),
    ("ible", "ADJ"),
    ("ize", "VERB"),
    ("ise", "VERB"),
    ("ate", "VERB"),
    ("fy", "VERB"),
    ("ed", "VERB"),
    ("al", "ADJ"),
    ("ic", "ADJ"),
)


def load_pos_lexicon(path: str | Path | None = None) -> dict[str, str]:
    """Load the word -> tag lexicon from a two-column TSV."""
    path = Path(path) if path is not None else DATA_DIR / "pos_lexicon.tsv"
    lexicon: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise DataFormatError(f"{path}:{lineno}: expected 'word<TAB>TAG'")
            word, tag = parts
            if tag not in POS_TAGS:
                raise DataFormatError(f"{path}:{lineno}: unknown tag {tag!r}")
            if word in lexicon and lexicon[word] != tag:
                raise DataFormatError(f"{path}:{lineno}: conflicting tag for {word!r}")
            lexicon[word] = tag
    return lexicon


def pos_tag(token: str, lexicon: Mapping[str, str]) -> str:
    """Tag a normalized token: lexicon lookup first, then suffix rules,
    OTHER as the fallback."""
    tag = lexicon.get(token)
    if tag is not None:
        return tag
    for suffix, rule_tag in SUFFIX_RULES:
        if token.endswith(suffix) and len(token) > len(suffix) + 1:
            return rule_tag
    return "OTHER"


@dataclass(frozen=True)
class Vocabulary:
    """Lexicographically ordered token index built from training data."""

    tokens: tuple[str, ...]
    include_pos: bool
    fingerprint: int

    @property
    def dim(self) -> int:
        return len(self.tokens) + (len(POS_TAGS) if self.include_pos else 0)

    def index(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.tokens)}

    def feature_names(self) -> list[str]:
        """Column names matching the vector layout, POS counts last."""
        names = list(self.tokens)
        if self.include_pos:
            names += [f"pos:{tag.lower()}" for tag in POS_TAGS]
        return names


def _fingerprint(tokens: Sequence[str], include_pos: bool) -> int:
    payload = "\n".join(tokens) + "\x00" + ("pos" if include_pos else "bow")
    digest = hashlib.blake2b(payload.encode("utf-8"), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def build_vocab(
    items: Sequence[PreppedItem],
    include_pos: bool = False,
    min_df: int = 1,
) -> Vocabulary:
    """Collect training tokens with document frequency >= min_df, sorted."""
    if min_df < 1:
        raise ValueError("min_df must be at least 1")
    df: dict[str, int] = {}
    for item in items:
        for tok in set(item.tokens):
            df[tok] = df.get(tok, 0) + 1
    tokens = tuple(sorted(tok for tok, n in df.items() if n >= min_df))
    if not tokens:
        raise EmptyVocabularyError(
            f"no token appears in at least {min_df} document(s)"
        )
    return Vocabulary(
        tokens=tokens,
        include_pos=include_pos,
        fingerprint=_fingerprint(tokens, include_pos),
    )


@dataclass(frozen=True)
class FeatureVector:
    """A single feature row; fingerprint ties it to the vocabulary that
    produced it (None for hand-built vectors)."""

    values: np.ndarray
    fingerprint: int | None = None


def vectorize_tokens(
    tokens: Sequence[str],
    vocab: Vocabulary,
    pos_lexicon: Mapping[str, str] | None = None,
    index: Mapping[str, int] | None = None,
) -> FeatureVector:
    """Vectorize one token sequence against a fixed vocabulary.

    Out-of-vocabulary tokens contribute nothing to the count block but
    are still counted in the part-of-speech block, which summarizes the
    whole sentence.
    """
    if index is None:
        index = vocab.index()
    row = np.zeros(vocab.dim, dtype=np.float64)
    n_tokens = len(vocab.tokens)
    for tok in tokens:
        col = index.get(tok)
        if col is not None:
            row[col] += 1.0
        if vocab.include_pos:
            if pos_lexicon is None:
                raise ValueError("pos_lexicon required when include_pos is set")
            tag = pos_tag(tok, pos_lexicon)
            row[n_tokens + POS_TAGS.index(tag)] += 1.0
    return FeatureVector(values=row, fingerprint=vocab.fingerprint)


def vectorize_corpus(
    items: Sequence[PreppedItem],
    vocab: Vocabulary,
    pos_lexicon: Mapping[str, str] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorize a corpus into (X, y) arrays of shape [n, dim] and [n]."""
    index = vocab.index()
    X = np.zeros((len(items), vocab.dim), dtype=np.float64)
    y = np.zeros(len(items), dtype=np.int64)
    for i, item in enumerate(items):
        X[i] = vectorize_tokens(item.tokens, vocab, pos_lexicon, index).values
        y[i] = item.label
    return X, y
