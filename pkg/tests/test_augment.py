import pytest

from bloomclf.augment import (
    AugmentResult,
    augment_corpus,
    eligible_positions,
    load_synonyms,
)
from bloomclf.corpus import PreppedItem, generate_synthetic, split_train_test
from bloomclf.errors import DataFormatError
from bloomclf.textprep import prep_corpus


def _train_items(per_class=40, seed=11, lemmas=None, stopwords=None):
    items = generate_synthetic(per_class, seed)
    prepped, _ = prep_corpus(items, lemmas, stopwords)
    train, _ = split_train_test(prepped, 0.2, seed)
    return train


class TestEligiblePositions:
    def test_rules(self, stopwords):
        synonyms = {"define": ("state",), "cat": ("kitty",), "same": ("same",)}
        tokens = ("define", "the", "cat", "same", "unknown")
        # "define" qualifies; "the" is a stopword; "cat" is too short;
        # "same" has no distinct synonym; "unknown" has no entry
        assert eligible_positions(tokens, synonyms, stopwords) == [0]

    def test_length_boundary(self, stopwords):
        synonyms = {"abcd": ("wxyz",), "abc": ("xyz",)}
        assert eligible_positions(("abc", "abcd"), synonyms, stopwords) == [1]


class TestAugmentCorpus:
    def test_copies_differ_in_exactly_one_position(self, synonyms, stopwords, lemmas):
        train = _train_items(lemmas=lemmas, stopwords=stopwords)
        res = augment_corpus(train, synonyms, stopwords, rate=0.10, seed=5)
        n = len(train)
        assert res.items[:n] == train
        copies = res.items[n:]
        assert len(copies) == len(res.sources)
        for copy, src in zip(copies, res.sources):
            source = train[src]
            assert copy.label == source.label
            assert len(copy.tokens) == len(source.tokens)
            diffs = [
                (a, b) for a, b in zip(source.tokens, copy.tokens) if a != b
            ]
            assert len(diffs) == 1
            original, replacement = diffs[0]
            assert replacement in synonyms[original]
            assert replacement != original

    def test_count_equals_target_minus_shortfall(self, synonyms, stopwords, lemmas):
        train = _train_items(lemmas=lemmas, stopwords=stopwords)
        res = augment_corpus(train, synonyms, stopwords, rate=0.10, seed=5)
        target = int(0.10 * len(train) + 0.5)
        assert len(res.sources) == target - res.shortfall

    def test_deterministic(self, synonyms, stopwords, lemmas):
        train = _train_items(lemmas=lemmas, stopwords=stopwords)
        a = augment_corpus(train, synonyms, stopwords, rate=0.10, seed=5)
        b = augment_corpus(train, synonyms, stopwords, rate=0.10, seed=5)
        c = augment_corpus(train, synonyms, stopwords, rate=0.10, seed=6)
        assert a == b
        assert a != c

    def test_rate_zero_is_identity(self, synonyms, stopwords, lemmas):
        train = _train_items(lemmas=lemmas, stopwords=stopwords)
        res = augment_corpus(train, synonyms, stopwords, rate=0.0, seed=5)
        assert res == AugmentResult(items=list(train), sources=[], shortfall=0)

    def test_negative_rate_rejected(self, synonyms, stopwords):
        with pytest.raises(ValueError):
            augment_corpus([], synonyms, stopwords, rate=-0.1, seed=0)

    def test_all_slots_shortfall_when_nothing_eligible(self, stopwords):
        items = [PreppedItem(("zzz",), 0)] * 10
        res = augment_corpus(items, {}, stopwords, rate=0.5, seed=1)
        assert res.shortfall == 5
        assert res.sources == []
        assert res.items == items


class TestLoadSynonyms:
    def test_bundled_table(self, synonyms):
        assert synonyms
        for word, syns in synonyms.items():
            assert syns

    def test_rejects_bad_rows(self, tmp_path):
        for bad in ("justone\n", "a\tb\tc\n", "word\t\n", "word\tUpper\n", "dup\tx\ndup\ty\n"):
            p = tmp_path / "syn.tsv"
            p.write_text(bad)
            with pytest.raises(DataFormatError):
                load_synonyms(p)
