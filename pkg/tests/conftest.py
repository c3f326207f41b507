import pytest

from bloomclf.augment import load_synonyms
from bloomclf.corpus import load_verb_lexicons
from bloomclf.features import load_pos_lexicon
from bloomclf.textprep import load_lemmas, load_stopwords


@pytest.fixture(scope="session")
def lemmas():
    return load_lemmas()


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords()


@pytest.fixture(scope="session")
def synonyms():
    return load_synonyms()


@pytest.fixture(scope="session")
def pos_lexicon():
    return load_pos_lexicon()


@pytest.fixture(scope="session")
def verb_lexicons():
    return load_verb_lexicons()
