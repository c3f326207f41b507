"""Classify exam questions and learning outcomes into the six cognitive
levels of Bloom's taxonomy.

Two paths share one evaluation kit: a classical pipeline (normalize,
augment, featurize, balance, train and select a model) and a zero-shot
harness that asks an LLM provider for the level directly.
"""

__version__ = "0.1.0"

from .corpus import (
    CODE_TO_LABEL,
    LABEL_TO_CODE,
    LABELS,
    LabeledSentence,
    PreppedItem,
    generate_synthetic,
    load_csv,
    save_csv,
    split_train_test,
)
from .errors import (
    BloomclfError,
    ConfigError,
    DataFormatError,
    DegenerateClassError,
    EmptyCorpusError,
    FingerprintMismatch,
    ProviderError,
)
from .seeds import derive_seed
from .textprep import load_lemmas, load_stopwords, normalize, prep_corpus

__all__ = [
    "__version__",
    "LABELS",
    "LABEL_TO_CODE",
    "CODE_TO_LABEL",
    "LabeledSentence",
    "PreppedItem",
    "generate_synthetic",
    "load_csv",
    "save_csv",
    "split_train_test",
    "BloomclfError",
    "ConfigError",
    "DataFormatError",
    "DegenerateClassError",
    "EmptyCorpusError",
    "FingerprintMismatch",
    "ProviderError",
    "derive_seed",
    "load_lemmas",
    "load_stopwords",
    "normalize",
    "prep_corpus",
]
