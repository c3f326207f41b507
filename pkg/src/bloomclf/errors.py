"""Exception types shared across the package."""


class BloomclfError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BloomclfError):
    """Invalid or conflicting run configuration."""


class DataFormatError(BloomclfError):
    """Malformed input file (CSV corpus, TSV resource, config JSON)."""


class EmptyCorpusError(BloomclfError):
    """No usable items remain after loading or preprocessing."""


class DegenerateClassError(BloomclfError):
    """A class is missing or has too few members for a step that needs
    every class populated."""


class EmptyVocabularyError(EmptyCorpusError):
    """No tokens survive vocabulary construction."""


class FingerprintMismatch(BloomclfError):
    """Feature vector does not match the vocabulary a model was trained on."""


class SentenceTooLong(DataFormatError):
    """Sentence exceeds the prompt substitution limit."""


class ProviderError(BloomclfError):
    """LLM provider failed: transport error, auth problem, or retries exhausted."""
