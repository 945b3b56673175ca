"""Privacy-policy text metrics, statistics and segmentation."""

from ._core import (
    CharacterStrategy,
    ConfigError,
    CountingConfig,
    DomainError,
    EmbeddingTable,
    Error,
    HyphenationDict,
    PoissonBinomial,
    SentenceStrategy,
    SyllableStrategy,
    TextCounts,
    UndefinedInputError,
    WordStrategy,
    count,
    default_terms,
    gate,
    mentions,
    passive_fraction,
    pearson,
    readability,
    segment,
    spearman,
    split_sentences,
    time_to_read,
    vowel_group_syllables,
    welch,
)

__all__ = [name for name in dir() if not name.startswith("_")]
