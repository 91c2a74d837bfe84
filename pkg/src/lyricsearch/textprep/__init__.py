"""Text preprocessing: noise removal, normalization, tokenization with
offset preservation, stopword removal, and stemming/lemmatization."""

from .pipeline import (
    ALL_STAGES,
    DEFAULT_NOISE_PATTERNS,
    DEFAULT_STAGES,
    ConfigError,
    PipelineConfig,
    Token,
    TokenStream,
    default_config,
    lemmatize,
    lemmatizing_config,
    lowercase,
    normalize,
    process_query_text,
    remove_noise,
    remove_stopwords,
    run_pipeline,
    stem,
    tokenize,
)
from .resources import default_lemmas, default_stopwords, porter_reference_pairs

__all__ = [
    "ALL_STAGES",
    "DEFAULT_NOISE_PATTERNS",
    "DEFAULT_STAGES",
    "ConfigError",
    "PipelineConfig",
    "Token",
    "TokenStream",
    "default_config",
    "default_lemmas",
    "default_stopwords",
    "lemmatize",
    "lemmatizing_config",
    "lowercase",
    "normalize",
    "porter_reference_pairs",
    "process_query_text",
    "remove_noise",
    "remove_stopwords",
    "run_pipeline",
    "stem",
    "tokenize",
]
