"""Personalized web api recommendation.

Thin wrapper over the C++ core: corpus handling, the preprocessing pipeline,
pairwise ranking model training, recommendation, and ranking metrics.
"""

from ._core import (
    Corpus,
    Model,
    average_precision,
    build_document,
    clean,
    evaluate,
    hit_at_n,
    keyword_similarity,
    load_corpus,
    load_model,
    porter_stem,
    reciprocal_rank,
    remove_stopwords,
    scrub_api_mentions,
    tokenize,
    train,
)

__all__ = [
    "Corpus",
    "Model",
    "average_precision",
    "build_document",
    "clean",
    "evaluate",
    "hit_at_n",
    "keyword_similarity",
    "load_corpus",
    "load_model",
    "porter_stem",
    "reciprocal_rank",
    "remove_stopwords",
    "scrub_api_mentions",
    "tokenize",
    "train",
]
