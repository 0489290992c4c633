"""Pluggable model-backed functions: contracts, lexical stubs, remote adapters."""

from .base import (
    EntailmentScorer,
    EntityRecognizer,
    PosTagger,
    ProviderDescriptor,
    ProviderError,
    ProviderKind,
    SimilarityScorer,
    SpanPrediction,
    SpanPredictor,
    TaggedToken,
)
from .cache import ProviderCache
from .lexical import (
    LexicalEntailment,
    LexicalEntityRecognizer,
    LexicalPosTagger,
    LexicalSimilarity,
    LexicalSpanPredictor,
)
from .remote import (
    RemoteEntailment,
    RemoteEntityRecognizer,
    RemotePosTagger,
    RemoteSimilarity,
    RemoteSpanPredictor,
)

__all__ = [
    "EntailmentScorer",
    "EntityRecognizer",
    "PosTagger",
    "ProviderDescriptor",
    "ProviderError",
    "ProviderKind",
    "SimilarityScorer",
    "SpanPrediction",
    "SpanPredictor",
    "TaggedToken",
    "ProviderCache",
    "LexicalEntailment",
    "LexicalEntityRecognizer",
    "LexicalPosTagger",
    "LexicalSimilarity",
    "LexicalSpanPredictor",
    "RemoteEntailment",
    "RemoteEntityRecognizer",
    "RemotePosTagger",
    "RemoteSimilarity",
    "RemoteSpanPredictor",
]
