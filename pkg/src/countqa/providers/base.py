"""Provider contracts.

Every model-backed function the pipeline needs is expressed as a small
protocol, so a deterministic lexical stub, a remote model server, and a
replay cache are interchangeable. Exactly one implementation is bound per
kind per run. Implementations must be safe for concurrent calls.

A provider signals trouble by raising ProviderError; returning None from
predict_span means "no span here", which is an answer, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Protocol, runtime_checkable


class ProviderError(RuntimeError):
    """Transport failure, bad response, or provider-side fault."""


class ProviderKind(Enum):
    SPAN_PREDICTOR = "span_predictor"
    SIMILARITY = "similarity"
    ENTITY_RECOGNIZER = "entity_recognizer"
    ENTAILMENT = "entailment"
    POS_TAGGER = "pos_tagger"


@dataclass(frozen=True)
class ProviderDescriptor:
    """Identifies one bound implementation, for health listings and logs."""

    kind: ProviderKind
    name: str
    endpoint: Optional[str] = None


class SpanPrediction(NamedTuple):
    """An extractive answer span and the model's confidence in it."""

    text: str
    confidence: float


class TaggedToken(NamedTuple):
    """A token with character offsets and a coarse part-of-speech tag.

    Tags: NOUN, PROPN, ADJ, VERB, NUM, AUX, FUNC, OTHER.
    """

    text: str
    start: int
    end: int
    tag: str


@runtime_checkable
class SpanPredictor(Protocol):
    def predict_span(self, query: str, segment_text: str) -> Optional[SpanPrediction]:
        """Best answer span in the segment, or None when nothing qualifies.

        The returned text must be a contiguous substring of segment_text and
        the confidence must lie in [0, 1].
        """
        ...


@runtime_checkable
class SimilarityScorer(Protocol):
    def similarity(self, a: str, b: str) -> float:
        """Symmetric semantic similarity in [-1, 1]; similarity(x, x) = 1."""
        ...


@runtime_checkable
class EntityRecognizer(Protocol):
    def recognize_entities(self, text: str) -> list[str]:
        """Entity mention surface forms in reading order; may be empty."""
        ...


@runtime_checkable
class EntailmentScorer(Protocol):
    def entail(self, premise: str, hypothesis: str) -> float:
        """Probability in [0, 1] that the premise entails the hypothesis."""
        ...


@runtime_checkable
class PosTagger(Protocol):
    def tag(self, text: str) -> list[TaggedToken]:
        """Coarse part-of-speech tags for every token, in order."""
        ...
