"""Answer explanation: ranked instance evidence for the predicted count.

The count query is rewritten into an enumeration query ("how many" becomes
"which"), answer spans are predicted again under a lower threshold, and an
entity recognizer harvests instance mentions from the surviving spans. The
mentions feed an inverted index (instance -> postings), which four scoring
strategies turn into a ranked instance list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from sklearn.base import BaseEstimator

from .providers.base import (
    EntailmentScorer,
    EntityRecognizer,
    ProviderError,
    SpanPredictor,
)
from .text import covering_sentence_span, normalize_ws
from .types import (
    AnswerSpan,
    CountQuery,
    InstanceStrategy,
    TextSegment,
    parse_instance_strategy,
)

ALL_SEGMENTS_FAILED = "explanation:all_segments_failed"

_HOW_MANY_RE = re.compile(r"how\s+many", re.IGNORECASE)
_POSSESSIVE_RE = re.compile(r"['’]s$")


def rewrite_query(query_text: str) -> str:
    """Turn a count question into an enumeration question.

    The first "how many" (case-insensitive) becomes "which"; a query without
    one gets "which " prepended.
    """
    rewritten, n = _HOW_MANY_RE.subn("which", query_text, count=1)
    if n:
        return rewritten
    return "which " + query_text


def clean_mention(surface: str) -> str:
    """Display form of a mention: collapse whitespace, drop possessive 's."""
    cleaned = _POSSESSIVE_RE.sub("", normalize_ws(surface))
    return cleaned.rstrip("'’")


class InstancePosting(NamedTuple):
    """One occurrence of an instance: the segment and the span it came from."""

    segment_id: str
    span: AnswerSpan


@dataclass(frozen=True)
class InstanceIndex:
    """Inverted index from instance identity to its postings.

    Identity is the casefolded cleaned surface; ``display`` maps it back to
    the first-seen cleaned form. ``segment_mentions`` preserves in-span
    mention order per segment, which NoConsolidation scoring needs. The
    ``spans`` tuple keeps every raw predicted span for provenance,
    including those below the threshold.
    """

    entries: dict[str, tuple[InstancePosting, ...]]
    display: dict[str, str]
    segment_mentions: dict[str, tuple[str, ...]]
    spans: tuple[AnswerSpan, ...]
    num_segments: int
    diagnostics: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "spans", tuple(self.spans))
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

    def instances(self) -> list[str]:
        return list(self.entries)


class ScoredInstance(NamedTuple):
    instance: str
    score: float


@dataclass(frozen=True)
class RankedInstances:
    """Instances with scores in [0,1], best first."""

    items: tuple[ScoredInstance, ...]
    strategy: InstanceStrategy
    diagnostics: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))
        for item in self.items:
            if not 0.0 <= item.score <= 1.0:
                raise ValueError(f"score out of range for {item.instance!r}")


def build_instance_index(
    query_rewritten: str,
    segments: Sequence[TextSegment],
    predictor: SpanPredictor,
    ner: EntityRecognizer,
    theta: float,
) -> InstanceIndex:
    """Predict spans with the rewritten query and index their entity mentions.

    Only spans with confidence above theta contribute mentions. A mention
    appearing twice in one span is posted once for that segment. Provider
    failures skip the segment with a diagnostic.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must be in [0,1], got {theta}")
    entries: dict[str, list[InstancePosting]] = {}
    display: dict[str, str] = {}
    segment_mentions: dict[str, list[str]] = {}
    spans: list[AnswerSpan] = []
    diagnostics: list[str] = []
    failures = 0
    for segment in segments:
        try:
            prediction = predictor.predict_span(query_rewritten, segment.text)
            if prediction is None or not prediction.text.strip():
                continue
            span = AnswerSpan(segment.id, prediction.text, prediction.confidence)
            spans.append(span)
            if span.confidence <= theta:
                continue
            mentions = ner.recognize_entities(span.span)
        except ProviderError as exc:
            failures += 1
            diagnostics.append(f"explanation:segment:{segment.id}:{exc}")
            continue
        seen: set[str] = set()
        for mention in mentions:
            cleaned = clean_mention(mention)
            if not cleaned:
                continue
            key = cleaned.casefold()
            if key in seen:
                continue
            seen.add(key)
            display.setdefault(key, cleaned)
            entries.setdefault(key, []).append(InstancePosting(segment.id, span))
            segment_mentions.setdefault(segment.id, []).append(key)
    if segments and failures == len(segments):
        diagnostics.append(ALL_SEGMENTS_FAILED)
    return InstanceIndex(
        entries={k: tuple(v) for k, v in entries.items()},
        display=display,
        segment_mentions={k: tuple(v) for k, v in segment_mentions.items()},
        spans=tuple(spans),
        num_segments=len(segments),
        diagnostics=tuple(diagnostics),
    )


def _no_consolidation(index: InstanceIndex) -> list[ScoredInstance]:
    """Instances of the segment with the most confident span, mention order."""
    confidence_by_segment: dict[str, float] = {}
    for postings in index.entries.values():
        for posting in postings:
            confidence_by_segment[posting.segment_id] = posting.span.confidence
    best_id = None
    best_confidence = -1.0
    # dict order is insertion order, so ties go to the earlier segment.
    for segment_id in index.segment_mentions:
        confidence = confidence_by_segment[segment_id]
        if confidence > best_confidence:
            best_confidence = confidence
            best_id = segment_id
    if best_id is None:
        return []
    return [
        ScoredInstance(index.display[key], best_confidence)
        for key in index.segment_mentions[best_id]
    ]


def score_instances(
    index: InstanceIndex,
    strategy: InstanceStrategy | str,
    entailment: Optional[EntailmentScorer] = None,
    answer_type: Optional[str] = None,
    segments_by_id: Optional[dict[str, TextSegment]] = None,
) -> RankedInstances:
    """Rank indexed instances under the chosen strategy.

    ContextFrequency scores by segment coverage |I[i]| / |D|;
    SummedConfidence by mean span confidence; TypeCompatibility by mean
    entailment of "(instance) is a (answer type)" against the mention's
    parent sentence, which requires the entailment provider, a non-empty
    answer type, and the segments. NoConsolidation keeps mention order from
    the single most confident segment. Ties break by posting count, then
    by instance string.
    """
    strategy = parse_instance_strategy(strategy)
    diagnostics: list[str] = list(index.diagnostics)

    if strategy is InstanceStrategy.NO_CONSOLIDATION:
        return RankedInstances(tuple(_no_consolidation(index)), strategy,
                               tuple(diagnostics))

    if strategy is InstanceStrategy.TYPE_COMPATIBILITY:
        if entailment is None or not (answer_type or "").strip():
            raise ValueError(
                "type compatibility scoring needs an entailment provider "
                "and a query answer type"
            )
        if segments_by_id is None:
            raise ValueError("type compatibility scoring needs the segments")

    scored: list[tuple[str, float, int]] = []
    for key, postings in index.entries.items():
        if strategy is InstanceStrategy.CONTEXT_FREQUENCY:
            score = len(postings) / index.num_segments if index.num_segments else 0.0
        elif strategy is InstanceStrategy.SUMMED_CONFIDENCE:
            score = sum(p.span.confidence for p in postings) / len(postings)
        else:
            total = 0.0
            for posting in postings:
                segment = segments_by_id.get(posting.segment_id)
                premise = _parent_sentence(segment, posting.span)
                hypothesis = f"{index.display[key]} is a {answer_type}"
                try:
                    total += entailment.entail(premise, hypothesis)
                except ProviderError as exc:
                    diagnostics.append(
                        f"explanation:entailment:{posting.segment_id}:{exc}"
                    )
            score = total / len(postings)
        scored.append((index.display[key], min(1.0, score), len(postings)))

    scored.sort(key=lambda item: (-item[1], -item[2], item[0]))
    items = tuple(ScoredInstance(name, score) for name, score, _ in scored)
    return RankedInstances(items, strategy, tuple(diagnostics))


def _parent_sentence(segment: Optional[TextSegment], span: AnswerSpan) -> str:
    """Sentence(s) of the segment covering the span; the span itself if lost."""
    if segment is None:
        return span.span
    offset = segment.text.find(span.span)
    if offset < 0:
        return span.span
    start, end = covering_sentence_span(segment.text, offset,
                                        offset + len(span.span))
    return segment.text[start:end].strip()


class InstanceExplainer(BaseEstimator):
    """Estimator-style wrapper running rewrite, indexing, and scoring."""

    def __init__(
        self,
        theta: float = 0.2,
        strategy: InstanceStrategy | str = InstanceStrategy.TYPE_COMPATIBILITY,
        predictor: Optional[SpanPredictor] = None,
        ner: Optional[EntityRecognizer] = None,
        entailment: Optional[EntailmentScorer] = None,
    ):
        self.theta = theta
        self.strategy = strategy
        self.predictor = predictor
        self.ner = ner
        self.entailment = entailment

    def fit(self, X=None, y=None):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [0,1], got {self.theta}")
        parse_instance_strategy(self.strategy)
        if self.predictor is None or self.ner is None:
            raise ValueError("span predictor and entity recognizer must be bound")
        return self

    def explain(
        self, query: CountQuery, segments: Sequence[TextSegment]
    ) -> tuple[InstanceIndex, RankedInstances]:
        self.fit()
        rewritten = rewrite_query(query.text)
        index = build_instance_index(rewritten, segments, self.predictor,
                                     self.ner, self.theta)
        ranked = score_instances(
            index,
            self.strategy,
            entailment=self.entailment,
            answer_type=query.answer_type,
            segments_by_id={s.id: s for s in segments},
        )
        return index, ranked
