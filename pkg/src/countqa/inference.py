"""Answer inference: span filtering, count extraction, and consolidation.

For each segment the bound span predictor proposes one answer span. Spans
above the confidence threshold feed the quantity parser, and the surviving
weighted counts collapse to a single prediction under one of four
strategies. Every strategy returns a member of the input multiset, so the
consolidated count is always a count someone actually asserted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from sklearn.base import BaseEstimator

from .providers.base import ProviderError, SpanPredictor
from .quantities import extract_count
from .types import (
    AnswerSpan,
    CountCandidate,
    CountQuery,
    CountStrategy,
    TextSegment,
    counts_equal,
    parse_count_strategy,
)

ALL_SEGMENTS_FAILED = "inference:all_segments_failed"


@dataclass(frozen=True)
class InferenceConfig:
    """Span selection threshold and consolidation strategy."""

    theta: float = 0.5
    strategy: CountStrategy = CountStrategy.WEIGHTED_MEDIAN

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must be in [0,1], got {self.theta}")


@dataclass(frozen=True)
class InferenceResult:
    """Consolidated count, surviving candidates, and raw span provenance."""

    c_pred: Optional[float]
    candidates: tuple[CountCandidate, ...]
    per_segment_spans: tuple[AnswerSpan, ...]
    diagnostics: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "per_segment_spans", tuple(self.per_segment_spans))
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))


def _merge_groups(pairs: Sequence[tuple[float, float]]):
    """Group values equal under tolerance; preserves first-seen order.

    Returns a list of (representative value, multiplicity, summed confidence).
    """
    groups: list[list[float]] = []
    for value, confidence in pairs:
        for group in groups:
            if counts_equal(group[0], value):
                group[1] += 1
                group[2] += confidence
                break
        else:
            groups.append([value, 1, confidence])
    return groups


def consolidate(
    pairs: Sequence[tuple[float, float]], strategy: CountStrategy | str
) -> float:
    """Collapse weighted counts [(value, confidence), ...] to one value.

    MostConfident takes the highest-confidence value (ties: lower value,
    then input order). MostFrequent takes the most repeated value, merging
    values equal under tolerance (ties: higher summed confidence, then
    lower value). Median takes the lower middle of the sorted values.
    WeightedMedian walks the sorted values and returns the first whose
    cumulative confidence reaches half the total.
    """
    if not pairs:
        raise ValueError("cannot consolidate an empty candidate set")
    strategy = parse_count_strategy(strategy)

    if strategy is CountStrategy.MOST_CONFIDENT:
        best = min(
            enumerate(pairs),
            key=lambda item: (-item[1][1], item[1][0], item[0]),
        )
        return best[1][0]

    if strategy is CountStrategy.MOST_FREQUENT:
        groups = _merge_groups(pairs)
        best = min(groups, key=lambda g: (-g[1], -g[2], g[0]))
        return best[0]

    values = sorted(value for value, _ in pairs)
    if strategy is CountStrategy.MEDIAN:
        return values[(len(values) - 1) // 2]

    ordered = sorted(pairs, key=lambda p: p[0])
    total = sum(confidence for _, confidence in ordered)
    half = total / 2.0
    cumulative = 0.0
    for value, confidence in ordered:
        cumulative += confidence
        if cumulative >= half - 1e-12:
            return value
    return ordered[-1][0]  # unreachable with positive weights


def infer_answer(
    query: CountQuery,
    segments: Sequence[TextSegment],
    predictor: SpanPredictor,
    config: InferenceConfig,
) -> InferenceResult:
    """Run span prediction over every segment and consolidate the counts.

    A provider failure on one segment is recorded and skipped; only when
    every segment fails does the result carry the all-failed diagnostic.
    """
    spans: list[AnswerSpan] = []
    candidates: list[CountCandidate] = []
    diagnostics: list[str] = []
    failures = 0
    for segment in segments:
        try:
            prediction = predictor.predict_span(query.text, segment.text)
        except ProviderError as exc:
            failures += 1
            diagnostics.append(f"inference:segment:{segment.id}:{exc}")
            continue
        if prediction is None or not prediction.text.strip():
            continue
        span = AnswerSpan(segment.id, prediction.text, prediction.confidence)
        spans.append(span)
        if span.confidence <= config.theta:
            continue
        parsed = extract_count(span.span)
        if parsed is None:
            continue
        candidates.append(CountCandidate(span, parsed.value, span.span))

    if segments and failures == len(segments):
        diagnostics.append(ALL_SEGMENTS_FAILED)

    c_pred = None
    if candidates:
        c_pred = consolidate(
            [(c.value, c.confidence) for c in candidates], config.strategy
        )
    return InferenceResult(c_pred, tuple(candidates), tuple(spans),
                           tuple(diagnostics))


class AnswerInferencer(BaseEstimator):
    """Estimator-style wrapper around answer inference.

    Parameters mirror InferenceConfig so theta sweeps can drive it through
    get_params/set_params. fit is a no-op validation hook.
    """

    def __init__(self, theta: float = 0.5,
                 strategy: CountStrategy | str = CountStrategy.WEIGHTED_MEDIAN,
                 predictor: Optional[SpanPredictor] = None):
        self.theta = theta
        self.strategy = strategy
        self.predictor = predictor

    def _config(self) -> InferenceConfig:
        return InferenceConfig(self.theta, parse_count_strategy(self.strategy))

    def fit(self, X=None, y=None):
        self._config()
        if self.predictor is None:
            raise ValueError("a span predictor must be bound before use")
        return self

    def infer(self, query: CountQuery,
              segments: Sequence[TextSegment]) -> InferenceResult:
        self.fit()
        return infer_answer(query, segments, self.predictor, self._config())
