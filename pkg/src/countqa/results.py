"""Per-query result bundle and its JSON wire form.

The record layout is fixed and insertion-ordered so serialized output is
byte-identical across runs. Absent counts serialize as explicit nulls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .contextualize import CnpClassification
from .explain import RankedInstances
from .types import (
    AnswerSpan,
    CountCandidate,
    CountQuery,
    CountStrategy,
    InstanceStrategy,
)


@dataclass(frozen=True)
class EngineSettings:
    """Echo of the knobs a result was produced under."""

    theta_inference: float = 0.5
    theta_explanation: float = 0.2
    alpha: float = 0.3
    count_strategy: CountStrategy = CountStrategy.WEIGHTED_MEDIAN
    instance_strategy: InstanceStrategy = InstanceStrategy.TYPE_COMPATIBILITY

    def to_dict(self) -> dict:
        return {
            "theta_inference": self.theta_inference,
            "theta_explanation": self.theta_explanation,
            "alpha": self.alpha,
            "count_strategy": self.count_strategy.value,
            "instance_strategy": self.instance_strategy.value,
        }


def _span_dict(span: AnswerSpan) -> dict:
    return {
        "segment_id": span.segment_id,
        "span": span.span,
        "confidence": span.confidence,
    }


def _cnp_dict(candidate: CountCandidate) -> dict:
    return {
        "cnp_text": candidate.cnp_text,
        "value": candidate.value,
        "confidence": candidate.confidence,
        "segment_id": candidate.segment_id,
    }


@dataclass(frozen=True)
class QueryResult:
    """Everything the pipeline produced for one query."""

    query: CountQuery
    settings: EngineSettings
    c_pred: Optional[float]
    candidates: tuple[CountCandidate, ...]
    classification: Optional[CnpClassification]
    instances: Optional[RankedInstances]
    inference_spans: tuple[AnswerSpan, ...]
    explanation_spans: tuple[AnswerSpan, ...]
    diagnostics: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "inference_spans", tuple(self.inference_spans))
        object.__setattr__(self, "explanation_spans",
                           tuple(self.explanation_spans))
        object.__setattr__(self, "diagnostics", tuple(self.diagnostics))

    def to_record(self) -> dict:
        """JSON-ready dict with a stable key order."""
        cnp: Optional[dict] = None
        if self.classification is not None:
            cnp = {
                "representative": _cnp_dict(self.classification.cnp_rep),
                "synonyms": [_cnp_dict(c) for c in self.classification.synonyms],
                "subgroups": [_cnp_dict(c) for c in self.classification.subgroups],
                "incomparables": [
                    _cnp_dict(c) for c in self.classification.incomparables
                ],
            }
        instances = None
        if self.instances is not None:
            instances = [
                {"instance": item.instance, "score": item.score}
                for item in self.instances.items
            ]
        return {
            "id": self.query.id,
            "query": self.query.text,
            "answer_type": self.query.answer_type,
            "entities": list(self.query.entities),
            "relation": self.query.relation,
            "context_terms": list(self.query.context_terms),
            "settings": self.settings.to_dict(),
            "c_pred": self.c_pred,
            "candidates": [
                {
                    "segment_id": c.segment_id,
                    "span": c.cnp_text,
                    "confidence": c.confidence,
                    "value": c.value,
                }
                for c in self.candidates
            ],
            "cnp": cnp,
            "instances": instances,
            "provenance": {
                "inference_spans": [_span_dict(s) for s in self.inference_spans],
                "explanation_spans": [
                    _span_dict(s) for s in self.explanation_spans
                ],
            },
            "diagnostics": list(self.diagnostics),
        }
