"""The full count answering pipeline as one configurable estimator.

Three stages run per query: answer inference consolidates a count,
contextualization partitions the candidate CNPs around the representative,
and explanation ranks instance evidence. All thresholds, strategies, and
provider bindings are constructor parameters exposed through get_params, so
parameter sweeps and per-request overrides are plain parameter surgery.
Unbound providers fall back to the deterministic lexical implementations.
"""

from __future__ import annotations

from typing import Optional, Sequence, Union

from sklearn.base import BaseEstimator

from .contextualize import CnpClassification, classify, select_representative
from .dataset import DatasetRecord
from .explain import (
    build_instance_index,
    rewrite_query,
    score_instances,
)
from .inference import InferenceConfig, infer_answer
from .providers.lexical import (
    LexicalEntailment,
    LexicalEntityRecognizer,
    LexicalPosTagger,
    LexicalSimilarity,
    LexicalSpanPredictor,
)
from .results import EngineSettings, QueryResult
from .types import (
    CountQuery,
    InstanceStrategy,
    TextSegment,
    derive_query_components,
    parse_count_strategy,
    parse_instance_strategy,
)

TYPE_COMPATIBILITY_DEGRADED = (
    "explanation:type_compatibility_unavailable:missing_answer_type"
)


class CountAnswerPipeline(BaseEstimator):
    """Inference, contextualization, and explanation behind one answer() call.

    Parameters follow the estimator convention: stored verbatim, validated
    in fit, resolved lazily. ``explanation_predictor`` lets a differently
    tuned span model serve the explanation stage; when absent the inference
    predictor is reused.
    """

    def __init__(
        self,
        theta_inference: float = 0.5,
        theta_explanation: float = 0.2,
        alpha: float = 0.3,
        count_strategy="weighted_median",
        instance_strategy="type_compatibility",
        span_predictor=None,
        explanation_predictor=None,
        similarity=None,
        ner=None,
        entailment=None,
        tagger=None,
    ):
        self.theta_inference = theta_inference
        self.theta_explanation = theta_explanation
        self.alpha = alpha
        self.count_strategy = count_strategy
        self.instance_strategy = instance_strategy
        self.span_predictor = span_predictor
        self.explanation_predictor = explanation_predictor
        self.similarity = similarity
        self.ner = ner
        self.entailment = entailment
        self.tagger = tagger

    def fit(self, X=None, y=None):
        """Validate parameters; nothing is learned."""
        for name in ("theta_inference", "theta_explanation", "alpha"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {value}")
        parse_count_strategy(self.count_strategy)
        parse_instance_strategy(self.instance_strategy)
        return self

    def settings(self) -> EngineSettings:
        return EngineSettings(
            theta_inference=self.theta_inference,
            theta_explanation=self.theta_explanation,
            alpha=self.alpha,
            count_strategy=parse_count_strategy(self.count_strategy),
            instance_strategy=parse_instance_strategy(self.instance_strategy),
        )

    def with_overrides(self, **overrides) -> "CountAnswerPipeline":
        """A new pipeline with some parameters replaced; self is untouched."""
        params = self.get_params(deep=False)
        unknown = set(overrides) - set(params)
        if unknown:
            raise ValueError(f"unknown parameters: {sorted(unknown)}")
        params.update(overrides)
        return CountAnswerPipeline(**params)

    # Lazy provider resolution keeps __init__ free of work, per the
    # estimator convention, and keeps get_params faithful to what was set.
    def _span_predictor(self):
        return self.span_predictor or LexicalSpanPredictor()

    def _explanation_predictor(self):
        return (self.explanation_predictor or self.span_predictor
                or LexicalSpanPredictor())

    def _similarity(self):
        return self.similarity or LexicalSimilarity()

    def _ner(self):
        return self.ner or LexicalEntityRecognizer()

    def _entailment(self):
        return self.entailment or LexicalEntailment()

    def _tagger(self):
        return self.tagger or LexicalPosTagger()

    def _resolve_query(self, query: Union[str, CountQuery],
                       query_id: str) -> CountQuery:
        if isinstance(query, str):
            return derive_query_components(query, self._tagger(), query_id)
        if query.answer_type is None and not query.entities:
            return derive_query_components(query.text, self._tagger(), query.id)
        return query

    def answer(
        self,
        query: Union[str, CountQuery],
        segments: Sequence[TextSegment],
        query_id: str = "",
    ) -> QueryResult:
        """Run all three stages for one query over its segments."""
        self.fit()
        resolved = self._resolve_query(query, query_id)
        settings = self.settings()
        diagnostics: list[str] = []

        inference = infer_answer(
            resolved,
            segments,
            self._span_predictor(),
            InferenceConfig(self.theta_inference, settings.count_strategy),
        )
        diagnostics.extend(inference.diagnostics)

        classification: Optional[CnpClassification] = None
        if inference.c_pred is not None:
            representative = select_representative(
                inference.candidates, inference.c_pred
            )
            classification = classify(
                inference.candidates,
                representative,
                inference.c_pred,
                self.alpha,
                self._similarity(),
            )
            diagnostics.extend(classification.diagnostics)

        rewritten = rewrite_query(resolved.text)
        index = build_instance_index(
            rewritten,
            segments,
            self._explanation_predictor(),
            self._ner(),
            self.theta_explanation,
        )
        strategy = settings.instance_strategy
        if (strategy is InstanceStrategy.TYPE_COMPATIBILITY
                and not (resolved.answer_type or "").strip()):
            strategy = InstanceStrategy.SUMMED_CONFIDENCE
            diagnostics.append(TYPE_COMPATIBILITY_DEGRADED)
        ranked = score_instances(
            index,
            strategy,
            entailment=self._entailment(),
            answer_type=resolved.answer_type,
            segments_by_id={s.id: s for s in segments},
        )
        diagnostics.extend(ranked.diagnostics)

        return QueryResult(
            query=resolved,
            settings=settings,
            c_pred=inference.c_pred,
            candidates=inference.candidates,
            classification=classification,
            instances=ranked,
            inference_spans=inference.per_segment_spans,
            explanation_spans=index.spans,
            diagnostics=tuple(dict.fromkeys(diagnostics)),
        )

    def answer_record(self, record: DatasetRecord) -> QueryResult:
        """Answer one dataset record, reusing its query id."""
        return self.answer(record.query.text, record.segments,
                           query_id=record.query.id)
