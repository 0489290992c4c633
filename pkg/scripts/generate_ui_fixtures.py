#!/usr/bin/env python3
"""Generate canned service responses for the web UI test suite.

The UI tests run against network fixtures instead of a live server, but
those fixtures must not drift from what the engine actually emits. So this
script produces them with the real machinery end to end: consolidation,
representative selection, category classification, instance indexing and
scoring, and the wire serializer. Only the span predictions and similarity
scores are scripted, pinning the candidate phrasings the UI asserts on.

Run from the repository root:

    python3 scripts/generate_ui_fixtures.py

Outputs land in frontend/test/fixtures/.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from countqa.contextualize import classify, select_representative
from countqa.dataset import load_dataset
from countqa.explain import build_instance_index, rewrite_query, score_instances
from countqa.inference import consolidate
from countqa.pipeline import CountAnswerPipeline
from countqa.providers import SpanPrediction
from countqa.providers.lexical import (
    LexicalEntailment,
    LexicalEntityRecognizer,
    LexicalPosTagger,
)
from countqa.results import EngineSettings, QueryResult
from countqa.types import (
    AnswerSpan,
    CountCandidate,
    CountStrategy,
    TextSegment,
    derive_query_components,
)

ROOT = Path(__file__).resolve().parent.parent
OUT_DIR = ROOT / "frontend" / "test" / "fixtures"
FIXTURE_DATASET = ROOT / "tests" / "fixtures" / "fixture_dataset.jsonl"

QUERY_ID = "q-ind-languages"
QUERY_TEXT = "How many native languages are spoken in Indonesia?"

# Segment texts carry both the count phrases and the entity mentions the
# instance index should pick up.
SEGMENTS = [
    TextSegment("seg-1", 1,
                "Experts list an estimated 700 languages across the "
                "archipelago."),
    TextSegment("seg-2", 2,
                "Recent surveys count 700 languages in daily use, led by "
                "Javanese and Sundanese."),
    TextSegment("seg-3", 3,
                "Older atlases speak of about 750 dialects in the region."),
    TextSegment("seg-4", 4,
                "Schools teach 27 major regional languages, including "
                "Madurese and Minangkabau."),
    TextSegment("seg-5", 5,
                "The constitution names 5 official languages for state "
                "business."),
    TextSegment("seg-6", 6,
                "The census recognises 2000 ethnic groups nationwide."),
    TextSegment("seg-7", 7,
                "Broadcasters reach 85 million native speakers every day, "
                "and Javanese remains the largest."),
]

# (segment id, span text, confidence); spans are verbatim substrings so the
# UI can highlight them inside the segments above.
COUNT_SPANS = [
    ("seg-1", "estimated 700 languages", 0.8),
    ("seg-2", "700 languages", 0.7),
    ("seg-3", "about 750 dialects", 0.7),
    ("seg-4", "27 major regional languages", 0.6),
    ("seg-5", "5 official languages", 0.8),
    ("seg-6", "2000 ethnic groups", 0.55),
    ("seg-7", "85 million native speakers", 0.52),
]

EXPLANATION_SPANS = {
    "seg-2": ("led by Javanese and Sundanese", 0.9),
    "seg-4": ("including Madurese and Minangkabau", 0.7),
    "seg-7": ("Javanese remains the largest", 0.6),
}


class ScriptedSpans:
    """Span predictor replaying a fixed (segment text -> span) table."""

    def __init__(self, table: dict[str, tuple[str, float]]):
        self.table = table

    def predict_span(self, query: str, segment_text: str):
        entry = self.table.get(segment_text)
        if entry is None:
            return None
        span, confidence = entry
        if span not in segment_text:
            raise AssertionError(f"span {span!r} not in segment")
        return SpanPrediction(span, confidence)


class FlatSimilarity:
    """Uniformly positive similarity, so only the count interval decides."""

    def similarity(self, a: str, b: str) -> float:
        return 0.5


def numbers_to_plain(obj):
    """Round-trip through JSON text to normalize number formatting."""
    return json.loads(json.dumps(obj))


def language_response(alpha: float) -> dict:
    query = derive_query_components(QUERY_TEXT, LexicalPosTagger(), QUERY_ID)

    candidates = [
        CountCandidate(AnswerSpan(seg_id, span, conf),
                       float(_value_of(span)), span)
        for seg_id, span, conf in COUNT_SPANS
    ]
    inference_spans = tuple(c.answer_span for c in candidates)

    c_pred = consolidate([(c.value, c.confidence) for c in candidates],
                         CountStrategy.WEIGHTED_MEDIAN)
    rep = select_representative(candidates, c_pred)
    classification = classify(candidates, rep, c_pred, alpha, FlatSimilarity())

    explanation_table = {
        segment.text: EXPLANATION_SPANS[segment.id]
        for segment in SEGMENTS if segment.id in EXPLANATION_SPANS
    }
    index = build_instance_index(
        rewrite_query(query.text),
        SEGMENTS,
        ScriptedSpans(explanation_table),
        LexicalEntityRecognizer(),
        theta=0.2,
    )
    ranked = score_instances(
        index,
        "type_compatibility",
        entailment=LexicalEntailment(),
        answer_type=query.answer_type,
        segments_by_id={s.id: s for s in SEGMENTS},
    )

    result = QueryResult(
        query=query,
        settings=EngineSettings(alpha=alpha),
        c_pred=c_pred,
        candidates=tuple(candidates),
        classification=classification,
        instances=ranked,
        inference_spans=inference_spans,
        explanation_spans=index.spans,
    )
    return result.to_record()


def _value_of(span: str) -> float:
    from countqa.quantities import extract_count

    parsed = extract_count(span)
    if parsed is None:
        raise AssertionError(f"no count in {span!r}")
    return parsed.value


def adhoc_response() -> dict:
    """A fully live pipeline run over two tiny inline segments.

    Segment ids follow the s1, s2, ... scheme the UI assigns to textarea
    lines, so this fixture is exactly what the service would return for an
    ad-hoc submission of these two lines.
    """
    segments = (
        TextSegment("s1", 1, "Hawaii has eight main islands."),
        TextSegment("s2", 2,
                    "Well over a hundred islets surround Oahu and Maui."),
    )
    result = CountAnswerPipeline().answer(
        "How many islands does Hawaii have?", segments, query_id="adhoc"
    )
    record = result.to_record()
    record["_segments"] = [
        {"id": s.id, "rank": s.rank, "text": s.text} for s in segments
    ]
    return record


def listing_fixtures() -> tuple[list, list]:
    records = load_dataset(FIXTURE_DATASET)
    datasets = [{"id": "fixture", "queries": len(records)}]
    queries = [{"id": r.query.id, "query": r.query.text} for r in records]
    return datasets, queries


def main() -> int:
    OUT_DIR.mkdir(parents=True, exist_ok=True)

    wide = language_response(alpha=0.3)
    narrow = language_response(alpha=0.0)

    synonyms = {c["cnp_text"] for c in wide["cnp"]["synonyms"]}
    moved = {c["cnp_text"] for c in narrow["cnp"]["incomparables"]}
    assert wide["c_pred"] == 700.0, wide["c_pred"]
    assert "about 750 dialects" in synonyms
    assert "about 750 dialects" in moved
    assert all(wide["cnp"][bucket] for bucket in
               ("synonyms", "subgroups", "incomparables"))
    assert wide["instances"], "instance pane would be empty"

    datasets, queries = listing_fixtures()
    outputs = {
        "answer-languages-alpha03.json": wide,
        "answer-languages-alpha00.json": narrow,
        "answer-adhoc.json": adhoc_response(),
        "datasets.json": datasets,
        "queries.json": queries,
    }
    for name, payload in outputs.items():
        path = OUT_DIR / name
        path.write_text(
            json.dumps(numbers_to_plain(payload), indent=2,
                       ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        print(f"wrote {path.relative_to(ROOT)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
