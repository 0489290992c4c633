"""Shared fixtures: fixture-file paths and scripted provider doubles."""

from __future__ import annotations

from pathlib import Path

import pytest

from countqa.providers import ProviderError

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dataset_path() -> Path:
    return FIXTURES / "fixture_dataset.jsonl"


@pytest.fixture(scope="session")
def golden_predictions_path() -> Path:
    return FIXTURES / "golden_predictions.jsonl"


@pytest.fixture(scope="session")
def golden_report_path() -> Path:
    return FIXTURES / "golden_report.json"


class ConstantSimilarity:
    """Same score for every pair; used to isolate the interval logic."""

    def __init__(self, score: float = 0.5):
        self.score = score
        self.calls: list[tuple[str, str]] = []

    def similarity(self, a: str, b: str) -> float:
        self.calls.append((a, b))
        return self.score


class MappedSimilarity:
    """Scores looked up by unordered pair; errors on unknown pairs."""

    def __init__(self, table: dict[frozenset, float]):
        self.table = table

    def similarity(self, a: str, b: str) -> float:
        return self.table[frozenset((a, b))]


class FailingProvider:
    """Raises on every call, for failure-path tests."""

    def __init__(self, message: str = "backend down"):
        self.message = message

    def _boom(self, *args, **kwargs):
        raise ProviderError(self.message)

    predict_span = _boom
    similarity = _boom
    recognize_entities = _boom
    entail = _boom
    tag = _boom


class ScriptedSpanPredictor:
    """Returns canned (span, confidence) per segment text."""

    def __init__(self, script: dict[str, tuple[str, float] | None]):
        self.script = script

    def predict_span(self, query: str, segment: str):
        from countqa.providers import SpanPrediction

        entry = self.script.get(segment)
        if entry is None:
            return None
        span, confidence = entry
        return SpanPrediction(span, confidence)


@pytest.fixture
def constant_similarity() -> ConstantSimilarity:
    return ConstantSimilarity()


@pytest.fixture
def failing_provider() -> FailingProvider:
    return FailingProvider()
