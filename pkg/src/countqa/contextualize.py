"""Count contextualization: pick the representative CNP and sort the rest.

The representative is the most confident candidate whose count equals the
consolidated prediction. Every other candidate lands in one of three
buckets relative to it: Synonyms carry a near-equal count and positive
similarity, Subgroups carry a clearly lower count, and Incomparables are
either non-similar (similarity <= 0) or carry a clearly higher count.
"Near" is the inclusive interval c_pred +- alpha * c_pred, with alpha a
fraction of the predicted count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from sklearn.base import BaseEstimator

from .providers.base import ProviderError, SimilarityScorer
from .types import CountCandidate, counts_equal


@dataclass(frozen=True)
class CnpClassification:
    """Disjoint partition of the candidate CNPs around the representative."""

    cnp_rep: CountCandidate
    synonyms: tuple[CountCandidate, ...]
    subgroups: tuple[CountCandidate, ...]
    incomparables: tuple[CountCandidate, ...]
    alpha: float
    diagnostics: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for name in ("synonyms", "subgroups", "incomparables", "diagnostics"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0,1], got {self.alpha}")


def select_representative(
    candidates: Sequence[CountCandidate], c_pred: float
) -> CountCandidate:
    """Most confident candidate whose count equals the prediction.

    Consolidation guarantees membership, so a miss means the caller passed
    a c_pred that did not come from these candidates.
    """
    matching = [c for c in candidates if counts_equal(c.value, c_pred)]
    if not matching:
        raise ValueError(
            f"no candidate carries the consolidated count {c_pred}"
        )
    return max(matching, key=lambda c: c.confidence)


def _within(value: float, lo: float, hi: float) -> bool:
    # Inclusive bounds, with tolerance so alpha = 0 still admits exact hits.
    return (
        lo <= value <= hi
        or math.isclose(value, lo, rel_tol=1e-9)
        or math.isclose(value, hi, rel_tol=1e-9)
    )


def classify(
    candidates: Sequence[CountCandidate],
    cnp_rep: CountCandidate,
    c_pred: float,
    alpha: float,
    similarity: SimilarityScorer,
) -> CnpClassification:
    """Partition candidates against the representative CNP.

    Similarity at or below zero sends a candidate straight to Incomparables
    regardless of its count; a similarity provider failure does the same,
    conservatively, with a diagnostic. The representative itself is skipped
    by object identity, so a duplicate phrasing elsewhere in the list is
    still classified.
    """
    lo = c_pred - alpha * c_pred
    hi = c_pred + alpha * c_pred
    synonyms: list[CountCandidate] = []
    subgroups: list[CountCandidate] = []
    incomparables: list[CountCandidate] = []
    diagnostics: list[str] = []
    for candidate in candidates:
        if candidate is cnp_rep:
            continue
        try:
            sim = similarity.similarity(candidate.cnp_text, cnp_rep.cnp_text)
        except ProviderError as exc:
            diagnostics.append(
                f"contextualize:similarity:{candidate.segment_id}:{exc}"
            )
            incomparables.append(candidate)
            continue
        if sim <= 0.0:
            incomparables.append(candidate)
        elif _within(candidate.value, lo, hi):
            synonyms.append(candidate)
        elif candidate.value < lo:
            subgroups.append(candidate)
        else:
            incomparables.append(candidate)
    return CnpClassification(
        cnp_rep, tuple(synonyms), tuple(subgroups), tuple(incomparables),
        alpha, tuple(diagnostics),
    )


class CnpClassifier(BaseEstimator):
    """Estimator-style wrapper: alpha plus a similarity provider."""

    def __init__(self, alpha: float = 0.3,
                 similarity: Optional[SimilarityScorer] = None):
        self.alpha = alpha
        self.similarity = similarity

    def fit(self, X=None, y=None):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0,1], got {self.alpha}")
        if self.similarity is None:
            raise ValueError("a similarity provider must be bound before use")
        return self

    def classify(self, candidates: Sequence[CountCandidate],
                 c_pred: float) -> CnpClassification:
        self.fit()
        rep = select_representative(candidates, c_pred)
        return classify(candidates, rep, c_pred, self.alpha, self.similarity)
