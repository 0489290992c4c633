"""Evaluation metrics for counts, instances, and CNP categories.

Count quality is reported as Relaxed Precision (within +-10% of gold),
Coverage (share of queries answered at all), their harmonic mean, and
Proximity (min/max ratio). Instance rankings are scored with precision,
recall, and hit rate at k plus mean reciprocal rank, where a retrieved
instance is relevant when its length-normalized edit distance to any gold
alias stays under 0.1. CNP classification is scored per class.

Naming note: map_at_k follows the common "MAP@k" label but is computed as
mean precision among the top k retrieved, which is how the evaluated
system defines it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .types import CnpLabel, GoldInstance

_RELAXED_TOLERANCE = 0.10
_RELEVANCE_CUTOFF = 0.10
DEFAULT_KS = (1, 5, 10)


def levenshtein(a: str, b: str) -> int:
    """Edit distance with unit costs, two-row dynamic programming."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            ))
        previous = current
    return previous[-1]


def normalized_distance(a: str, b: str) -> float:
    """Edit distance divided by the longer length; 0.0 for two empties."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def _normalize_name(name: str) -> str:
    return " ".join(name.split()).casefold()


def instance_relevant(candidate: str, gold: GoldInstance) -> bool:
    """True when the candidate nearly matches any alias of the gold instance.

    Both sides are casefolded and whitespace-normalized before the
    length-normalized edit distance is compared against 0.1 (strict).
    """
    if not candidate.strip():
        raise ValueError("candidate instance must be non-empty")
    cand = _normalize_name(candidate)
    return any(
        normalized_distance(cand, _normalize_name(alias)) < _RELEVANCE_CUTOFF
        for alias in gold.all_names
    )


def relaxed_match(predicted: float, gold: float) -> bool:
    """True when the prediction lies within +-10% of gold, bounds inclusive."""
    if gold <= 0:
        raise ValueError(f"gold count must be positive, got {gold}")
    lo = (1.0 - _RELAXED_TOLERANCE) * gold
    hi = (1.0 + _RELAXED_TOLERANCE) * gold
    return (
        lo <= predicted <= hi
        or math.isclose(predicted, lo, rel_tol=1e-9)
        or math.isclose(predicted, hi, rel_tol=1e-9)
    )


def proximity(predicted: float, gold: float) -> float:
    """min/max ratio of the two counts, in (0, 1]."""
    if predicted <= 0 or gold <= 0:
        raise ValueError("proximity needs two positive counts")
    return min(predicted, gold) / max(predicted, gold)


def pc_tradeoff(precision_pct: float, coverage_pct: float) -> float:
    """Harmonic mean of relaxed precision and coverage, in percent."""
    if precision_pct <= 0 or coverage_pct <= 0:
        return 0.0
    return 2 * precision_pct * coverage_pct / (precision_pct + coverage_pct)


@dataclass(frozen=True)
class CountEvalReport:
    """Aggregate count metrics plus the per-query rows behind them."""

    relaxed_precision: float
    coverage: float
    pc: float
    proximity: float
    total_queries: int
    answered: int
    per_query: tuple[dict, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "per_query", tuple(self.per_query))

    def to_dict(self) -> dict:
        return {
            "relaxed_precision": self.relaxed_precision,
            "coverage": self.coverage,
            "pc": self.pc,
            "proximity": self.proximity,
            "total_queries": self.total_queries,
            "answered": self.answered,
            "per_query": list(self.per_query),
        }


def count_metrics(
    predictions: Mapping[str, Optional[float]],
    golds: Mapping[str, Optional[float]],
) -> CountEvalReport:
    """Score per-query count predictions against gold counts.

    Queries are the keys of ``golds``. Coverage counts every answered
    query; relaxed precision and proximity are computed only over answered
    queries that have a gold count, so no-direct-answer queries cannot
    drag precision down. Percentages are 0-100; proximity stays a 0-1
    fraction.
    """
    if not golds:
        raise ValueError("cannot evaluate an empty query set")
    answered = 0
    eligible_answered = 0
    matches = 0
    proximity_total = 0.0
    rows: list[dict] = []
    for query_id in golds:
        predicted = predictions.get(query_id)
        gold = golds[query_id]
        row: dict = {"id": query_id, "predicted": predicted, "gold": gold,
                     "matched": None, "proximity": None}
        if predicted is not None:
            answered += 1
            if gold is not None:
                eligible_answered += 1
                row["matched"] = relaxed_match(predicted, gold)
                row["proximity"] = proximity(predicted, gold)
                matches += row["matched"]
                proximity_total += row["proximity"]
        rows.append(row)
    rp = 100.0 * matches / eligible_answered if eligible_answered else 0.0
    cov = 100.0 * answered / len(golds)
    prox = proximity_total / eligible_answered if eligible_answered else 0.0
    return CountEvalReport(
        relaxed_precision=rp,
        coverage=cov,
        pc=pc_tradeoff(rp, cov),
        proximity=prox,
        total_queries=len(golds),
        answered=answered,
        per_query=tuple(rows),
    )


@dataclass(frozen=True)
class InstanceEvalReport:
    """Ranking metrics per cutoff k; percentages except the 0-1 mrr."""

    map_at_k: dict[int, float]
    ar_at_k: dict[int, float]
    hit_at_k: dict[int, float]
    mrr: float
    evaluated_queries: int

    def to_dict(self) -> dict:
        return {
            "map_at_k": {str(k): v for k, v in self.map_at_k.items()},
            "ar_at_k": {str(k): v for k, v in self.ar_at_k.items()},
            "hit_at_k": {str(k): v for k, v in self.hit_at_k.items()},
            "mrr": self.mrr,
            "evaluated_queries": self.evaluated_queries,
        }


def _relevance_flags(ranked: Sequence[str],
                     gold: Sequence[GoldInstance]) -> list[bool]:
    return [any(instance_relevant(item, g) for g in gold) for item in ranked]


def instance_metrics(
    rankings: Mapping[str, Sequence[str]],
    golds: Mapping[str, Sequence[GoldInstance]],
    ks: Sequence[int] = DEFAULT_KS,
) -> InstanceEvalReport:
    """Score ranked instance lists against gold instances.

    Only queries with at least one gold instance participate. Precision@k
    divides by how many items were actually retrieved in the top k; recall@k
    counts distinct gold instances matched there; hit@k asks for one
    relevant item; reciprocal rank uses the first relevant position over the
    full ranking.
    """
    ks = tuple(sorted(set(ks)))
    if not ks or ks[0] < 1:
        raise ValueError("cutoffs must be positive integers")
    precision_sums = {k: 0.0 for k in ks}
    recall_sums = {k: 0.0 for k in ks}
    hit_counts = {k: 0 for k in ks}
    rr_total = 0.0
    evaluated = 0
    for query_id, gold in golds.items():
        gold = tuple(gold)
        if not gold:
            continue
        evaluated += 1
        ranked = list(rankings.get(query_id, ()))
        flags = _relevance_flags(ranked, gold)
        for k in ks:
            top = flags[:k]
            if top:
                precision_sums[k] += sum(top) / len(top)
            matched = {
                gi for item in ranked[:k]
                for gi, g in enumerate(gold) if instance_relevant(item, g)
            }
            recall_sums[k] += len(matched) / len(gold)
            hit_counts[k] += any(top)
        first = next((r for r, flag in enumerate(flags, start=1) if flag), None)
        rr_total += 1.0 / first if first else 0.0
    if not evaluated:
        raise ValueError("no query has gold instances to evaluate against")
    return InstanceEvalReport(
        map_at_k={k: 100.0 * precision_sums[k] / evaluated for k in ks},
        ar_at_k={k: 100.0 * recall_sums[k] / evaluated for k in ks},
        hit_at_k={k: 100.0 * hit_counts[k] / evaluated for k in ks},
        mrr=rr_total / evaluated,
        evaluated_queries=evaluated,
    )


def cnp_accuracy(
    labeled: Sequence[tuple[CnpLabel, CnpLabel]],
) -> dict[CnpLabel, Optional[float]]:
    """Per-class accuracy over (predicted, gold) label pairs.

    For each class, the score is correct predictions over all predictions
    in that class; a class never predicted reports None rather than 0.
    """
    totals = {label: 0 for label in CnpLabel}
    correct = {label: 0 for label in CnpLabel}
    for predicted, gold in labeled:
        totals[predicted] += 1
        correct[predicted] += predicted == gold
    return {
        label: (correct[label] / totals[label] if totals[label] else None)
        for label in CnpLabel
    }


def label_segments(
    gold_count: float,
    segment_counts: Mapping[str, Optional[float]],
) -> dict[str, bool]:
    """Per-segment labels: positive when the extracted count is within +-10%.

    Segments without an extracted count are negative.
    """
    if gold_count <= 0:
        raise ValueError("gold count must be positive")
    return {
        segment_id: value is not None and relaxed_match(value, gold_count)
        for segment_id, value in segment_counts.items()
    }


def format_count_report(report: CountEvalReport) -> str:
    """Aligned text table for the count metrics."""
    lines = [
        f"{'Relaxed Precision':<20}{report.relaxed_precision:>8.1f}",
        f"{'Coverage':<20}{report.coverage:>8.1f}",
        f"{'P/C trade-off':<20}{report.pc:>8.1f}",
        f"{'Proximity':<20}{report.proximity:>8.3f}",
        f"{'Answered':<20}{report.answered:>8d}",
        f"{'Queries':<20}{report.total_queries:>8d}",
    ]
    return "\n".join(lines)


def format_instance_report(report: InstanceEvalReport) -> str:
    """Aligned text table for the instance ranking metrics."""
    header = f"{'k':<6}" + "".join(f"{label:>10}" for label in
                                   ("MAP@k", "AR@k", "Hit@k"))
    lines = [header]
    for k in report.map_at_k:
        lines.append(
            f"{k:<6}{report.map_at_k[k]:>10.1f}{report.ar_at_k[k]:>10.1f}"
            f"{report.hit_at_k[k]:>10.1f}"
        )
    lines.append(f"{'MRR':<6}{report.mrr:>10.3f}")
    lines.append(f"{'Queries':<10}{report.evaluated_queries:>6d}")
    return "\n".join(lines)
