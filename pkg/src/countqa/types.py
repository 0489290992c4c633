"""Core domain types shared by every stage of the count answering pipeline.

All types are immutable value objects, safe to share across threads. Counts
are stored as floats but compared with a relative tolerance so 17 and 17.0
are the same count. Values in the open interval (0, 1) are rejected at
construction: a fraction is never a valid entity count.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Optional

from .text import STOPWORDS, tokenize

if TYPE_CHECKING:  # pragma: no cover
    from .providers.base import PosTagger

REL_TOL = 1e-9


def counts_equal(a: float, b: float) -> bool:
    """Tolerant equality for extracted counts (17 == 17.0 == 17.000000001)."""
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=1e-12)


class CountStrategy(Enum):
    """How a multiset of weighted count candidates collapses to one value."""

    MOST_CONFIDENT = "most_confident"
    MOST_FREQUENT = "most_frequent"
    MEDIAN = "median"
    WEIGHTED_MEDIAN = "weighted_median"


class InstanceStrategy(Enum):
    """How instance mentions harvested from spans are scored and ranked."""

    NO_CONSOLIDATION = "no_consolidation"
    CONTEXT_FREQUENCY = "context_frequency"
    SUMMED_CONFIDENCE = "summed_confidence"
    TYPE_COMPATIBILITY = "type_compatibility"


class GoldSource(Enum):
    """Where a gold count came from: a knowledge graph, a snippet, or nowhere."""

    KG = "kg"
    SNIPPET = "snippet"
    NO_DIRECT_ANSWER = "no_direct_answer"


class CnpLabel(Enum):
    """Category of a count-modified noun phrase relative to the representative."""

    SYNONYM = "synonym"
    SUBGROUP = "subgroup"
    INCOMPARABLE = "incomparable"


def _parse_enum(cls, value, what: str):
    if isinstance(value, cls):
        return value
    if isinstance(value, str):
        key = value.strip().lower().replace("-", "_").replace(" ", "_")
        for member in cls:
            if member.value == key or member.name.lower() == key:
                return member
        # Accept CamelCase spellings such as "WeightedMedian".
        snake = re.sub(r"(?<=[a-z0-9])(?=[A-Z])", "_", value.strip()).lower()
        for member in cls:
            if member.value == snake:
                return member
    raise ValueError(f"unknown {what}: {value!r} (expected one of "
                     f"{[m.value for m in cls]})")


def parse_count_strategy(value) -> CountStrategy:
    return _parse_enum(CountStrategy, value, "count strategy")


def parse_instance_strategy(value) -> InstanceStrategy:
    return _parse_enum(InstanceStrategy, value, "instance strategy")


def parse_gold_source(value) -> GoldSource:
    return _parse_enum(GoldSource, value, "gold source")


def parse_cnp_label(value) -> CnpLabel:
    return _parse_enum(CnpLabel, value, "category label")


@dataclass(frozen=True)
class CountQuery:
    """A count question plus its derived components.

    ``answer_type``, ``entities``, ``relation``, and ``context_terms`` may be
    absent before derivation; ``derive_query_components`` fills them in.
    """

    id: str
    text: str
    answer_type: Optional[str] = None
    entities: tuple[str, ...] = ()
    relation: Optional[str] = None
    context_terms: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("query text must be non-empty")
        object.__setattr__(self, "entities", tuple(self.entities))
        object.__setattr__(self, "context_terms", tuple(self.context_terms))


@dataclass(frozen=True)
class TextSegment:
    """One retrieved text segment at a given retrieval rank."""

    id: str
    rank: int
    text: str

    def __post_init__(self):
        if not self.id:
            raise ValueError("segment id must be non-empty")
        if self.rank < 1:
            raise ValueError(f"segment rank must be >= 1, got {self.rank}")
        if not self.text.strip():
            raise ValueError(f"segment {self.id!r} has empty text")


@dataclass(frozen=True)
class AnswerSpan:
    """A predicted answer span with the model's confidence."""

    segment_id: str
    span: str
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0,1], got {self.confidence}")


@dataclass(frozen=True)
class CountCandidate:
    """An answer span carrying an extracted count.

    The span text doubles as the count-modified noun phrase, so ``cnp_text``
    always equals the underlying span.
    """

    answer_span: AnswerSpan
    value: float
    cnp_text: str

    def __post_init__(self):
        if self.value <= 0:
            raise ValueError(f"count must be positive, got {self.value}")
        if self.value < 1:
            raise ValueError(f"fractional count {self.value} rejected")
        if self.cnp_text != self.answer_span.span:
            raise ValueError("cnp_text must equal the answer span text")

    @property
    def confidence(self) -> float:
        return self.answer_span.confidence

    @property
    def segment_id(self) -> str:
        return self.answer_span.segment_id


@dataclass(frozen=True)
class Consolidation:
    """The consolidated count plus the candidate multiset it came from."""

    c_pred: Optional[float]
    strategy: CountStrategy
    candidates: tuple[CountCandidate, ...]

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.candidates:
            if self.c_pred is not None:
                raise ValueError("c_pred must be absent without candidates")
        elif self.c_pred is None or not any(
            counts_equal(self.c_pred, c.value) for c in self.candidates
        ):
            raise ValueError("c_pred must equal the value of some candidate")


@dataclass(frozen=True)
class GoldInstance:
    """A gold instance as a canonical surface form plus aliases."""

    canonical: str
    aliases: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.canonical.strip():
            raise ValueError("canonical instance name must be non-empty")
        object.__setattr__(self, "aliases", tuple(self.aliases))

    @property
    def all_names(self) -> tuple[str, ...]:
        return (self.canonical, *self.aliases)


@dataclass(frozen=True)
class GoldAnnotation:
    """Ground truth for one query: count, its source, instances, CNP labels."""

    query_id: str
    gold_count: Optional[float]
    source: GoldSource
    gold_instances: tuple[GoldInstance, ...] = ()
    category_labels: tuple[tuple[str, CnpLabel], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gold_instances", tuple(self.gold_instances))
        object.__setattr__(self, "category_labels", tuple(self.category_labels))
        if self.gold_count is not None and self.gold_count <= 0:
            raise ValueError("gold count, when present, must be positive")

    def label_for(self, cnp_text: str) -> Optional[CnpLabel]:
        for text, label in self.category_labels:
            if text == cnp_text:
                return label
        return None


_HOW_MANY_RE = re.compile(r"how\s+many\s+", re.IGNORECASE)


def fallback_answer_type(query_text: str) -> Optional[str]:
    """Regex answer-type guess: the content-word run right after "how many".

    Used when no tagger is bound. Takes every token up to and including the
    first one that is followed by a stopword or the end of the query.
    """
    m = _HOW_MANY_RE.search(query_text)
    tokens = tokenize(query_text[m.end():] if m else query_text)
    run: list[str] = []
    for tok in tokens:
        if tok.text.lower() in STOPWORDS or tok.text.isdigit():
            break
        run.append(tok.text)
    return " ".join(run) if run else None


def derive_query_components(
    query_text: str,
    tagger: "PosTagger | None" = None,
    query_id: str = "",
) -> CountQuery:
    """Split a query into answer type, entities, relation, and context terms.

    The answer type is the first noun with its contiguous preceding
    adjectives; entities are proper-noun runs; the relation is the first
    verb; everything else that carries content becomes a context term.
    Absent components are allowed. Without a tagger, a regex fallback
    recovers the answer type only.
    """
    if not query_text.strip():
        raise ValueError("query text must be non-empty")
    if tagger is None:
        return CountQuery(
            id=query_id,
            text=query_text,
            answer_type=fallback_answer_type(query_text),
        )

    tagged = tagger.tag(query_text)
    used: set[int] = set()

    answer_type = None
    for i, tok in enumerate(tagged):
        if tok.tag == "NOUN":
            start = i
            while start > 0 and tagged[start - 1].tag == "ADJ":
                start -= 1
            answer_type = " ".join(t.text for t in tagged[start:i + 1])
            used.update(range(start, i + 1))
            break

    entities: list[str] = []
    i = 0
    while i < len(tagged):
        if tagged[i].tag == "PROPN":
            j = i
            while j + 1 < len(tagged) and tagged[j + 1].tag == "PROPN":
                j += 1
            entities.append(" ".join(t.text for t in tagged[i:j + 1]))
            used.update(range(i, j + 1))
            i = j + 1
        else:
            i += 1

    relation = None
    for i, tok in enumerate(tagged):
        if tok.tag == "VERB":
            relation = tok.text
            used.add(i)
            break

    context = [
        tok.text
        for i, tok in enumerate(tagged)
        if i not in used
        and tok.tag in ("NOUN", "ADJ", "VERB", "OTHER")
        and tok.text.lower() not in STOPWORDS
    ]

    return CountQuery(
        id=query_id,
        text=query_text,
        answer_type=answer_type,
        entities=tuple(entities),
        relation=relation,
        context_terms=tuple(context),
    )
