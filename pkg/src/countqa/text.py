"""Small text utilities shared by the parsers, providers, and explainer.

Everything here is pure and deterministic; no model calls, no state.
"""

from __future__ import annotations

import re
from typing import NamedTuple

# Closed-class words dropped before overlap / similarity computations.
STOPWORDS = frozenset(
    """
    a an the and or but nor so yet of in on at by for with from to into onto as
    is are was were am be been being do does did done have has had having will
    would shall should can could may might must not no
    that this these those there here it its itself he him his she her hers they
    them their theirs we us our ours you your yours i me my mine who whom whose
    which what when where why how many much
    about also just only very more most some any each every all both few other
    another such own same still too up down out off over under again once than
    then if while because until unless
    """.split()
)

# Words that often front a quantity without changing its value.
APPROXIMATORS = frozenset(
    """
    about approximately around roughly estimated estimate nearly almost some
    over under above below between at least most than more less up to just
    """.split()
)


class Token(NamedTuple):
    text: str
    start: int
    end: int


_WORD_RE = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?|\d+(?:[.,]\d+)*")


def tokenize(text: str) -> list[Token]:
    """Word and number tokens with character offsets; punctuation is skipped."""
    return [Token(m.group(), m.start(), m.end()) for m in _WORD_RE.finditer(text)]


def content_tokens(text: str) -> set[str]:
    """Lowercased tokens minus stopwords, for overlap scoring."""
    return {t.text.lower() for t in tokenize(text)} - STOPWORDS


# Plurals of "-oe" roots, where the generic s-drop is right (shoe, not sho).
_OE_PLURALS = frozenset(
    {"shoes", "toes", "canoes", "oboes", "hoes", "foes", "woes", "throes", "aloes"}
)


def stem(word: str) -> str:
    """Strip common plural suffixes. Intentionally crude but deterministic."""
    w = word.lower()
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 4 and w.endswith(("ches", "shes", "xes", "zes", "sses")):
        return w[:-2]
    if len(w) > 4 and w.endswith("oes") and w not in _OE_PLURALS:
        return w[:-2]
    if len(w) > 3 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


class Sentence(NamedTuple):
    start: int
    end: int


_SENT_BREAK_RE = re.compile(r"[.?!](?=\s)")


def split_sentences(text: str) -> list[Sentence]:
    """Sentence slices split on '. ', '? ', '! '. Offsets index into ``text``."""
    sentences: list[Sentence] = []
    start = 0
    for m in _SENT_BREAK_RE.finditer(text):
        end = m.end()
        if text[start:end].strip():
            sentences.append(Sentence(start, end))
        start = end
    if text[start:].strip():
        sentences.append(Sentence(start, len(text)))
    return sentences


def covering_sentence_span(text: str, start: int, end: int) -> tuple[int, int]:
    """Smallest run of sentences covering [start, end); the whole text if none match."""
    sentences = split_sentences(text)
    if not sentences:
        return 0, len(text)
    first = last = None
    for s in sentences:
        if first is None and start < s.end:
            first = s
        if end > s.start:
            last = s
    if first is None:
        first = sentences[0]
    if last is None:
        last = sentences[-1]
    return first.start, max(first.end, last.end)


def normalize_ws(text: str) -> str:
    return " ".join(text.split())
