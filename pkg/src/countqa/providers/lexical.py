"""Deterministic lexical providers.

These are word-overlap stand-ins for the neural models the pipeline expects:
good enough to exercise every code path, reproducible to the byte, and free
of any runtime model dependency. They are the default bindings for tests and
offline runs; production runs bind remote adapters instead.
"""

from __future__ import annotations

import re
from typing import Optional

from ..quantities import is_number_word
from ..text import (
    APPROXIMATORS,
    STOPWORDS,
    Token,
    content_tokens,
    split_sentences,
    stem,
    tokenize,
)
from .base import SpanPrediction, TaggedToken

_SPAN_WINDOW = 6


def _require(value: str, what: str) -> None:
    if not value.strip():
        raise ValueError(f"{what} must be non-empty")


def _is_numeric_token(tok: Token) -> bool:
    return tok.text[0].isdigit() or is_number_word(tok.text)


class LexicalSpanPredictor:
    """Overlap-ranked sentence selection with a token window around a focus.

    The sentence sharing the most content tokens with the query wins; inside
    it, the span is a window of up to six tokens centered on the first
    numeric token, falling back to the first capitalized token, then to the
    sentence start. Confidence is the fraction of the query's content tokens
    found in the winning sentence. Zero overlap means no span.
    """

    def predict_span(self, query: str, segment_text: str) -> Optional[SpanPrediction]:
        _require(query, "query")
        _require(segment_text, "segment text")
        query_terms = content_tokens(query)
        if not query_terms:
            return None

        best_shared: set[str] = set()
        best = None
        for sent in split_sentences(segment_text):
            shared = content_tokens(segment_text[sent.start:sent.end]) & query_terms
            if len(shared) > len(best_shared):
                best_shared, best = shared, sent
        if best is None or not best_shared:
            return None

        sentence = segment_text[best.start:best.end]
        tokens = tokenize(sentence)
        if not tokens:
            return None
        anchor = 0
        for idx, tok in enumerate(tokens):
            if _is_numeric_token(tok):
                anchor = idx
                break
        else:
            for idx, tok in enumerate(tokens):
                if tok.text[0].isupper():
                    anchor = idx
                    break
        lo = max(0, anchor - 2)
        hi = min(len(tokens), lo + _SPAN_WINDOW)
        lo = max(0, hi - _SPAN_WINDOW)
        span_text = sentence[tokens[lo].start:tokens[hi - 1].end]
        confidence = min(1.0, len(best_shared) / len(query_terms))
        if confidence <= 0.0:
            return None
        return SpanPrediction(span_text, confidence)


# Hedges ("about", "estimated") say nothing about what a phrase denotes, so
# they are ignored alongside stopwords when comparing phrases.
_SIMILARITY_NOISE = STOPWORDS | APPROXIMATORS


class LexicalSimilarity:
    """2*Jaccard - 1 over lowercased, stopword-filtered, stemmed tokens."""

    def similarity(self, a: str, b: str) -> float:
        _require(a, "text a")
        _require(b, "text b")
        ta = {stem(t.text) for t in tokenize(a) if t.text.lower() not in _SIMILARITY_NOISE}
        tb = {stem(t.text) for t in tokenize(b) if t.text.lower() not in _SIMILARITY_NOISE}
        if not ta and not tb:
            return 1.0
        union = ta | tb
        jaccard = len(ta & tb) / len(union)
        return 2.0 * jaccard - 1.0


# Lowercase words allowed inside a capitalized run ("Gulf of Mexico").
_RUN_CONNECTORS = frozenset({"of", "the"})


class LexicalEntityRecognizer:
    """Maximal runs of capitalized tokens, allowing internal "of"/"the".

    Runs only extend across whitespace, so "Oahu, Maui" is two mentions.
    A lone capitalized stopword, hedge, or number word at a sentence start
    ("The", "How", "Roughly", "Two") is not a mention. Digit-led tokens
    break runs.
    """

    def recognize_entities(self, text: str) -> list[str]:
        tokens = tokenize(text)
        if not tokens:
            return []
        sentence_starts = set()
        for sent in split_sentences(text):
            for tok in tokens:
                if tok.start >= sent.start:
                    sentence_starts.add(tok.start)
                    break

        def capitalized(tok: Token) -> bool:
            return tok.text[0].isupper()

        def joinable(left: Token, right: Token) -> bool:
            return text[left.end:right.start].isspace()

        mentions: list[str] = []
        i = 0
        while i < len(tokens):
            if not capitalized(tokens[i]):
                i += 1
                continue
            j = i
            while j + 1 < len(tokens) and joinable(tokens[j], tokens[j + 1]):
                nxt = tokens[j + 1]
                if capitalized(nxt):
                    j += 1
                elif (nxt.text in _RUN_CONNECTORS and j + 2 < len(tokens)
                      and joinable(nxt, tokens[j + 2])
                      and capitalized(tokens[j + 2])):
                    j += 2
                else:
                    break
            run = tokens[i:j + 1]
            word = run[0].text.lower()
            lone_initial_filler = (
                len(run) == 1
                and run[0].start in sentence_starts
                and (word in STOPWORDS or word in APPROXIMATORS
                     or is_number_word(run[0].text))
            )
            if not lone_initial_filler:
                mentions.append(text[run[0].start:run[-1].end])
            i = j + 1
        return mentions


_HYPOTHESIS_RE = re.compile(r"\bis\s+an?\s+(.+)$", re.IGNORECASE)


class LexicalEntailment:
    """Head-noun containment check.

    The hypothesis is expected to look like "(instance) is a (answer type)".
    If the answer type's head noun (its last token, stemmed) occurs in the
    premise, the premise is taken to entail the hypothesis with probability
    1.0; otherwise a fixed 0.25 reflects "possible but unsupported".
    """

    def entail(self, premise: str, hypothesis: str) -> float:
        _require(premise, "premise")
        _require(hypothesis, "hypothesis")
        m = _HYPOTHESIS_RE.search(hypothesis)
        tail = m.group(1) if m else hypothesis
        tail_tokens = tokenize(tail)
        if not tail_tokens:
            return 0.25
        head = stem(tail_tokens[-1].text)
        premise_stems = {stem(t.text) for t in tokenize(premise)}
        return 1.0 if head in premise_stems else 0.25


_AUX = frozenset("""
    is are was were am be been being do does did done has have had having
    will would shall should can could may might must
    """.split())

_FUNC = frozenset("""
    the a an this that these those some any each every all both few certain
    such same other another
    of in on at by for with from to into onto over under between among during
    since until within without against about around near off up down out
    and or but nor so yet not no
    he she it they we you i him her them us me his their its our your my
    hers theirs ours yours mine
    who whom whose which what when where why how many much there
    """.split())

_VERBS = frozenset("""
    win won wins write wrote writes sing sang sung sings play played plays
    record recorded release released speak spoke speaks make made makes
    direct directed produce produced star starred marry married score scored
    appear appeared compose composed publish published found founded create
    created build built own owned host hosted serve served live lived lives
    die died visit visited erupt erupted exist existed contain contained
    border bordered orbit orbited hold held run ran sell sold buy bought
    fly flew govern governed rule ruled
    """.split())

_PREPOSITIONS = frozenset(
    "in of at on by for from near within inside outside across around between".split()
)
_ARTICLES = frozenset({"the", "a", "an"})


class LexicalPosTagger:
    """Coarse heuristic tagger for count-style queries.

    Closed-class lists decide AUX/FUNC/NUM; the first content run after
    "how many" (or at the query start) becomes ADJ* NOUN; a verb lexicon
    plus a participle-after-auxiliary rule finds VERBs; proper nouns are
    capitalized tokens, content following a preposition, or content wedged
    between an auxiliary and the next tagged token. Leftover content is
    OTHER. Built for short queries, not prose.
    """

    def tag(self, text: str) -> list[TaggedToken]:
        tokens = tokenize(text)
        tags: list[Optional[str]] = []
        for tok in tokens:
            low = tok.text.lower()
            if tok.text[0].isdigit() or is_number_word(low):
                tags.append("NUM")
            elif low in _AUX:
                tags.append("AUX")
            elif low in _FUNC:
                tags.append("FUNC")
            else:
                tags.append(None)  # content, decided below

        self._tag_answer_type(tokens, tags)
        self._tag_verbs(tokens, tags)
        self._tag_proper_nouns(tokens, tags)
        return [
            TaggedToken(tok.text, tok.start, tok.end, tag or "OTHER")
            for tok, tag in zip(tokens, tags)
        ]

    def _tag_answer_type(self, tokens, tags) -> None:
        start = 0
        for i in range(len(tokens) - 1):
            if (tokens[i].text.lower() == "how"
                    and tokens[i + 1].text.lower() == "many"):
                start = i + 2
                break
        i = start
        while i < len(tokens) and tags[i] is not None:
            i += 1
        if i == len(tokens):
            return
        run = [i]
        j = i + 1
        # The run keeps going over content words but stops at a known verb,
        # so "people live" yields the noun "people", not "people live".
        while (j < len(tokens) and tags[j] is None
               and tokens[j].text.lower() not in _VERBS):
            run.append(j)
            j += 1
        for k in run[:-1]:
            tags[k] = "ADJ"
        tags[run[-1]] = "NOUN"

    def _tag_verbs(self, tokens, tags) -> None:
        for i, tok in enumerate(tokens):
            if tags[i] is not None:
                continue
            low = tok.text.lower()
            if low in _VERBS:
                tags[i] = "VERB"
                continue
            # Participle right after an auxiliary ("are spoken", "was built").
            if low.endswith(("ed", "en")):
                k = i - 1
                while k >= 0 and tags[k] == "FUNC":
                    k -= 1
                if k >= 0 and tags[k] == "AUX":
                    tags[i] = "VERB"

    def _tag_proper_nouns(self, tokens, tags) -> None:
        for i, tok in enumerate(tokens):
            if tags[i] is None and tok.text[0].isupper():
                tags[i] = "PROPN"
        for i, tok in enumerate(tokens):
            low = tok.text.lower()
            if low in _PREPOSITIONS or tags[i] == "AUX":
                j = i + 1
                while j < len(tokens) and tokens[j].text.lower() in _ARTICLES:
                    j += 1
                while j < len(tokens) and tags[j] in (None, "PROPN"):
                    tags[j] = "PROPN"
                    j += 1
