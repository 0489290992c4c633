"""Count extraction from answer spans.

Three rules run as a cascade. A numeric literal or a worded number anchored
at the start of the span wins first; otherwise a fallback scans the rest of
the span left to right and returns the first usable quantity, which covers
spans led by approximators ("approximately 180", "more than 150").

Candidates are vetoed when the quantity is zero or negative, lies in the
open interval (0, 1) (a fraction is not an entity count), carries a
measurement or currency unit, or sits next to a currency or percent sign.
A vetoed candidate does not stop the scan; later positions are still tried.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

from .text import normalize_ws


class ParseMethod(Enum):
    NUMERIC_LITERAL = "numeric_literal"
    WORDED_NUMBER = "worded_number"
    QUANTIFIER_FALLBACK = "quantifier_fallback"


@dataclass(frozen=True)
class ParsedQuantity:
    """A quantity found in a span: its value, surface text, and the rule used.

    ``start``/``end`` are character offsets of ``matched_text`` within the
    input span, kept so the qualifier split can remove the right occurrence.
    """

    value: float
    matched_text: str
    method: ParseMethod
    start: int
    end: int

    def __post_init__(self):
        # Zero, negatives, and fractions in (0,1) are all below one.
        if self.value < 1:
            raise ValueError(f"unusable quantity {self.value}")


_UNITS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
_TEENS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18,
    "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_SCALES = {"hundred": 100, "thousand": 1_000, "million": 1_000_000,
           "billion": 1_000_000_000}
# Idioms behave like scales: "a dozen" is 12, "three dozen" 36.
_IDIOM_SCALES = {"dozen": 12}

_NUMBER_WORDS = (
    set(_UNITS) | set(_TEENS) | set(_TENS) | set(_SCALES)
    | set(_IDIOM_SCALES) | {"zero", "a", "an", "and"}
)

# Articles and "and" can open a worded number but are not numeric on their own.
_STANDALONE_NUMBER_WORDS = _NUMBER_WORDS - {"a", "an", "and"}


def is_number_word(word: str) -> bool:
    """True for words the worded-number grammar reads as numeric ("eight")."""
    return word.lower() in _STANDALONE_NUMBER_WORDS

# Quantities followed by one of these are measurements, money, or ratios,
# not entity counts.
_UNIT_BLOCKLIST = frozenset("""
    percent percentage dollar dollars euro euros cent cents usd eur gbp yen
    kilometer kilometers kilometre kilometres km mile miles meter meters
    metre metres foot feet ft inch inches centimeter centimeters cm
    millimeter millimeters mm kilogram kilograms kg gram grams tonne tonnes
    ton tons pound pounds lb lbs ounce ounces oz liter liters litre litres
    gallon gallons second seconds minute minutes hour hours degree degrees
    """.split())

_CURRENCY_CHARS = "$€£¥"

# Digit-led tokens keep internal thousands separators (comma, thin or
# non-breaking space) and a decimal point; word tokens split at hyphens so
# "twenty-one" arrives as two tokens.
_TOKEN_RE = re.compile(r"\d+(?:[.,   ]\d+)*|[A-Za-z]+")


class _Tok(NamedTuple):
    text: str
    start: int
    end: int


def _tokens(span: str) -> list[_Tok]:
    return [_Tok(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(span)]


def _parse_numeric_token(tok: str) -> Optional[float]:
    """Parse one digit-led token, honoring separators; None when malformed."""
    cleaned = tok.replace(" ", ",").replace(" ", ",").replace(" ", ",")
    if "," in cleaned:
        head, *groups = cleaned.split(",")
        # Thousands grouping requires exactly three digits per group.
        if any(len(g.split(".")[0]) != 3 for g in groups):
            cleaned = head
        else:
            cleaned = head + "".join(groups)
    if cleaned.count(".") > 1:
        cleaned = ".".join(cleaned.split(".")[:2])
    try:
        value = float(cleaned)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


class _Candidate(NamedTuple):
    value: float
    tok_start: int
    tok_end: int  # exclusive


def _scale_chain(tokens: list[_Tok], value: float, j: int) -> tuple[float, int]:
    """Multiply through trailing scale words: "85 million" -> 85000000."""
    while j < len(tokens):
        word = tokens[j].text.lower()
        scale = _SCALES.get(word) or _IDIOM_SCALES.get(word)
        if scale is None:
            break
        value *= scale
        j += 1
    return value, j


def _numeric_candidate(tokens: list[_Tok], i: int) -> Optional[_Candidate]:
    value = _parse_numeric_token(tokens[i].text)
    if value is None:
        return None
    value, j = _scale_chain(tokens, value, i + 1)
    return _Candidate(value, i, j)


def _worded_candidate(tokens: list[_Tok], i: int) -> Optional[_Candidate]:
    """Maximal worded number starting at token i, or None.

    Standard accumulate-and-carry grammar over units, teens, tens, and
    scales. "a"/"an" counts as 1 only when a scale word follows. The walk
    remembers the last position where the parse was complete, so trailing
    "and" or a dangling article never leaks into the match.
    """
    total = 0.0
    group = 0.0
    article = False
    consumed_any = False
    last_good: Optional[tuple[int, float]] = None
    j = i
    while j < len(tokens):
        word = tokens[j].text.lower()
        if word in ("a", "an"):
            if consumed_any or article:
                break
            article = True
            j += 1
            continue
        if word == "and":
            if not consumed_any:
                break
            j += 1
            continue
        if word == "zero":
            if consumed_any or article:
                break
            last_good = (j + 1, 0.0)
            break
        if word in _UNITS:
            if article or (group % 100 != 0 and (group % 100 < 20 or group % 10 != 0)):
                break
            group += _UNITS[word]
        elif word in _TEENS:
            if article or group % 100 != 0:
                break
            group += _TEENS[word]
        elif word in _TENS:
            if article or group % 100 != 0:
                break
            group += _TENS[word]
        elif word == "hundred":
            # "seventeen hundred" is 1700; a bare or article-led "hundred" is 100.
            if group >= 100 or total and group == 0 and not article:
                break
            group = max(group, 1.0) * 100
            article = False
        elif word in _SCALES or word in _IDIOM_SCALES:
            scale = _SCALES.get(word) or _IDIOM_SCALES[word]
            total += max(group, 1.0) * scale
            group = 0.0
            article = False
        else:
            break
        consumed_any = True
        last_good = (j + 1, total + group)
        j += 1
    if last_good is None:
        return None
    end, value = last_good
    return _Candidate(value, i, end)


def _candidate_at(tokens: list[_Tok], i: int) -> Optional[_Candidate]:
    if tokens[i].text[0].isdigit():
        return _numeric_candidate(tokens, i)
    if tokens[i].text.lower() in _NUMBER_WORDS:
        return _worded_candidate(tokens, i)
    return None


def _vetoed(span: str, tokens: list[_Tok], cand: _Candidate) -> bool:
    if cand.value < 1:
        return True
    if cand.tok_end < len(tokens):
        if tokens[cand.tok_end].text.lower() in _UNIT_BLOCKLIST:
            return True
    # Adjacent currency or percent signs are not separate tokens; look at
    # the raw characters around the match.
    before = span[:tokens[cand.tok_start].start].rstrip()
    if before and before[-1] in _CURRENCY_CHARS:
        return True
    after = span[tokens[cand.tok_end - 1].end:].lstrip()
    if after and after[0] == "%":
        return True
    return False


def extract_count(span_text: str) -> Optional[ParsedQuantity]:
    """Return the leftmost usable quantity in the span, or None.

    A quantity anchored at the very first token reports the rule that read
    it (NumericLiteral or WordedNumber); anything found later in the span
    is attributed to the quantifier fallback.
    """
    tokens = _tokens(span_text)
    i = 0
    while i < len(tokens):
        cand = _candidate_at(tokens, i)
        if cand is None:
            i += 1
            continue
        if _vetoed(span_text, tokens, cand):
            i = cand.tok_end
            continue
        start = tokens[cand.tok_start].start
        end = tokens[cand.tok_end - 1].end
        if cand.tok_start == 0:
            if tokens[0].text[0].isdigit():
                method = ParseMethod.NUMERIC_LITERAL
            else:
                method = ParseMethod.WORDED_NUMBER
        else:
            method = ParseMethod.QUANTIFIER_FALLBACK
        return ParsedQuantity(cand.value, span_text[start:end], method, start, end)
    return None


def split_count_and_qualifier(
    span_text: str, parsed: ParsedQuantity
) -> tuple[float, str]:
    """Separate the count from the rest of the phrase.

    The qualifier is the span with the matched number excised and whitespace
    renormalized: ("17 regional languages", 17@"17") -> "regional languages".
    """
    if span_text[parsed.start:parsed.end] != parsed.matched_text:
        raise ValueError("parsed quantity does not belong to this span")
    qualifier = normalize_ws(span_text[:parsed.start] + " " + span_text[parsed.end:])
    return parsed.value, qualifier
