"""Dataset and prediction file IO.

Datasets are JSON Lines, one query per line:

    {"id": "...", "query": "...", "gold_count": 700 | null,
     "gold_source": "kg" | "snippet" | "no_direct_answer",
     "gold_instances": [{"canonical": "...", "aliases": ["..."]}],
     "segments": [{"id": "...", "rank": 1, "text": "..."}],
     "cnp_gold": {"<cnp text>": "synonym" | "subgroup" | "incomparable"}}

All strings are NFC-normalized at load so alias matching is stable across
differently-composed inputs. Strict loading aborts on the first malformed
line with its line number; lenient loading skips bad lines and logs them.
"""

from __future__ import annotations

import json
import logging
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .results import QueryResult
from .types import (
    CountQuery,
    GoldAnnotation,
    GoldInstance,
    TextSegment,
    parse_cnp_label,
    parse_gold_source,
)

logger = logging.getLogger(__name__)


class DatasetError(Exception):
    """A dataset file could not be read or failed schema validation."""


@dataclass(frozen=True)
class DatasetRecord:
    """One query with its gold annotation and rank-ordered segments."""

    query: CountQuery
    gold: GoldAnnotation
    segments: tuple[TextSegment, ...]

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))


def _nfc(value: str) -> str:
    return unicodedata.normalize("NFC", value)


def _require_str(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise DatasetError(f"{where}: field {key!r} must be a non-empty string")
    return _nfc(value)


def _parse_record(obj: object, where: str) -> DatasetRecord:
    if not isinstance(obj, dict):
        raise DatasetError(f"{where}: record must be a JSON object")
    record_id = _require_str(obj, "id", where)
    query_text = _require_str(obj, "query", where)

    gold_count = obj.get("gold_count")
    if gold_count is not None and not isinstance(gold_count, (int, float)):
        raise DatasetError(f"{where}: gold_count must be a number or null")
    source_raw = obj.get("gold_source")
    if not isinstance(source_raw, str):
        raise DatasetError(f"{where}: field 'gold_source' is required")
    try:
        source = parse_gold_source(source_raw)
    except ValueError as exc:
        raise DatasetError(f"{where}: {exc}") from exc

    instances = []
    raw_instances = obj.get("gold_instances", [])
    if not isinstance(raw_instances, list):
        raise DatasetError(f"{where}: gold_instances must be a list")
    for idx, item in enumerate(raw_instances):
        if not isinstance(item, dict):
            raise DatasetError(f"{where}: gold_instances[{idx}] must be an object")
        canonical = _require_str(item, "canonical", f"{where}: gold_instances[{idx}]")
        aliases = item.get("aliases", [])
        if not isinstance(aliases, list) or not all(
            isinstance(a, str) for a in aliases
        ):
            raise DatasetError(
                f"{where}: gold_instances[{idx}].aliases must be a string list"
            )
        instances.append(GoldInstance(canonical, tuple(_nfc(a) for a in aliases)))

    labels = []
    raw_labels = obj.get("cnp_gold") or {}
    if not isinstance(raw_labels, dict):
        raise DatasetError(f"{where}: cnp_gold must be an object")
    for text, label in raw_labels.items():
        try:
            labels.append((_nfc(text), parse_cnp_label(label)))
        except ValueError as exc:
            raise DatasetError(f"{where}: {exc}") from exc

    segments = []
    raw_segments = obj.get("segments")
    if not isinstance(raw_segments, list):
        raise DatasetError(f"{where}: field 'segments' must be a list")
    previous_rank = 0
    seen_ids: set[str] = set()
    for idx, item in enumerate(raw_segments):
        seg_where = f"{where}: segments[{idx}]"
        if not isinstance(item, dict):
            raise DatasetError(f"{seg_where} must be an object")
        seg_id = _require_str(item, "id", seg_where)
        text = _require_str(item, "text", seg_where)
        rank = item.get("rank")
        if not isinstance(rank, int):
            raise DatasetError(f"{seg_where}: rank must be an integer")
        if rank <= previous_rank:
            raise DatasetError(
                f"{seg_where}: ranks must be strictly increasing "
                f"({rank} after {previous_rank})"
            )
        if seg_id in seen_ids:
            raise DatasetError(f"{seg_where}: duplicate segment id {seg_id!r}")
        seen_ids.add(seg_id)
        previous_rank = rank
        try:
            segments.append(TextSegment(seg_id, rank, text))
        except ValueError as exc:
            raise DatasetError(f"{seg_where}: {exc}") from exc

    try:
        query = CountQuery(id=record_id, text=query_text)
        gold = GoldAnnotation(
            query_id=record_id,
            gold_count=float(gold_count) if gold_count is not None else None,
            source=source,
            gold_instances=tuple(instances),
            category_labels=tuple(labels),
        )
    except ValueError as exc:
        raise DatasetError(f"{where}: {exc}") from exc
    return DatasetRecord(query=query, gold=gold, segments=tuple(segments))


def _iter_lines(
    path: Path,
) -> Iterable[tuple[int, object, Optional[DatasetError]]]:
    """Yield (line_no, parsed object, parse error) per non-blank line."""
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    for line_no, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield line_no, json.loads(line), None
        except json.JSONDecodeError as exc:
            yield line_no, None, DatasetError(
                f"{path}:{line_no}: invalid JSON: {exc}"
            )


def load_dataset(path: str | Path, strict: bool = True) -> list[DatasetRecord]:
    """Load and validate a JSONL dataset.

    Strict mode raises DatasetError naming the offending line; lenient mode
    logs and skips bad lines. An empty file loads as an empty list with a
    warning either way.
    """
    path = Path(path)
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    for line_no, obj, error in _iter_lines(path):
        where = f"{path}:{line_no}"
        try:
            if error is not None:
                raise error
            record = _parse_record(obj, where)
            if record.query.id in seen:
                raise DatasetError(f"{where}: duplicate query id {record.query.id!r}")
        except DatasetError as exc:
            if strict:
                raise
            logger.warning("skipping bad dataset line: %s", exc)
            continue
        seen.add(record.query.id)
        records.append(record)
    if not records:
        logger.warning("dataset %s contains no records", path)
    return records


def validate_dataset(path: str | Path) -> list[str]:
    """All schema problems in the file, as human-readable strings."""
    path = Path(path)
    issues: list[str] = []
    seen: set[str] = set()
    try:
        lines = list(_iter_lines(path))
    except DatasetError as exc:
        return [str(exc)]
    for line_no, obj, error in lines:
        where = f"{path}:{line_no}"
        if error is not None:
            issues.append(str(error))
            continue
        try:
            record = _parse_record(obj, where)
        except DatasetError as exc:
            issues.append(str(exc))
            continue
        if record.query.id in seen:
            issues.append(f"{where}: duplicate query id {record.query.id!r}")
        seen.add(record.query.id)
    return issues


def write_predictions(results: Sequence[QueryResult], path: str | Path) -> None:
    """Write one JSON line per result, ordered by query id."""
    path = Path(path)
    ordered = sorted(results, key=lambda r: r.query.id)
    lines = [
        json.dumps(result.to_record(), ensure_ascii=False) for result in ordered
    ]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_predictions(path: str | Path) -> list[dict]:
    """Load a predictions file back into per-query record dicts."""
    records = []
    seen: set[str] = set()
    for line_no, obj, error in _iter_lines(Path(path)):
        if error is not None:
            raise error
        if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
            raise DatasetError(f"{path}:{line_no}: not a prediction record")
        if "c_pred" not in obj:
            raise DatasetError(f"{path}:{line_no}: missing c_pred")
        if obj["id"] in seen:
            raise DatasetError(f"{path}:{line_no}: duplicate prediction id")
        seen.add(obj["id"])
        records.append(obj)
    return records
