"""Record/replay cache for provider outputs.

One JSON record per line: {"kind", "input_hash", "input", "output"}. The
input is stored alongside its hash so cache files stay inspectable and can
be rebuilt if the hashing scheme ever changes. Reads are lock-free over an
in-memory dict; writes append under a lock.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path
from typing import Any, Optional


def hash_input(payload: Any) -> str:
    canonical = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ProviderCache:
    """Persistent provider-output cache keyed by (kind, input hash)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], Any] = {}
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line_no, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        record = json.loads(line)
                        key = (record["kind"], record["input_hash"])
                        self._entries[key] = record["output"]
                    except (json.JSONDecodeError, KeyError, TypeError) as exc:
                        raise ValueError(
                            f"{self.path}:{line_no}: bad cache record: {exc}"
                        ) from exc

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(self, kind: str, payload: Any) -> tuple[bool, Any]:
        """(hit, output); a stored null output is still a hit."""
        key = (kind, hash_input(payload))
        if key in self._entries:
            return True, self._entries[key]
        return False, None

    def store(self, kind: str, payload: Any, output: Any) -> None:
        digest = hash_input(payload)
        record = {
            "kind": kind,
            "input_hash": digest,
            "input": payload,
            "output": output,
        }
        line = json.dumps(record, ensure_ascii=False)
        with self._lock:
            self._entries[(kind, digest)] = output
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
