"""Remote provider adapters speaking a fixed HTTP+JSON wire protocol.

Request: POST {"kind": "<kind>", "inputs": [<payload>, ...]} to the kind's
endpoint. Response: {"outputs": [<result>, ...]} aligned with the inputs.
Transport failures and 5xx responses are retried twice with exponential
backoff; anything still failing raises ProviderError. A response is
validated against the kind's contract before it is returned, so a
misbehaving server can never smuggle an out-of-contract value into the
pipeline. An optional replay cache short-circuits the network; in offline
mode a cache miss is an error rather than a request.
"""

from __future__ import annotations

import time
from typing import Any, Optional

import requests

from .base import (
    ProviderDescriptor,
    ProviderError,
    ProviderKind,
    SpanPrediction,
    TaggedToken,
)
from .cache import ProviderCache


class _RemoteProvider:
    kind: ProviderKind

    def __init__(
        self,
        endpoint: str,
        *,
        timeout: float = 10.0,
        retries: int = 2,
        backoff: float = 0.5,
        session: Optional[requests.Session] = None,
        cache: Optional[ProviderCache] = None,
        offline: bool = False,
    ):
        if offline and cache is None:
            raise ValueError("offline mode requires a cache")
        self.endpoint = endpoint
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.session = session or requests.Session()
        self.cache = cache
        self.offline = offline

    def describe(self) -> ProviderDescriptor:
        return ProviderDescriptor(self.kind, type(self).__name__, self.endpoint)

    def _call(self, payload: Any) -> Any:
        if self.cache is not None:
            hit, output = self.cache.lookup(self.kind.value, payload)
            if hit:
                return output
            if self.offline:
                raise ProviderError(
                    f"{self.kind.value}: cache miss in offline mode"
                )
        output = self._post([payload])[0]
        if self.cache is not None:
            self.cache.store(self.kind.value, payload, output)
        return output

    def _post(self, inputs: list) -> list:
        body = {"kind": self.kind.value, "inputs": inputs}
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self.session.post(self.endpoint, json=body,
                                         timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500:
                last_error = ProviderError(
                    f"{self.kind.value}: server error {resp.status_code}"
                )
                continue
            if resp.status_code != 200:
                raise ProviderError(
                    f"{self.kind.value}: unexpected status {resp.status_code}"
                )
            try:
                outputs = resp.json()["outputs"]
            except (ValueError, KeyError) as exc:
                raise ProviderError(
                    f"{self.kind.value}: malformed response: {exc}"
                ) from exc
            if not isinstance(outputs, list) or len(outputs) != len(inputs):
                raise ProviderError(
                    f"{self.kind.value}: response outputs do not align with inputs"
                )
            return outputs
        raise ProviderError(
            f"{self.kind.value}: request failed after {self.retries + 1} attempts: "
            f"{last_error}"
        )


def _check_unit(value: Any, what: str) -> float:
    if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
        raise ProviderError(f"{what} must be a number in [0,1], got {value!r}")
    return float(value)


class RemoteSpanPredictor(_RemoteProvider):
    kind = ProviderKind.SPAN_PREDICTOR

    def predict_span(self, query: str, segment_text: str) -> Optional[SpanPrediction]:
        output = self._call({"query": query, "segment": segment_text})
        if output is None:
            return None
        try:
            span, confidence = output["span"], output["confidence"]
        except (KeyError, TypeError) as exc:
            raise ProviderError(f"span predictor: malformed output: {exc}") from exc
        if not isinstance(span, str) or span not in segment_text:
            raise ProviderError("span predictor: span is not a segment substring")
        return SpanPrediction(span, _check_unit(confidence, "span confidence"))


class RemoteSimilarity(_RemoteProvider):
    kind = ProviderKind.SIMILARITY

    def similarity(self, a: str, b: str) -> float:
        output = self._call({"a": a, "b": b})
        if not isinstance(output, (int, float)) or not -1.0 <= float(output) <= 1.0:
            raise ProviderError(f"similarity must lie in [-1,1], got {output!r}")
        return float(output)


class RemoteEntityRecognizer(_RemoteProvider):
    kind = ProviderKind.ENTITY_RECOGNIZER

    def recognize_entities(self, text: str) -> list[str]:
        output = self._call({"text": text})
        if not isinstance(output, list) or not all(
            isinstance(m, str) for m in output
        ):
            raise ProviderError("entity recognizer: output must be a string list")
        return output


class RemoteEntailment(_RemoteProvider):
    kind = ProviderKind.ENTAILMENT

    def entail(self, premise: str, hypothesis: str) -> float:
        output = self._call({"premise": premise, "hypothesis": hypothesis})
        return _check_unit(output, "entailment probability")


class RemotePosTagger(_RemoteProvider):
    kind = ProviderKind.POS_TAGGER

    def tag(self, text: str) -> list[TaggedToken]:
        output = self._call({"text": text})
        if not isinstance(output, list):
            raise ProviderError("pos tagger: output must be a list")
        tagged = []
        for item in output:
            try:
                tagged.append(TaggedToken(item["text"], int(item["start"]),
                                          int(item["end"]), item["tag"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ProviderError(f"pos tagger: malformed token: {exc}") from exc
        return tagged
