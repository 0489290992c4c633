"""Remote adapters and the replay cache, exercised over real HTTP.

A scriptable local server stands in for a model host so retry, fail-fast,
and contract-validation behavior can be observed on the wire rather than
mocked away.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from countqa.providers import (
    LexicalSimilarity,
    ProviderCache,
    ProviderError,
    ProviderKind,
    RemoteEntailment,
    RemoteEntityRecognizer,
    RemotePosTagger,
    RemoteSimilarity,
    RemoteSpanPredictor,
    SimilarityScorer,
    SpanPrediction,
    SpanPredictor,
)
from countqa.providers.cache import hash_input


class _Script:
    """Per-test server behavior: queued responses, then an optional default."""

    def __init__(self):
        self.responses = []          # (status, body) pairs, served in order
        self.default = None          # callable(request_body) -> (status, body)
        self.requests = []           # parsed request bodies, in arrival order
        self.lock = threading.Lock()


def _make_handler(script: _Script):
    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            body = json.loads(self.rfile.read(length).decode("utf-8"))
            with script.lock:
                script.requests.append(body)
                if script.responses:
                    status, payload = script.responses.pop(0)
                elif script.default is not None:
                    status, payload = script.default(body)
                else:
                    status, payload = 200, {"outputs": [None] * len(body["inputs"])}
            raw = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(raw)))
            self.end_headers()
            self.wfile.write(raw)

        def log_message(self, *args):
            pass

    return Handler


@pytest.fixture()
def wire():
    script = _Script()
    server = ThreadingHTTPServer(("127.0.0.1", 0), _make_handler(script))
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield script, f"http://127.0.0.1:{server.server_port}/"
    server.shutdown()
    thread.join(timeout=5)
    server.server_close()


def _fast(cls, url, **kwargs):
    # tiny backoff so retry tests stay quick
    return cls(url, backoff=0.01, **kwargs)


class TestWireProtocol:
    def test_span_round_trip(self, wire):
        script, url = wire
        script.responses.append(
            (200, {"outputs": [{"span": "700 wives", "confidence": 0.9}]})
        )
        predictor = _fast(RemoteSpanPredictor, url)
        got = predictor.predict_span("how many wives", "Solomon had 700 wives.")
        assert got == SpanPrediction("700 wives", 0.9)

    def test_request_body_shape(self, wire):
        script, url = wire
        script.responses.append(
            (200, {"outputs": [{"span": "700 wives", "confidence": 0.9}]})
        )
        _fast(RemoteSpanPredictor, url).predict_span("q", "700 wives text")
        assert script.requests == [
            {"kind": "span_predictor", "inputs": [{"query": "q", "segment": "700 wives text"}]}
        ]

    def test_null_output_means_no_span(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [None]}))
        assert _fast(RemoteSpanPredictor, url).predict_span("q", "text") is None

    def test_server_error_retried_then_succeeds(self, wire):
        script, url = wire
        script.responses.append((503, {"error": "busy"}))
        script.responses.append((200, {"outputs": [0.25]}))
        scorer = _fast(RemoteSimilarity, url)
        assert scorer.similarity("a", "b") == 0.25
        assert len(script.requests) == 2

    def test_server_errors_exhaust_retries(self, wire):
        script, url = wire
        script.responses.extend([(500, {}), (500, {}), (500, {})])
        with pytest.raises(ProviderError, match="3 attempts"):
            _fast(RemoteSimilarity, url).similarity("a", "b")
        assert len(script.requests) == 3

    def test_client_error_fails_fast(self, wire):
        script, url = wire
        script.responses.append((403, {"error": "nope"}))
        with pytest.raises(ProviderError, match="403"):
            _fast(RemoteSimilarity, url).similarity("a", "b")
        assert len(script.requests) == 1

    def test_unreachable_host_raises(self):
        # closed port: connection refused on every attempt
        scorer = RemoteSimilarity("http://127.0.0.1:9/", backoff=0.01, timeout=0.5)
        with pytest.raises(ProviderError, match="3 attempts"):
            scorer.similarity("a", "b")

    def test_missing_outputs_key(self, wire):
        script, url = wire
        script.responses.append((200, {"results": [0.5]}))
        with pytest.raises(ProviderError, match="malformed"):
            _fast(RemoteSimilarity, url).similarity("a", "b")

    def test_misaligned_outputs(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [0.5, 0.6]}))
        with pytest.raises(ProviderError, match="align"):
            _fast(RemoteSimilarity, url).similarity("a", "b")

    def test_describe_carries_endpoint(self, wire):
        _, url = wire
        desc = RemoteEntailment(url).describe()
        assert desc.kind is ProviderKind.ENTAILMENT
        assert desc.name == "RemoteEntailment"
        assert desc.endpoint == url


class TestContracts:
    def test_span_must_be_substring(self, wire):
        script, url = wire
        script.responses.append(
            (200, {"outputs": [{"span": "not present", "confidence": 0.9}]})
        )
        with pytest.raises(ProviderError, match="substring"):
            _fast(RemoteSpanPredictor, url).predict_span("q", "the segment text")

    def test_span_confidence_bounds(self, wire):
        script, url = wire
        script.responses.append(
            (200, {"outputs": [{"span": "segment", "confidence": 1.5}]})
        )
        with pytest.raises(ProviderError, match=r"\[0,1\]"):
            _fast(RemoteSpanPredictor, url).predict_span("q", "the segment text")

    def test_span_missing_field(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [{"span": "segment"}]}))
        with pytest.raises(ProviderError, match="malformed output"):
            _fast(RemoteSpanPredictor, url).predict_span("q", "the segment text")

    def test_similarity_bounds(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [-1.2]}))
        with pytest.raises(ProviderError, match=r"\[-1,1\]"):
            _fast(RemoteSimilarity, url).similarity("a", "b")

    def test_similarity_non_number(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": ["high"]}))
        with pytest.raises(ProviderError, match=r"\[-1,1\]"):
            _fast(RemoteSimilarity, url).similarity("a", "b")

    def test_entities_round_trip(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [["Mauna Kea", "Haleakala"]]}))
        got = _fast(RemoteEntityRecognizer, url).recognize_entities("some text")
        assert got == ["Mauna Kea", "Haleakala"]

    def test_entities_must_be_string_list(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [["Mauna Kea", 7]]}))
        with pytest.raises(ProviderError, match="string list"):
            _fast(RemoteEntityRecognizer, url).recognize_entities("some text")

    def test_entailment_round_trip_and_bounds(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [0.93]}))
        script.responses.append((200, {"outputs": [2.0]}))
        scorer = _fast(RemoteEntailment, url)
        assert scorer.entail("p", "h") == 0.93
        with pytest.raises(ProviderError, match=r"\[0,1\]"):
            scorer.entail("p", "h")

    def test_pos_tagger_round_trip(self, wire):
        script, url = wire
        script.responses.append(
            (200, {"outputs": [[
                {"text": "two", "start": 0, "end": 3, "tag": "NUM"},
                {"text": "cats", "start": 4, "end": 8, "tag": "NOUN"},
            ]]})
        )
        tokens = _fast(RemotePosTagger, url).tag("two cats")
        assert [(t.text, t.start, t.end, t.tag) for t in tokens] == [
            ("two", 0, 3, "NUM"), ("cats", 4, 8, "NOUN"),
        ]

    def test_pos_tagger_malformed_token(self, wire):
        script, url = wire
        script.responses.append((200, {"outputs": [[{"text": "two"}]]}))
        with pytest.raises(ProviderError, match="malformed token"):
            _fast(RemotePosTagger, url).tag("two cats")

    def test_adapters_satisfy_protocols(self, wire):
        _, url = wire
        assert isinstance(RemoteSpanPredictor(url), SpanPredictor)
        assert isinstance(RemoteSimilarity(url), SimilarityScorer)


class TestSimilarityContractOverTheWire:
    """Symmetry and self-similarity hold through the remote adapter too."""

    PHRASES = [
        "estimated 700 languages",
        "about 750 dialects",
        "2000 ethnic groups",
        "85 million native speakers",
        "5 official languages",
    ]

    @pytest.fixture()
    def remote_scorer(self, wire):
        script, url = wire
        backend = LexicalSimilarity()

        def serve(body):
            outs = [backend.similarity(i["a"], i["b"]) for i in body["inputs"]]
            return 200, {"outputs": outs}

        script.default = serve
        return _fast(RemoteSimilarity, url)

    def test_symmetry(self, remote_scorer):
        for a in self.PHRASES:
            for b in self.PHRASES:
                assert remote_scorer.similarity(a, b) == pytest.approx(
                    remote_scorer.similarity(b, a)
                )

    def test_self_similarity_is_one(self, remote_scorer):
        for phrase in self.PHRASES:
            assert remote_scorer.similarity(phrase, phrase) == pytest.approx(1.0)

    def test_range(self, remote_scorer):
        for a in self.PHRASES:
            for b in self.PHRASES:
                assert -1.0 <= remote_scorer.similarity(a, b) <= 1.0


class TestProviderCache:
    def test_hash_is_key_order_invariant(self):
        assert hash_input({"a": 1, "b": 2}) == hash_input({"b": 2, "a": 1})
        assert hash_input({"a": 1}) != hash_input({"a": 2})
        assert len(hash_input({"a": 1})) == 64

    def test_round_trip_through_file(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cache = ProviderCache(path)
        cache.store("similarity", {"a": "x", "b": "y"}, 0.5)
        cache.store("span_predictor", {"query": "q", "segment": "s"}, None)
        assert len(cache) == 2

        reloaded = ProviderCache(path)
        assert len(reloaded) == 2
        hit, output = reloaded.lookup("similarity", {"a": "x", "b": "y"})
        assert hit and output == 0.5
        # a stored null output is a hit, not a miss
        hit, output = reloaded.lookup("span_predictor", {"query": "q", "segment": "s"})
        assert hit and output is None
        hit, _ = reloaded.lookup("similarity", {"a": "x", "b": "z"})
        assert not hit

    def test_record_format(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        ProviderCache(path).store("entailment", {"premise": "p", "hypothesis": "h"}, 0.25)
        record = json.loads(path.read_text(encoding="utf-8"))
        assert set(record) == {"kind", "input_hash", "input", "output"}
        assert record["kind"] == "entailment"
        assert record["input"] == {"premise": "p", "hypothesis": "h"}
        assert record["input_hash"] == hash_input(record["input"])
        assert record["output"] == 0.25

    def test_corrupt_line_rejected(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        path.write_text('{"kind": "similarity"\n', encoding="utf-8")
        with pytest.raises(ValueError, match=":1: bad cache record"):
            ProviderCache(path)

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        path.write_text('{"kind": "similarity", "output": 1}\n', encoding="utf-8")
        with pytest.raises(ValueError, match="bad cache record"):
            ProviderCache(path)

    def test_blank_lines_tolerated(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        cache = ProviderCache(path)
        cache.store("similarity", {"a": "x", "b": "y"}, 0.5)
        path.write_text(path.read_text(encoding="utf-8") + "\n", encoding="utf-8")
        assert len(ProviderCache(path)) == 1


class TestCachedRemote:
    def test_network_result_is_cached(self, wire, tmp_path):
        script, url = wire
        script.responses.append((200, {"outputs": [0.5]}))
        cache = ProviderCache(tmp_path / "cache.jsonl")
        scorer = _fast(RemoteSimilarity, url, cache=cache)
        assert scorer.similarity("a", "b") == 0.5
        assert scorer.similarity("a", "b") == 0.5
        assert len(script.requests) == 1

    def test_prewarmed_cache_skips_network(self, wire, tmp_path):
        script, url = wire
        path = tmp_path / "cache.jsonl"
        ProviderCache(path).store("similarity", {"a": "a", "b": "b"}, -0.25)
        scorer = _fast(RemoteSimilarity, url, cache=ProviderCache(path))
        assert scorer.similarity("a", "b") == -0.25
        assert script.requests == []

    def test_cached_none_span_is_replayed(self, wire, tmp_path):
        script, url = wire
        script.responses.append((200, {"outputs": [None]}))
        cache = ProviderCache(tmp_path / "cache.jsonl")
        predictor = _fast(RemoteSpanPredictor, url, cache=cache)
        assert predictor.predict_span("q", "text") is None
        assert predictor.predict_span("q", "text") is None
        assert len(script.requests) == 1

    def test_offline_requires_cache(self):
        with pytest.raises(ValueError, match="offline mode requires a cache"):
            RemoteSimilarity("http://example.invalid/", offline=True)

    def test_offline_miss_is_an_error_not_a_request(self, wire, tmp_path):
        script, url = wire
        cache = ProviderCache(tmp_path / "cache.jsonl")
        scorer = _fast(RemoteSimilarity, url, cache=cache, offline=True)
        with pytest.raises(ProviderError, match="cache miss in offline mode"):
            scorer.similarity("a", "b")
        assert script.requests == []

    def test_offline_hit_works(self, tmp_path):
        path = tmp_path / "cache.jsonl"
        ProviderCache(path).store("similarity", {"a": "a", "b": "b"}, 1.0)
        scorer = RemoteSimilarity(
            "http://example.invalid/", cache=ProviderCache(path), offline=True
        )
        assert scorer.similarity("a", "b") == 1.0

    def test_cache_validation_still_applies(self, wire, tmp_path):
        # out-of-contract values are rejected even when replayed from cache
        _, url = wire
        path = tmp_path / "cache.jsonl"
        ProviderCache(path).store("similarity", {"a": "a", "b": "b"}, 3.5)
        scorer = RemoteSimilarity(url, cache=ProviderCache(path), offline=True)
        with pytest.raises(ProviderError, match=r"\[-1,1\]"):
            scorer.similarity("a", "b")
