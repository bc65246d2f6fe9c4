import httpx
import pytest
from fastapi.testclient import TestClient

from textorigin.engine import EngineConfig, compute_perplexity
from textorigin.errors import TransportError
from textorigin.scoring import RemoteScorer, build_scorer_app


@pytest.fixture()
def remote(trained_scorer) -> RemoteScorer:
    app = build_scorer_app(trained_scorer)
    client = TestClient(app, base_url="http://scorer")
    return RemoteScorer("http://scorer", client=client)


TEXT = "It is important to note that a careful, balanced approach is essential."


class TestWireFormat:
    def test_descriptor_fields(self, trained_scorer):
        client = TestClient(build_scorer_app(trained_scorer))
        body = client.get("/v1/descriptor").json()
        assert set(body) == {"name", "vocab_size", "max_window"}

    def test_tokenize_fields(self, trained_scorer):
        client = TestClient(build_scorer_app(trained_scorer))
        body = client.post("/v1/tokenize", json={"text": TEXT}).json()
        assert set(body) == {"ids", "tokens"}
        assert len(body["ids"]) == len(body["tokens"])

    def test_score_window_fields(self, trained_scorer):
        client = TestClient(build_scorer_app(trained_scorer))
        ids = client.post("/v1/tokenize", json={"text": TEXT}).json()["ids"]
        body = client.post("/v1/score_window", json={"ids": ids, "target_len": 3}).json()
        assert set(body) == {"mean_nll", "target_tokens"}
        assert body["target_tokens"] == 3

    def test_full_precision_floats(self, trained_scorer):
        client = TestClient(build_scorer_app(trained_scorer))
        ids = client.post("/v1/tokenize", json={"text": TEXT}).json()["ids"]
        wire = client.post("/v1/score_window", json={"ids": ids, "target_len": 3}).json()["mean_nll"]
        assert wire == trained_scorer.score_window(tuple(ids), 3)


class TestRemoteScorer:
    def test_matches_local_backend(self, remote, trained_scorer):
        local_seq = trained_scorer.tokenize(TEXT)
        remote_seq = remote.tokenize(TEXT)
        assert remote_seq.ids == local_seq.ids
        assert remote_seq.surface == local_seq.surface
        assert remote.descriptor() == trained_scorer.descriptor()
        assert remote.score_window(local_seq.ids, 4) == trained_scorer.score_window(local_seq.ids, 4)

    def test_engine_over_remote_bit_identical(self, remote, trained_scorer):
        config = EngineConfig(m_len=8, stride=4)
        via_remote = compute_perplexity(TEXT, remote, config)
        via_local = compute_perplexity(TEXT, trained_scorer, config)
        assert via_remote.perplexity == via_local.perplexity
        assert via_remote.windows == via_local.windows

    def test_descriptor_cached(self, trained_scorer):
        calls = []
        app = build_scorer_app(trained_scorer)
        client = TestClient(app)
        original = client.request

        def counting(method, url, **kwargs):
            calls.append(str(url))
            return original(method, url, **kwargs)

        client.request = counting
        scorer = RemoteScorer("http://testserver", client=client)
        scorer.descriptor()
        scorer.descriptor()
        assert sum("descriptor" in u for u in calls) == 1


class TestTransportFailures:
    def test_unreachable_server(self):
        def refuse(request):
            raise httpx.ConnectError("connection refused")

        client = httpx.Client(transport=httpx.MockTransport(refuse))
        scorer = RemoteScorer("http://down", client=client)
        with pytest.raises(TransportError):
            scorer.tokenize("hello there")
        with pytest.raises(TransportError):
            scorer.descriptor()

    def test_bad_status_carries_detail(self):
        def server_error(request):
            return httpx.Response(500, text="boom")

        client = httpx.Client(transport=httpx.MockTransport(server_error))
        scorer = RemoteScorer("http://broken", client=client)
        with pytest.raises(TransportError) as exc_info:
            scorer.tokenize("hello")
        assert "500" in str(exc_info.value)

    def test_malformed_body(self):
        def bad_json(request):
            return httpx.Response(200, text="not json")

        client = httpx.Client(transport=httpx.MockTransport(bad_json))
        scorer = RemoteScorer("http://weird", client=client)
        with pytest.raises(TransportError):
            scorer.tokenize("hello")

    def test_server_rejects_bad_target_len(self, trained_scorer):
        client = TestClient(build_scorer_app(trained_scorer))
        response = client.post("/v1/score_window", json={"ids": [0, 1], "target_len": 5})
        assert response.status_code == 422
