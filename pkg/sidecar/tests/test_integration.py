"""End-to-end: the primary toolchain's HTTP clients against a live sidecar."""

import socket
import threading
import time

import pytest
import uvicorn

from redline_sidecar.app import create_app
from redline_sidecar.standins import EMBED_FIXTURE_BASE, EMBED_FIXTURE_TWIN

redline_embedding = pytest.importorskip("redline.embedding")
redline_sentiment = pytest.importorskip("redline.sentiment")


@pytest.fixture(scope="module")
def live_server(standin_config):
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()

    server = uvicorn.Server(
        uvicorn.Config(create_app(standin_config), host="127.0.0.1", port=port, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 30
    import requests

    url = f"http://127.0.0.1:{port}"
    while time.time() < deadline:
        try:
            if requests.get(url + "/health", timeout=1).json()["models_loaded"]:
                break
        except Exception:
            pass
        time.sleep(0.1)
    else:
        raise RuntimeError("sidecar did not come up")
    yield url
    server.should_exit = True
    thread.join(timeout=10)


def test_remote_embedder_against_live_sidecar(live_server):
    provider = redline_embedding.RemoteEmbedder(live_server + "/embed", backoff_s=0.0)
    vectors = provider.embed_batch([EMBED_FIXTURE_BASE, EMBED_FIXTURE_TWIN, EMBED_FIXTURE_BASE])
    assert len(vectors) == 3
    assert redline_embedding.cosine(vectors[0], vectors[2]) == pytest.approx(1.0, abs=1e-6)
    similarity_twin = redline_embedding.cosine(vectors[0], vectors[1])
    assert -1.0 <= similarity_twin <= 1.0


def test_emotion_client_against_live_sidecar(live_server):
    client = redline_sentiment.HttpEmotionClassifier(live_server)
    profiles = redline_sentiment.classify(["Thanks , this looks great !"], client)
    assert len(profiles) == 1
    assert sum(profiles[0].as_tuple()) == pytest.approx(1.0, abs=1e-4)
    counts = client.count(["", "word"])
    assert counts == [2, 3]
