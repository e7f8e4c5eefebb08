from fastapi.testclient import TestClient

from redline_sidecar.app import create_app
from redline_sidecar.models import EMOTIONS

SNIPPET = "def add(a, b):\n    return a + b\n"
COMMENTS = [
    "Thanks , this looks great !",
    "Please fix the loop bounds before merging .",
    "why was the old parser removed ?",
]


def test_health_reports_unloaded_before_startup(standin_config):
    app = create_app(standin_config)
    cold = TestClient(app)  # no lifespan: models never load
    body = cold.get("/health").json()
    assert body == {"status": "ok", "models_loaded": False}
    assert cold.post("/embed", json={"texts": ["x"]}).status_code == 503
    assert cold.post("/classify", json={"texts": ["x"]}).status_code == 503
    assert cold.post("/count_tokens", json={"texts": ["x"]}).status_code == 503


def test_health_after_startup(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "models_loaded": True}


# --- /embed ------------------------------------------------------------------


def test_embed_identical_texts_identical_vectors(client):
    body = client.post("/embed", json={"texts": [SNIPPET, SNIPPET]}).json()
    assert body["vectors"][0] == body["vectors"][1]
    assert body["model"].endswith("#mean-pool")


def test_embed_order_and_length_preserved(client):
    texts = [SNIPPET, "def sub(a, b):\n    return a - b\n", SNIPPET]
    body = client.post("/embed", json={"texts": texts}).json()
    assert len(body["vectors"]) == 3
    assert body["vectors"][0] == body["vectors"][2]
    assert body["vectors"][0] != body["vectors"][1]
    dims = {len(v) for v in body["vectors"]}
    assert len(dims) == 1


def test_embed_batch_independence(client):
    solo = client.post("/embed", json={"texts": [SNIPPET]}).json()["vectors"][0]
    batched = client.post("/embed", json={"texts": ["other text here", SNIPPET]}).json()[
        "vectors"
    ][1]
    assert solo == batched


def test_embed_rejects_empty_and_oversized_batches(client):
    assert client.post("/embed", json={"texts": []}).status_code == 400
    too_many = ["text"] * 33
    assert client.post("/embed", json={"texts": too_many}).status_code == 400


def test_embed_accepts_exactly_max_batch(client):
    resp = client.post("/embed", json={"texts": ["text"] * 32})
    assert resp.status_code == 200
    assert len(resp.json()["vectors"]) == 32


# --- /classify ----------------------------------------------------------------


def test_classify_profiles_on_simplex(client):
    body = client.post("/classify", json={"texts": COMMENTS}).json()
    assert len(body["profiles"]) == len(COMMENTS)
    for profile in body["profiles"]:
        assert sorted(profile) == sorted(EMOTIONS)
        assert abs(sum(profile.values()) - 1.0) < 1e-4
        for value in profile.values():
            assert 0.0 <= value <= 1.0


def test_classify_empty_list_gives_empty_profiles(client):
    assert client.post("/classify", json={"texts": []}).json() == {"profiles": []}


def test_classify_order_preserved_and_deterministic(client):
    first = client.post("/classify", json={"texts": COMMENTS}).json()["profiles"]
    second = client.post("/classify", json={"texts": COMMENTS[::-1]}).json()["profiles"]
    assert first == second[::-1]


def test_classify_rejects_over_limit_text_with_indices(client):
    long_text = "word " * 600
    resp = client.post("/classify", json={"texts": [long_text]})
    assert resp.status_code == 422
    assert resp.json()["detail"]["indices"] == [0]


def test_classify_reports_every_over_limit_index(client):
    long_text = "word " * 600
    resp = client.post("/classify", json={"texts": ["short", long_text, "also short", long_text]})
    assert resp.status_code == 422
    assert resp.json()["detail"]["indices"] == [1, 3]


# --- /count_tokens ---------------------------------------------------------------


def test_count_tokens_empty_string_is_specials_only(client):
    counts = client.post("/count_tokens", json={"texts": [""]}).json()["counts"]
    assert counts == [2]  # recorded from the served tokenizer: <s> </s>


def test_count_tokens_single_word(client):
    counts = client.post("/count_tokens", json={"texts": ["word"]}).json()["counts"]
    assert counts == [3]  # recorded: <s> word </s>


def test_count_tokens_concatenation_monotone(client):
    a = "Please fix the loop"
    b = "bounds before merging"
    counts = client.post("/count_tokens", json={"texts": [a, b, a + " " + b]}).json()["counts"]
    assert counts[2] >= max(counts[0], counts[1])


def test_count_tokens_order_and_length(client):
    texts = ["one", "one two", "one two three"]
    counts = client.post("/count_tokens", json={"texts": texts}).json()["counts"]
    assert len(counts) == 3
    assert counts[0] < counts[1] < counts[2]
