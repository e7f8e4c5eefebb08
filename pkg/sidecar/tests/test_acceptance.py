"""Sidecar acceptance: the serving contracts the primary toolchain relies on."""

import math

from redline_sidecar.models import EMOTIONS
from redline_sidecar.standins import (
    EMBED_FIXTURE_BASE,
    EMBED_FIXTURE_TWIN,
    EMBED_FIXTURE_UNRELATED,
)


def _criterion(name: str):
    class _Reporter:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            verdict = "PASS" if exc_type is None else "FAIL"
            print(f"ACCEPTANCE {verdict} — {name}")
            return False

    return _Reporter()


def _cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    return dot / (math.sqrt(sum(x * x for x in a)) * math.sqrt(sum(y * y for y in b)))


def test_sidecar_contract_criteria(client):
    with _criterion("sidecar: order/length preservation, simplex, 422, cosine ordering"):
        # length/order preservation on fixture batches
        texts = [EMBED_FIXTURE_BASE, EMBED_FIXTURE_UNRELATED, EMBED_FIXTURE_BASE]
        embed = client.post("/embed", json={"texts": texts}).json()
        assert len(embed["vectors"]) == 3
        assert embed["vectors"][0] == embed["vectors"][2]

        comments = ["Thanks , this looks great !", "why was the old parser removed ?"]
        classify = client.post("/classify", json={"texts": comments}).json()
        assert len(classify["profiles"]) == 2
        counts = client.post("/count_tokens", json={"texts": comments}).json()["counts"]
        assert len(counts) == 2

        # profiles lie on the 7-simplex within 1e-4
        for profile in classify["profiles"]:
            assert sorted(profile) == sorted(EMOTIONS)
            assert abs(sum(profile.values()) - 1.0) <= 1e-4

        # a 600-token text is refused with its index
        resp = client.post("/classify", json={"texts": ["tok " * 600]})
        assert resp.status_code == 422
        assert resp.json()["detail"]["indices"] == [0]

        # renamed-variable twin ranks above an unrelated function
        trio = client.post(
            "/embed",
            json={"texts": [EMBED_FIXTURE_BASE, EMBED_FIXTURE_TWIN, EMBED_FIXTURE_UNRELATED]},
        ).json()["vectors"]
        base, twin, unrelated = trio
        assert _cosine(base, twin) > _cosine(base, unrelated)
