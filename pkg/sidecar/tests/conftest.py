import pytest
from fastapi.testclient import TestClient

from redline_sidecar.app import create_app
from redline_sidecar.config import SidecarConfig
from redline_sidecar.standins import build_standin_models


@pytest.fixture(scope="session")
def standin_config(tmp_path_factory) -> SidecarConfig:
    root = tmp_path_factory.mktemp("standin-models")
    embed_dir, emotion_dir = build_standin_models(root)
    return SidecarConfig(
        embed_model_id=str(embed_dir),
        emotion_model_id=str(emotion_dir),
        device="cpu",
        max_batch=32,
    )


@pytest.fixture(scope="session")
def client(standin_config):
    app = create_app(standin_config)
    with TestClient(app) as test_client:
        yield test_client
