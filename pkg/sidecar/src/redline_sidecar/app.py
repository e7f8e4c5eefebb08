"""FastAPI app exposing /embed, /classify, /count_tokens, and /health."""

from __future__ import annotations

import logging
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .config import SidecarConfig
from .models import ModelBundle

log = logging.getLogger(__name__)


class TextsRequest(BaseModel):
    texts: list[str]


def create_app(config: SidecarConfig | None = None) -> FastAPI:
    config = config or SidecarConfig.from_env()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.bundle = ModelBundle(config)
        log.info("models loaded")
        yield

    app = FastAPI(title="redline-sidecar", lifespan=lifespan)
    app.state.bundle = None
    app.state.config = config
    # model access is serialized; callers may not assume cross-request ordering
    inference_lock = threading.Lock()

    def _bundle() -> ModelBundle:
        bundle = app.state.bundle
        if bundle is None:
            raise HTTPException(status_code=503, detail="models are still loading")
        return bundle

    @app.get("/health")
    def health():
        return {"status": "ok", "models_loaded": app.state.bundle is not None}

    @app.post("/embed")
    def embed(request: TextsRequest):
        bundle = _bundle()
        if not 1 <= len(request.texts) <= config.max_batch:
            raise HTTPException(
                status_code=400,
                detail=f"batch size must be in [1, {config.max_batch}]",
            )
        with inference_lock:
            vectors = bundle.embedder.embed(request.texts)
        return {"vectors": vectors, "model": bundle.embedder.served_name}

    @app.post("/classify")
    def classify(request: TextsRequest):
        bundle = _bundle()
        if not request.texts:
            return {"profiles": []}
        over_limit = bundle.emotion.over_limit_indices(request.texts)
        if over_limit:
            raise HTTPException(
                status_code=422,
                detail={"error": "texts exceed the 512-token limit", "indices": over_limit},
            )
        with inference_lock:
            profiles = bundle.emotion.classify(request.texts)
        return {"profiles": profiles}

    @app.post("/count_tokens")
    def count_tokens(request: TextsRequest):
        bundle = _bundle()
        return {"counts": bundle.emotion.count_tokens(request.texts)}

    return app
