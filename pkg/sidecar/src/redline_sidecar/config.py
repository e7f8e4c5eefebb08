"""Sidecar configuration; model identifiers are config, never code, so
smaller stand-in checkpoints can serve CI."""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_EMBED_MODEL = "codesage/codesage-large"
DEFAULT_EMOTION_MODEL = "j-hartmann/emotion-english-distilroberta-base"


@dataclass
class SidecarConfig:
    embed_model_id: str = DEFAULT_EMBED_MODEL
    emotion_model_id: str = DEFAULT_EMOTION_MODEL
    port: int = 8400
    max_batch: int = 32
    device: str = "auto"

    def __post_init__(self):
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")

    @classmethod
    def from_env(cls) -> "SidecarConfig":
        return cls(
            embed_model_id=os.environ.get("REDLINE_SIDECAR_EMBED_MODEL", DEFAULT_EMBED_MODEL),
            emotion_model_id=os.environ.get(
                "REDLINE_SIDECAR_EMOTION_MODEL", DEFAULT_EMOTION_MODEL
            ),
            port=int(os.environ.get("REDLINE_SIDECAR_PORT", "8400")),
            max_batch=int(os.environ.get("REDLINE_SIDECAR_MAX_BATCH", "32")),
            device=os.environ.get("REDLINE_SIDECAR_DEVICE", "auto"),
        )

    def resolved_device(self) -> str:
        if self.device != "auto":
            return self.device
        try:
            import torch

            return "cuda" if torch.cuda.is_available() else "cpu"
        except ImportError:  # pragma: no cover
            return "cpu"
