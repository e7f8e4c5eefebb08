"""Model bundles behind the endpoints.

Both models load once at startup and run in deterministic evaluation mode.
Texts inside a batch are processed one at a time so a vector or profile
depends only on (model, text), never on batch composition — the primary's
cache assumes exactly that.
"""

from __future__ import annotations

import logging

import torch
from transformers import AutoModel, AutoModelForSequenceClassification, AutoTokenizer

log = logging.getLogger(__name__)

EMOTIONS = ("anger", "disgust", "fear", "joy", "sadness", "surprise", "neutral")
TOKEN_LIMIT = 512


class EmbeddingModel:
    """Mean-pooled encoder states, one vector per text."""

    def __init__(self, model_id: str, device: str):
        self.model_id = model_id
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(model_id, trust_remote_code=False)
        self.model = AutoModel.from_pretrained(model_id, trust_remote_code=False)
        self.model.to(device)
        self.model.eval()

    @property
    def served_name(self) -> str:
        return f"{self.model_id}#mean-pool"

    def embed(self, texts: list[str]) -> list[list[float]]:
        vectors = []
        with torch.no_grad():
            for text in texts:
                encoded = self.tokenizer(
                    text,
                    return_tensors="pt",
                    truncation=True,
                    max_length=min(TOKEN_LIMIT, self.tokenizer.model_max_length),
                ).to(self.device)
                states = self.model(**encoded).last_hidden_state[0]
                mask = encoded["attention_mask"][0].unsqueeze(-1).to(states.dtype)
                pooled = (states * mask).sum(dim=0) / mask.sum()
                vectors.append([float(x) for x in pooled.cpu()])
        return vectors


class EmotionModel:
    """Softmax over the seven emotion classes."""

    def __init__(self, model_id: str, device: str):
        self.model_id = model_id
        self.device = device
        self.tokenizer = AutoTokenizer.from_pretrained(model_id, trust_remote_code=False)
        self.model = AutoModelForSequenceClassification.from_pretrained(
            model_id, trust_remote_code=False
        )
        self.model.to(device)
        self.model.eval()
        id2label = self.model.config.id2label
        self.labels = [str(id2label[i]).lower() for i in range(len(id2label))]
        if sorted(self.labels) != sorted(EMOTIONS):
            raise ValueError(
                f"emotion model labels {self.labels} do not match the expected classes"
            )

    def count_tokens(self, texts: list[str]) -> list[int]:
        return [len(self.tokenizer.encode(text)) for text in texts]

    def over_limit_indices(self, texts: list[str]) -> list[int]:
        return [i for i, count in enumerate(self.count_tokens(texts)) if count > TOKEN_LIMIT]

    def classify(self, texts: list[str]) -> list[dict[str, float]]:
        profiles = []
        with torch.no_grad():
            for text in texts:
                encoded = self.tokenizer(text, return_tensors="pt").to(self.device)
                logits = self.model(**encoded).logits[0]
                scores = torch.softmax(logits, dim=-1).cpu()
                profiles.append(
                    {label: float(scores[i]) for i, label in enumerate(self.labels)}
                )
        return profiles


class ModelBundle:
    def __init__(self, config):
        device = config.resolved_device()
        log.info("loading embedding model %s on %s", config.embed_model_id, device)
        self.embedder = EmbeddingModel(config.embed_model_id, device)
        log.info("loading emotion model %s on %s", config.emotion_model_id, device)
        self.emotion = EmotionModel(config.emotion_model_id, device)
