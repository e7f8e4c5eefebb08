"""redline-sidecar: model inference endpoints for embeddings and emotion scores."""

__version__ = "0.1.0"
