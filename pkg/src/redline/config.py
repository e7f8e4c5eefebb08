"""Run configuration shared by the CLI commands."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .embedding import (
    BaselineEmbedder,
    CachingProvider,
    EmbeddingCache,
    RemoteEmbedder,
    default_cache_path,
)

PROVIDERS = ("baseline", "remote")


@dataclass
class RunConfig:
    manifest_path: Path
    output_dir: Path
    provider: str = "baseline"
    provider_url: str | None = None
    classifier_url: str | None = None
    extensions: tuple[str, ...] = (".py",)
    refactor_similarity: float = 0.95
    min_fn_lines: int = 3
    parallelism: int = 1
    include_tests: bool = True
    include_nested: bool = True
    strip_docstrings: bool = False
    cache_path: Path | None = None

    def __post_init__(self):
        self.manifest_path = Path(self.manifest_path)
        self.output_dir = Path(self.output_dir)
        if self.provider not in PROVIDERS:
            raise ValueError(f"provider must be one of {PROVIDERS}")
        if self.provider == "remote" and not self.provider_url:
            raise ValueError("remote provider requires a provider url")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")


def build_provider(config: RunConfig):
    """Embedding provider per config; remote providers get the on-disk cache."""
    if config.provider == "baseline":
        return BaselineEmbedder()
    remote = RemoteEmbedder(config.provider_url)
    cache = EmbeddingCache(config.cache_path or default_cache_path())
    return CachingProvider(remote, cache)
