"""Embedding providers: a deterministic local baseline, a remote HTTP
provider, cosine similarity, and an on-disk vector cache.

The baseline provider hashes the token bag of a text into signed buckets
and L2-normalizes — deterministic and dependency-free, which lets the whole
pipeline run without a model server.  It makes no claim to neural-model
semantics.
"""

from __future__ import annotations

import hashlib
import os
import re
import struct
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
import requests
from filelock import FileLock

DEFAULT_DIM = 512
DEFAULT_BATCH_SIZE = 32
DEFAULT_MAX_RETRIES = 3

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


class ProviderUnavailable(Exception):
    """Remote provider failed after bounded retries (or returned garbage)."""


class DimensionMismatch(Exception):
    """Vectors of inconsistent dimension within one provider."""


class ProviderMismatch(Exception):
    """Vectors from different providers may not be compared."""


class ZeroVector(Exception):
    """Cosine of an all-zero vector is undefined."""


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """Fixed-length real vector tagged with the provider that produced it."""

    values: np.ndarray = field(repr=False)
    dim: int
    provider_id: str

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float32)
        if arr.ndim != 1 or arr.shape[0] != self.dim:
            raise ValueError(f"expected a 1-D vector of length {self.dim}")
        if not np.isfinite(arr).all():
            raise ValueError("vector contains non-finite entries")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Standard cosine similarity in [-1, 1], computed in float64.

    Symmetric bit-for-bit: both argument orders run the same multiply-add
    sequence.
    """
    if a.provider_id != b.provider_id:
        raise ProviderMismatch(f"{a.provider_id!r} vs {b.provider_id!r}")
    if a.dim != b.dim:
        raise DimensionMismatch(f"{a.dim} vs {b.dim}")
    va = a.values.astype(np.float64)
    vb = b.values.astype(np.float64)
    norm_a = float(np.sqrt(va @ va))
    norm_b = float(np.sqrt(vb @ vb))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVector("cosine of a zero vector is undefined")
    return float(va @ vb) / (norm_a * norm_b)


def _check_batch_input(bodies: list[str]) -> None:
    if not bodies:
        raise ValueError("embed_batch requires a non-empty list")
    for i, body in enumerate(bodies):
        if not body or not body.strip():
            raise ValueError(f"body at index {i} is empty after trimming")


@lru_cache(maxsize=1 << 16)
def _hash_bucket(token: str, dim: int) -> tuple[int, float]:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    h = int.from_bytes(digest, "little")
    sign = 1.0 if h & (1 << 63) == 0 else -1.0
    return h % dim, sign


class BaselineEmbedder:
    """Deterministic signed feature-hashing over the token bag of a text."""

    def __init__(self, dim: int = DEFAULT_DIM):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim
        self.provider_id = f"baseline-hash-{dim}"

    def embed_batch(self, bodies: list[str]) -> list[EmbeddingVector]:
        _check_batch_input(bodies)
        return [self._embed_one(body) for body in bodies]

    def _embed_one(self, body: str) -> EmbeddingVector:
        tokens = _TOKEN_RE.findall(body)
        if not tokens:
            raise ValueError("body has no tokens")
        acc = np.zeros(self.dim, dtype=np.float64)
        for token in tokens:
            idx, sign = _hash_bucket(token, self.dim)
            acc[idx] += sign
        norm = float(np.sqrt(acc @ acc))
        if norm == 0.0:
            # signed buckets can cancel exactly; nudge by token count so the
            # vector stays a pure function of the token bag
            acc[len(tokens) % self.dim] = 1.0
            norm = 1.0
        return EmbeddingVector(
            values=(acc / norm).astype(np.float32), dim=self.dim, provider_id=self.provider_id
        )


class RemoteEmbedder:
    """HTTP provider: POST {"texts": [...]} -> {"vectors": [...], "model": str}.

    Batches are capped, failures retried with exponential backoff, and the
    served model / vector dimension must stay consistent for the provider's
    lifetime.
    """

    def __init__(
        self,
        url: str,
        batch_size: int = DEFAULT_BATCH_SIZE,
        max_retries: int = DEFAULT_MAX_RETRIES,
        backoff_s: float = 0.5,
        timeout_s: float = 60.0,
        session: requests.Session | None = None,
    ):
        self.url = url
        self.batch_size = batch_size
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self.timeout_s = timeout_s
        self.provider_id = f"remote:{url}"
        self._session = session or requests.Session()
        self._dim: int | None = None
        self._model: str | None = None

    def embed_batch(self, bodies: list[str]) -> list[EmbeddingVector]:
        _check_batch_input(bodies)
        vectors: list[EmbeddingVector] = []
        for start in range(0, len(bodies), self.batch_size):
            vectors.extend(self._request(bodies[start : start + self.batch_size]))
        return vectors

    def _request(self, chunk: list[str]) -> list[EmbeddingVector]:
        payload = {"texts": chunk}
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._session.post(self.url, json=payload, timeout=self.timeout_s)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500:
                last_error = ProviderUnavailable(f"server returned {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise ProviderUnavailable(
                    f"provider rejected request: {resp.status_code} {resp.text[:200]}"
                )
            return self._parse(resp, len(chunk))
        raise ProviderUnavailable(f"giving up after {self.max_retries + 1} attempts: {last_error}")

    def _parse(self, resp, expected: int) -> list[EmbeddingVector]:
        try:
            data = resp.json()
            raw_vectors = data["vectors"]
            model = data["model"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProviderUnavailable(f"malformed provider response: {exc}") from exc
        if len(raw_vectors) != expected:
            raise ProviderUnavailable(
                f"provider returned {len(raw_vectors)} vectors for {expected} texts"
            )
        if self._model is None:
            self._model = model
        elif model != self._model:
            raise ProviderUnavailable(f"served model changed: {self._model!r} -> {model!r}")
        out = []
        for raw in raw_vectors:
            arr = np.asarray(raw, dtype=np.float32)
            if self._dim is None:
                self._dim = int(arr.shape[0]) if arr.ndim == 1 else -1
            if arr.ndim != 1 or arr.shape[0] != self._dim:
                raise DimensionMismatch(
                    f"inconsistent vector dimension from provider (expected {self._dim})"
                )
            if not np.isfinite(arr).all():
                raise ProviderUnavailable("provider returned non-finite values")
            out.append(EmbeddingVector(values=arr, dim=self._dim, provider_id=self.provider_id))
        return out


# Cache file format: repeated records of
#   u32le key length | key bytes (utf-8) | u32le dim | dim * f32le
# Bit-exact by construction, so cache files are portable.
_U32 = struct.Struct("<I")


def cache_key(provider_id: str, body: str) -> str:
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return f"{provider_id}\n{digest}"


class EmbeddingCache:
    """Append-only on-disk vector store keyed by (provider, content hash).

    Appends happen under a file lock; concurrent writers interleave whole
    records and the last write for a key wins, which is harmless because
    values are deterministic per key.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = FileLock(str(self.path) + ".lock")
        self._entries: dict[str, np.ndarray] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        blob = self.path.read_bytes()
        offset = 0
        end = len(blob)
        while offset + 4 <= end:
            (key_len,) = _U32.unpack_from(blob, offset)
            record_start = offset
            offset += 4
            if offset + key_len + 4 > end:
                offset = record_start
                break
            key = blob[offset : offset + key_len].decode("utf-8")
            offset += key_len
            (dim,) = _U32.unpack_from(blob, offset)
            offset += 4
            if offset + 4 * dim > end:
                offset = record_start
                break
            values = np.frombuffer(blob, dtype="<f4", count=dim, offset=offset).copy()
            offset += 4 * dim
            values.flags.writeable = False
            self._entries[key] = values
        # a truncated tail (e.g. interrupted writer) is ignored

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> np.ndarray | None:
        return self._entries.get(key)

    def put(self, key: str, values: np.ndarray) -> None:
        arr = np.ascontiguousarray(values, dtype="<f4")
        key_bytes = key.encode("utf-8")
        record = b"".join(
            [_U32.pack(len(key_bytes)), key_bytes, _U32.pack(arr.shape[0]), arr.tobytes()]
        )
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self._lock:
            with open(self.path, "ab") as fh:
                fh.write(record)
        stored = arr.copy()
        stored.flags.writeable = False
        self._entries[key] = stored


class CachingProvider:
    """Wraps a provider with an EmbeddingCache; order-preserving."""

    def __init__(self, provider, cache: EmbeddingCache):
        self.provider = provider
        self.cache = cache

    @property
    def provider_id(self) -> str:
        return self.provider.provider_id

    def embed_batch(self, bodies: list[str]) -> list[EmbeddingVector]:
        _check_batch_input(bodies)
        keys = [cache_key(self.provider_id, body) for body in bodies]
        out: list[EmbeddingVector | None] = []
        misses: list[int] = []
        for i, key in enumerate(keys):
            hit = self.cache.get(key)
            if hit is None:
                out.append(None)
                misses.append(i)
            else:
                out.append(
                    EmbeddingVector(values=hit, dim=hit.shape[0], provider_id=self.provider_id)
                )
        if misses:
            fresh = self.provider.embed_batch([bodies[i] for i in misses])
            for i, vec in zip(misses, fresh):
                self.cache.put(keys[i], vec.values)
                out[i] = vec
        return out  # type: ignore[return-value]


def default_cache_path() -> Path:
    root = os.environ.get("REDLINE_CACHE_DIR")
    if root:
        return Path(root) / "embeddings.cache"
    return Path.home() / ".cache" / "redline" / "embeddings.cache"
