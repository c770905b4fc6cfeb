"""Text-to-vector providers and the cosine similarity metric.

Two providers share one contract: a remote embeddings HTTP API (the
de-facto ``POST {"model", "input"} -> {"data": [{"embedding"}]}`` shape)
and a deterministic local hash embedder that needs no network and is the
backbone of the offline fixtures and tests.

Every vector that leaves this module is L2-normalized.
"""

import math
import os
import re
import time
from dataclasses import dataclass
from typing import Protocol

import httpx
import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyTextError,
    ProviderRejectedError,
    ProviderUnreachableError,
    ZeroVectorError,
)

PROVIDER_LOCAL_HASH = "local_hash"
PROVIDER_REMOTE = "remote"

DEFAULT_DIM = 256
DEFAULT_API_KEY_ENV = "EMBEDDINGS_API_KEY"
MIN_HASH_DIM = 16

_BACKOFF_BASE_S = 0.2

# test seam: patched to avoid real waits in retry tests
_sleep = time.sleep

_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF

_TOKEN_RE = re.compile(r"[0-9a-z]+")


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-dimension real vector; the pipeline's common currency."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("embedding vector must not be empty")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding vector contains non-finite values")

    @classmethod
    def of(cls, values) -> "EmbeddingVector":
        return cls(tuple(float(v) for v in values))

    @property
    def dim(self) -> int:
        return len(self.values)

    def norm(self) -> float:
        return float(np.linalg.norm(np.asarray(self.values)))

    def unit(self) -> "EmbeddingVector":
        """L2-normalized copy; rejects the zero vector."""
        arr = np.asarray(self.values)
        n = float(np.linalg.norm(arr))
        if n == 0.0:
            raise ZeroVectorError("cannot normalize the zero vector")
        return EmbeddingVector(tuple(float(v) for v in arr / n))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class ProviderConfig:
    """Which embedding backend to use and how to reach it.

    ``local_hash`` requires an explicit ``dim``. For ``remote`` the
    dimension is taken from the provider's first response and, when
    ``dim`` is also configured, the two must agree.
    """

    kind: str = PROVIDER_LOCAL_HASH
    remote_base_url: str | None = None
    remote_model_name: str | None = None
    api_key_env_name: str = DEFAULT_API_KEY_ENV
    dim: int | None = DEFAULT_DIM
    timeout_ms: int = 10_000
    max_retries: int = 3

    def __post_init__(self):
        if self.kind not in (PROVIDER_LOCAL_HASH, PROVIDER_REMOTE):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.kind == PROVIDER_LOCAL_HASH and not self.dim:
            raise ValueError("local_hash provider requires an explicit dim")
        if self.kind == PROVIDER_REMOTE and not self.remote_base_url:
            raise ValueError("remote provider requires remote_base_url")
        if self.dim is not None and self.dim < 1:
            raise ValueError("dim must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


def fnv1a_64(data: bytes) -> int:
    """FNV-1a 64-bit hash of raw bytes."""
    h = _FNV64_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV64_PRIME) & _MASK64
    return h


def _tokenize(text: str) -> list[str]:
    # maximal ascii-alphanumeric runs of the lowercased text
    return _TOKEN_RE.findall(text.lower())


def local_hash_embed(text: str, dim: int = DEFAULT_DIM) -> EmbeddingVector:
    """Deterministic bag-of-hashed-tokens embedding.

    Lowercase, split on non-alphanumeric runs; each token adds weight 1.0
    at ``fnv1a_64(token) % dim`` and each 3-char token window adds weight
    0.5 at its own hashed slot; the accumulator is then L2-normalized.
    A pure function of (text, dim): repeat calls are bitwise identical.
    """
    if dim < MIN_HASH_DIM:
        raise ValueError(f"dim must be >= {MIN_HASH_DIM}, got {dim}")
    if not text.strip():
        raise EmptyTextError()
    acc = np.zeros(dim, dtype=np.float64)
    for token in _tokenize(text):
        data = token.encode("utf-8")
        acc[fnv1a_64(data) % dim] += 1.0
        for i in range(len(token) - 2):
            acc[fnv1a_64(token[i : i + 3].encode("utf-8")) % dim] += 0.5
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        # non-empty text with no alphanumeric content, e.g. "!!!"
        raise ZeroVectorError(f"text {text!r} produced no tokens")
    return EmbeddingVector(tuple(float(v) for v in acc / norm))


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine of the angle between two vectors, clamped to [-1, 1].

    Bitwise-identical inputs score exactly 1.0 (the mathematically exact
    answer, bypassing roundoff); other results are clamped after division.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dim {a.dim} vs {b.dim}")
    if a.values == b.values:
        return 1.0
    va, vb = a.as_array(), b.as_array()
    na, nb = float(np.linalg.norm(va)), float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine undefined for the zero vector")
    return float(min(1.0, max(-1.0, float(np.dot(va, vb)) / (na * nb))))


class EmbeddingProvider(Protocol):
    """What the pipeline needs from any embedding backend."""

    kind: str

    def embed_text(self, text: str) -> EmbeddingVector: ...

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]: ...

    def close(self) -> None: ...


class LocalHashProvider:
    """Offline deterministic provider; see :func:`local_hash_embed`."""

    kind = PROVIDER_LOCAL_HASH

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim

    def embed_text(self, text: str) -> EmbeddingVector:
        return local_hash_embed(text, self.dim)

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        _check_batch(texts)
        return [self.embed_text(t) for t in texts]

    def close(self):
        pass


class RemoteProvider:
    """Client for a hosted embeddings HTTP API.

    Speaks ``POST base_url {"model": ..., "input": [texts]}`` and expects
    ``{"data": [{"embedding": [...]}, ...]}`` back. Retries with
    exponential backoff on timeouts and 5xx only; 4xx surfaces at once.
    The API key is read from the configured environment variable and is
    never logged.
    """

    kind = PROVIDER_REMOTE

    def __init__(self, config: ProviderConfig, client: httpx.Client | None = None):
        if config.kind != PROVIDER_REMOTE:
            raise ValueError("RemoteProvider requires a remote ProviderConfig")
        self._config = config
        self._owns_client = client is None
        self._client = client or httpx.Client(
            timeout=config.timeout_ms / 1000.0, trust_env=False
        )
        self.dim = config.dim  # None until the first response pins it

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self._config.api_key_env_name, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, payload: dict) -> httpx.Response:
        cfg = self._config
        last_exc: Exception | None = None
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                _sleep(_BACKOFF_BASE_S * 2 ** (attempt - 1))
            try:
                resp = self._client.post(
                    cfg.remote_base_url, json=payload, headers=self._headers()
                )
            except httpx.HTTPError as exc:
                last_exc = exc
                continue
            if 500 <= resp.status_code < 600:
                last_exc = ProviderRejectedError(
                    f"HTTP {resp.status_code}: {resp.text[:500]}"
                )
                continue
            if resp.status_code < 200 or resp.status_code >= 300:
                raise ProviderRejectedError(
                    f"HTTP {resp.status_code}: {resp.text[:500]}"
                )
            return resp
        if isinstance(last_exc, ProviderRejectedError):
            raise last_exc
        raise ProviderUnreachableError(
            f"provider unreachable after {cfg.max_retries + 1} attempts: {last_exc}"
        )

    def embed_batch(self, texts: list[str]) -> list[EmbeddingVector]:
        _check_batch(texts)
        if not texts:
            return []
        resp = self._post(
            {"model": self._config.remote_model_name, "input": list(texts)}
        )
        try:
            data = resp.json()["data"]
        except (KeyError, ValueError) as exc:
            raise ProviderRejectedError(f"malformed provider response: {exc}")
        if not isinstance(data, list) or len(data) != len(texts):
            raise ProviderRejectedError(
                f"provider returned {len(data)} embeddings for {len(texts)} inputs"
            )
        if all(isinstance(item, dict) and "index" in item for item in data):
            data = sorted(data, key=lambda item: item["index"])
        out = []
        for item in data:
            try:
                vec = EmbeddingVector.of(item["embedding"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ProviderRejectedError(f"bad embedding in response: {exc}")
            if self.dim is None:
                self.dim = vec.dim
            if vec.dim != self.dim:
                raise DimensionMismatchError(
                    f"provider returned dim {vec.dim}, expected {self.dim}"
                )
            out.append(vec.unit())
        return out

    def embed_text(self, text: str) -> EmbeddingVector:
        return self.embed_batch([text])[0]

    def close(self):
        if self._owns_client:
            self._client.close()


def make_provider(config: ProviderConfig, client: httpx.Client | None = None):
    if config.kind == PROVIDER_LOCAL_HASH:
        return LocalHashProvider(config.dim)
    return RemoteProvider(config, client=client)


def _check_batch(texts) -> None:
    for i, text in enumerate(texts):
        if not text or not text.strip():
            raise EmptyTextError(f"texts[{i}] is empty")


def embed_text(text: str, config: ProviderConfig) -> EmbeddingVector:
    """One-shot embed; builds and discards a provider for ``config``."""
    if not text or not text.strip():
        raise EmptyTextError()
    provider = make_provider(config)
    try:
        return provider.embed_text(text)
    finally:
        provider.close()


def embed_batch(texts: list[str], config: ProviderConfig) -> list[EmbeddingVector]:
    """One-shot batch embed; element i equals ``embed_text(texts[i])``."""
    provider = make_provider(config)
    try:
        return provider.embed_batch(list(texts))
    finally:
        provider.close()
