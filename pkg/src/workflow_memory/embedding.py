"""Text embeddings for instruction-step similarity.

The built-in embedder is a hashed bag of words: tokens are lowercased,
split on non-alphanumeric runs, hashed with 64-bit FNV-1a into a fixed
number of buckets, counted, and L2-normalized. It is fully
deterministic, which keeps retrieval reproducible in tests; real models
can be plugged in through the same interface.
"""

from __future__ import annotations

import re
from typing import Protocol

import httpx
import numpy as np

DEFAULT_DIMENSION = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_TOKEN_RE = re.compile(r"[0-9a-z]+")


class EmbeddingProvider(Protocol):
    """Anything that turns text into a fixed-dimension vector."""

    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class HashingEmbedder:
    """Deterministic hashed bag-of-words embedder.

    Token order does not matter: embed("a b") == embed("b a"). Empty
    text maps to the zero vector; everything else is unit-norm.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        values = np.zeros(self.dimension, dtype=np.float64)
        for token in tokenize(text):
            values[fnv1a_64(token.encode("utf-8")) % self.dimension] += 1.0
        norm = float(np.linalg.norm(values))
        if norm > 0.0:
            values /= norm
        return values


class HttpEmbedder:
    """Client for an external embedding service.

    Speaks a one-request JSON contract: POST {"text": str} and receive
    {"values": [number, ...]}.
    """

    def __init__(
        self,
        endpoint: str,
        dimension: int = DEFAULT_DIMENSION,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.endpoint = endpoint
        self.dimension = dimension
        self._client = httpx.Client(timeout=timeout, transport=transport)

    def embed(self, text: str) -> np.ndarray:
        response = self._client.post(self.endpoint, json={"text": text})
        response.raise_for_status()
        values = np.asarray(response.json()["values"], dtype=np.float64)
        if values.shape != (self.dimension,):
            raise ValueError(
                f"embedding service returned dimension {values.shape}, expected ({self.dimension},)"
            )
        return values


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    if np.array_equal(a, b):
        # exact by definition; avoids last-bit rounding on self-similarity
        return 1.0
    return float(np.dot(a, b) / (norm_a * norm_b))


def make_embedder(
    kind: str = "builtin",
    endpoint: str = "",
    dimension: int = DEFAULT_DIMENSION,
) -> EmbeddingProvider:
    """Build a provider for the `embedder = builtin|external` config key."""
    if kind == "builtin":
        return HashingEmbedder(dimension=dimension)
    if kind == "external":
        if not endpoint:
            raise ValueError("external embedder needs an endpoint")
        return HttpEmbedder(endpoint, dimension=dimension)
    raise ValueError(f"unknown embedder kind {kind!r}")
