"""Deterministic offline embedder with controllable cosine geometry.

Lowercase word tokens are hashed into one of ``dimension`` buckets; the bucket
count vector is L2-normalized. Shared tokens raise cosine similarity, disjoint
token sets give (hash collisions aside) orthogonal vectors, and every output is
unit-norm and nonnegative, so cosine similarity lands in [0, 1].
"""

from __future__ import annotations

import hashlib
import re
import threading
from typing import Sequence

import numpy as np

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _bucket(token: str, dimension: int) -> int:
    digest = hashlib.md5(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dimension


class HashEmbedder:
    """Pure, process-stable embedding provider for tests and offline runs."""

    def __init__(self, dimension: int = 384):
        if dimension <= 0:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    def _embed_one(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            vec[_bucket(token, self.dimension)] += 1.0
        norm = float(np.linalg.norm(vec))
        if norm > 0.0:
            vec /= norm
        return vec

    def embed(self, texts: Sequence[str]) -> list[np.ndarray]:
        if len(texts) == 0:
            raise ValueError("embed requires at least one text")
        out: list[np.ndarray] = []
        with self._lock:
            for text in texts:
                cached = self._cache.get(text)
                if cached is None:
                    cached = self._embed_one(text)
                    self._cache[text] = cached
                out.append(cached)
        return out
