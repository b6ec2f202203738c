"""Shared fixtures: deterministic providers and the bundled function library."""

from __future__ import annotations

import numpy as np
import pytest

from divgen.fixtures import fixture_library
from divgen.providers.hash_embed import HashEmbedder


class PresetEmbedder:
    """Maps exact texts to preset vectors; anything else is an error."""

    def __init__(self, mapping: dict[str, list[float]], dimension: int | None = None):
        self.mapping = {k: np.asarray(v, dtype=np.float64) for k, v in mapping.items()}
        self.dimension = dimension or len(next(iter(self.mapping.values())))

    def embed(self, texts):
        if len(texts) == 0:
            raise ValueError("embed requires at least one text")
        return [self.mapping[t] for t in texts]


@pytest.fixture
def embedder():
    return HashEmbedder()


@pytest.fixture
def library():
    return fixture_library()
