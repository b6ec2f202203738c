"""Cluster entropy: the argument- and query-diversity objective.

Values are clustered with DBSCAN (euclidean eps=0.5 for numbers, cosine eps=0.1
over embeddings for strings, cosine eps=0.3 for query embeddings), every noise
point counts as its own singleton cluster, and the score is the base-2 entropy
of the cluster-size fractions. The attainable range is [0, log2 n]: 0 when all
values fall in one cluster, log2 n when every value stands alone.
"""

from __future__ import annotations

import math
from typing import Sequence

from divgen.metrics.dbscan import ClusterPartition, dbscan

NUMERIC_EPS = 0.5
STRING_EPS = 0.1
QUERY_EPS = 0.3
MIN_SAMPLES = 2


def cluster_entropy_bits(partition: ClusterPartition) -> float:
    """Base-2 entropy of cluster-size fractions, noise points as singletons."""
    sizes = sorted(list(partition.cluster_sizes) + [1] * partition.noise_count)
    total = sum(sizes)
    if total == 0:
        raise ValueError("entropy of an empty partition is undefined")
    return -math.fsum((s / total) * math.log2(s / total) for s in sizes) + 0.0


def _parse_numeric(values: Sequence) -> list[float]:
    out: list[float] = []
    bad: list[str] = []
    for v in values:
        try:
            out.append(float(v))
        except (TypeError, ValueError):
            bad.append(repr(v))
    if bad:
        raise ValueError(f"non-numeric value(s) for NUMERICAL entropy: {', '.join(bad)}")
    return out


def value_cluster_entropy(values: Sequence, category: str, embedder=None) -> float:
    """Diversity of one parameter group's committed values, in bits."""
    if len(values) == 0:
        raise ValueError("value_cluster_entropy requires at least one value")
    if category == "NUMERICAL":
        partition = dbscan(_parse_numeric(values), NUMERIC_EPS, MIN_SAMPLES, "euclidean")
    elif category == "STRING":
        if embedder is None:
            raise ValueError("STRING entropy requires an embedder")
        vectors = embedder.embed([str(v) for v in values])
        partition = dbscan(vectors, STRING_EPS, MIN_SAMPLES, "cosine")
    else:
        raise ValueError(f"cluster entropy is defined for NUMERICAL/STRING, not {category!r}")
    return cluster_entropy_bits(partition)


def query_cluster_entropy(embeddings: Sequence) -> float:
    """Diversity of a query corpus from its embeddings, in bits."""
    if len(embeddings) == 0:
        raise ValueError("query_cluster_entropy requires at least one embedding")
    return cluster_entropy_bits(dbscan(embeddings, QUERY_EPS, MIN_SAMPLES, "cosine"))
