"""Metric batteries over query corpora.

The optimized battery holds the eight scores driving candidate ranking; the
full battery adds the four held-out scores used only in reports. Every metric
is oriented so that higher means more diverse.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from divgen.metrics.cluster_entropy import query_cluster_entropy
from divgen.metrics.semantic import (
    chamfer_distance_score,
    paraphrase_variety,
    semantic_spread,
    vendi_score,
)
from divgen.metrics.text import (
    compression_ratio_diversity,
    fkgl_grade,
    simpson_index,
    tokenize,
    type_token_ratio,
    variance,
)
from divgen.metrics.trees import avg_tree_edit_distance, parse_tree_entropy

#: Metrics optimized during generation, in ranking order.
OPTIMIZED_METRICS: tuple[str, ...] = (
    "ttr",
    "compression_ratio",
    "paraphrase_variety",
    "parse_tree_entropy",
    "chamfer",
    "var_fkgl",
    "var_length",
    "vendi",
)

#: Full report battery: the optimized eight plus the held-out four.
REPORT_METRICS: tuple[str, ...] = OPTIMIZED_METRICS + (
    "simpson",
    "tree_edit_distance",
    "cluster_entropy",
    "semantic_spread",
)


class EmbeddingCache:
    """Per-text embedding memo shared across repeated battery evaluations."""

    def __init__(self, embedder):
        self.embedder = embedder
        self._memo: dict[str, np.ndarray] = {}

    def matrix(self, texts: Sequence[str]) -> np.ndarray:
        missing = [t for t in texts if t not in self._memo]
        if missing:
            for text, vec in zip(missing, self.embedder.embed(missing)):
                self._memo[text] = np.asarray(vec, dtype=np.float64)
        return np.stack([self._memo[t] for t in texts])


def evaluate_battery(texts: Sequence[str], embeddings: np.ndarray) -> dict[str, float]:
    """The eight optimized metrics for one corpus snapshot."""
    if len(texts) == 0:
        raise ValueError("battery requires a non-empty corpus")
    fkgls = [fkgl_grade(t) for t in texts]
    lengths = [float(len(tokenize(t))) for t in texts]
    return {
        "ttr": type_token_ratio(texts),
        "compression_ratio": compression_ratio_diversity(texts),
        "paraphrase_variety": paraphrase_variety(embeddings),
        "parse_tree_entropy": parse_tree_entropy(texts),
        "chamfer": chamfer_distance_score(embeddings),
        "var_fkgl": variance(fkgls),
        "var_length": variance(lengths),
        "vendi": vendi_score(embeddings),
    }


def evaluate_full_battery(texts: Sequence[str], embeddings: np.ndarray) -> dict[str, float]:
    """All twelve report metrics for one corpus snapshot."""
    out = evaluate_battery(texts, embeddings)
    out["simpson"] = simpson_index(texts)
    out["tree_edit_distance"] = avg_tree_edit_distance(texts)
    out["cluster_entropy"] = query_cluster_entropy(embeddings)
    out["semantic_spread"] = semantic_spread(embeddings)
    return out


def metric_fn_over_indices(
    name: str, texts: Sequence[str], embeddings: np.ndarray
) -> Callable[[list[int]], float]:
    """A single named metric as a function of corpus index subsets.

    Used by bootstrap resampling: texts and embeddings are fixed once, each call
    evaluates the metric on the selected rows only.
    """
    texts = list(texts)

    def fn(indices: list[int]) -> float:
        subset = [texts[i] for i in indices]
        sub_emb = embeddings[indices]
        if name == "ttr":
            return type_token_ratio(subset)
        if name == "compression_ratio":
            return compression_ratio_diversity(subset)
        if name == "paraphrase_variety":
            return paraphrase_variety(sub_emb)
        if name == "parse_tree_entropy":
            return parse_tree_entropy(subset)
        if name == "chamfer":
            return chamfer_distance_score(sub_emb)
        if name == "var_fkgl":
            return variance([fkgl_grade(t) for t in subset])
        if name == "var_length":
            return variance([float(len(tokenize(t))) for t in subset])
        if name == "vendi":
            return vendi_score(sub_emb)
        if name == "simpson":
            return simpson_index(subset)
        if name == "tree_edit_distance":
            return avg_tree_edit_distance(subset)
        if name == "cluster_entropy":
            return query_cluster_entropy(sub_emb)
        if name == "semantic_spread":
            return semantic_spread(sub_emb)
        raise KeyError(f"unknown metric {name!r}")

    return fn
