"""Reciprocal rank fusion: merge incommensurable metric scales by rank."""

from __future__ import annotations

from typing import Hashable, Sequence, TypeVar

C = TypeVar("C", bound=Hashable)


def rrf_fuse(
    candidates: Sequence[C],
    rankings: Sequence[Sequence[C]],
    k: int = 60,
) -> tuple[dict[C, float], list[C]]:
    """Fuse per-metric orderings into one ranking.

    Each ranking lists the full candidate set best-first (ranks start at 1);
    score(c) = sum over rankings of 1/(k + rank(c)). The fused ordering is by
    descending score with ties broken by the candidates' insertion order, so the
    result depends only on ranks, never on raw metric scales.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    pool = list(candidates)
    pool_set = set(pool)
    if len(pool_set) != len(pool):
        raise ValueError("candidates must be distinct")
    scores: dict[C, float] = {c: 0.0 for c in pool}
    for ranking in rankings:
        if set(ranking) != pool_set or len(ranking) != len(pool):
            raise ValueError("every ranking must order exactly the candidate set")
        for rank, cand in enumerate(ranking, start=1):
            scores[cand] += 1.0 / (k + rank)
    order = sorted(range(len(pool)), key=lambda i: (-scores[pool[i]], i))
    return scores, [pool[i] for i in order]
