"""Bootstrap standard deviations and paired significance tests."""

from __future__ import annotations

import math
import random
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def bootstrap_std(
    items: Sequence[T],
    metric_fn: Callable[[list[T]], float],
    n_resamples: int = 100,
    fraction: float = 0.8,
    seed: int = 0,
) -> float:
    """Population std of the metric over seeded subsamples.

    Each resample draws floor(fraction * n) items without replacement from a
    ``random.Random(seed)`` stream (one ``sample`` call per resample, in order),
    so the result is fully determined by the seed.
    """
    if not items:
        raise ValueError("bootstrap_std requires at least one item")
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    rng = random.Random(seed)
    size = max(1, int(math.floor(fraction * len(items))))
    values = []
    for _ in range(n_resamples):
        subsample = rng.sample(list(items), size)
        values.append(float(metric_fn(subsample)))
    if min(values) == max(values):
        return 0.0
    mean = math.fsum(values) / len(values)
    return math.sqrt(math.fsum((v - mean) ** 2 for v in values) / len(values))


def significance(mu1: float, sigma1: float, mu2: float, sigma2: float) -> tuple[bool, int]:
    """(significant, direction): |mu1-mu2| strictly above 1.96*sqrt(s1^2+s2^2).

    direction is +1 when the first mean is higher, -1 when lower, 0 when equal.
    """
    gap = abs(mu1 - mu2)
    threshold = 1.96 * math.sqrt(sigma1 * sigma1 + sigma2 * sigma2)
    if mu1 > mu2:
        direction = 1
    elif mu1 < mu2:
        direction = -1
    else:
        direction = 0
    return gap > threshold, direction


def mcnemar(b: int, c: int, exact_threshold: int = 25) -> float:
    """Two-sided p-value from the discordant-pair counts.

    Below ``exact_threshold`` total discordant pairs, the exact binomial(n, 1/2)
    two-sided tail is used (capped at 1); otherwise the continuity-corrected
    chi-square (|b-c|-1)^2/(b+c) with one degree of freedom. b = c = 0 gives 1.
    Symmetric in (b, c).
    """
    if b < 0 or c < 0:
        raise ValueError("discordant counts must be nonnegative")
    n = b + c
    if n == 0:
        return 1.0
    if n < exact_threshold:
        lo, hi = min(b, c), max(b, c)
        tail = sum(math.comb(n, i) for i in range(lo + 1))
        upper = sum(math.comb(n, i) for i in range(hi, n + 1))
        return min(1.0, (tail + upper) / 2.0 ** n)
    chi2 = (abs(b - c) - 1) ** 2 / n
    # survival function of chi-square with 1 df
    return math.erfc(math.sqrt(chi2 / 2.0))


def holm_bonferroni(pvalues: Sequence[float], alpha: float = 0.05) -> list[bool]:
    """Step-down multiple-comparison correction.

    Sort ascending and reject the i-th smallest (1-based) while
    p_(i) <= alpha/(m-i+1); the first failure stops the procedure. Decisions are
    returned in the input order.
    """
    if any(not 0.0 <= p <= 1.0 for p in pvalues):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(pvalues)
    order = sorted(range(m), key=lambda i: pvalues[i])
    decisions = [False] * m
    for step, idx in enumerate(order, start=1):
        if pvalues[idx] <= alpha / (m - step + 1):
            decisions[idx] = True
        else:
            break
    return decisions
