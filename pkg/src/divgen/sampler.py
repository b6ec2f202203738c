"""Choosing the execution type and target function(s) for each example.

Single-function examples draw uniformly from one of the three API pools;
multi-function examples ride a biased random walk on the similarity graph whose
length is 2 plus a Poisson draw. All draws come from one caller-supplied RNG
stream in documented order, so runs replay exactly under a fixed seed.
"""

from __future__ import annotations

import json
import math
import random
from typing import Sequence

import numpy as np

from divgen.model import ExecutionType, FunctionSchema, RunConfig
from divgen.preprocess import ApiGraph, ApiPools
from divgen.providers import catalog
from divgen.providers.base import SignatureClient
from divgen.providers.signature import SignatureParseError


class SamplingFailure(RuntimeError):
    """The caller should re-draw: the current attempt cannot be completed."""


def sample_execution_type(config: RunConfig, rng: random.Random) -> ExecutionType:
    """Categorical draw from the configured mixture weights (one rng.random())."""
    weights = [(ExecutionType(name), w) for name, w in config.type_weights.items() if w > 0]
    total = sum(w for _, w in weights)
    if total <= 0:
        raise ValueError("execution-type weights sum to zero")
    roll = rng.random() * total
    acc = 0.0
    for etype, w in weights:
        acc += w
        if roll < acc:
            return etype
    return weights[-1][0]


def sample_single_api(
    pools: ApiPools, library: Sequence[FunctionSchema], rng: random.Random
) -> FunctionSchema:
    """Uniformly pick one of the non-empty pools, then uniformly pick a function."""
    by_name = {fn.name: fn for fn in library}
    candidates = [p for p in (pools.general, pools.focused, pools.other) if p]
    if not candidates:
        raise SamplingFailure("all API pools are empty")
    pool = candidates[rng.randrange(len(candidates))]
    return by_name[pool[rng.randrange(len(pool))]]


def poisson_draw(lam: float, rng: random.Random) -> int:
    """Knuth inversion; consumes one rng.random() per increment."""
    limit = math.exp(-lam)
    k = 0
    p = 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def sample_walk(
    graph: ApiGraph,
    exec_type: ExecutionType,
    rng: random.Random,
    lam: float = 0.75,
    edge_bias: float = 3.0,
    retries: int = 16,
) -> list[str]:
    """Simple (no-repeat) biased walk; length = Poisson(lam) + 2.

    PARALLEL favors P-P edges, SEQUENTIAL favors P-R edges (multiplier
    ``edge_bias``); SEQUENTIAL walks respect P-R direction and must traverse at
    least one P-R edge. Raises SamplingFailure when the retry budget runs out.
    """
    if exec_type not in (ExecutionType.PARALLEL, ExecutionType.SEQUENTIAL):
        raise ValueError("sample_walk serves PARALLEL and SEQUENTIAL only")
    favored = "P-P" if exec_type is ExecutionType.PARALLEL else "P-R"
    if not graph.has_kind(favored) and not graph.edges:
        raise SamplingFailure("similarity graph has no usable edges")

    length = poisson_draw(lam, rng) + 2

    def neighbors(node: str, visited: set[str]) -> list[tuple[str, str, float]]:
        out: list[tuple[str, str, float]] = []
        for target, w in graph.pp_neighbors(node):
            if target not in visited:
                out.append((target, "P-P", w))
        for target, w in graph.pr_successors(node):
            if target not in visited:
                out.append((target, "P-R", w))
        return out

    starts = [v for v in graph.vertices if neighbors(v, set())]
    if not starts:
        raise SamplingFailure("no vertex has outgoing edges")

    for _ in range(retries):
        walk = [starts[rng.randrange(len(starts))]]
        kinds: list[str] = []
        while len(walk) < length:
            options = neighbors(walk[-1], set(walk))
            if not options:
                break
            weights = [edge_bias if kind == favored else 1.0 for _, kind, _ in options]
            total = sum(weights)
            roll = rng.random() * total
            acc = 0.0
            picked = options[-1]
            for opt, w in zip(options, weights):
                acc += w
                if roll < acc:
                    picked = opt
                    break
            walk.append(picked[0])
            kinds.append(picked[1])
        if len(walk) != length:
            continue
        if exec_type is ExecutionType.SEQUENTIAL and "P-R" not in kinds:
            continue
        return walk
    raise SamplingFailure(f"could not extend a {exec_type.value} walk to length {length}")


def check_pairwise_similarity(
    functions: Sequence[FunctionSchema], embedder, threshold: float = 0.3
) -> bool:
    """Accept when the mean pairwise cosine of 'name: description' texts clears
    the threshold. A single function is accepted vacuously."""
    if len(functions) < 2:
        return True
    texts = [f"{fn.name}: {fn.description}" for fn in functions]
    vectors = [np.asarray(v, dtype=np.float64) for v in embedder.embed(texts)]
    total = 0.0
    pairs = 0
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            na = float(np.linalg.norm(vectors[i]))
            nb = float(np.linalg.norm(vectors[j]))
            cos = 0.0 if na == 0.0 or nb == 0.0 else float(vectors[i] @ vectors[j]) / (na * nb)
            total += cos
            pairs += 1
    return total / pairs >= threshold


def validate_sequential_schema_compatibility(
    schemas: Sequence[FunctionSchema], client: SignatureClient
) -> tuple[bool, str]:
    """Ask the compatibility judge whether the chain is feasible at schema level."""
    if len(schemas) < 2:
        raise ValueError("a sequential chain needs at least two schemas")
    sig = catalog.get("ValidateSequentialSchemaCompatibility")
    inputs = {"api_schemas": json.dumps([s.to_dict() for s in schemas], ensure_ascii=False)}
    try:
        out = client.call(sig, inputs)
    except SignatureParseError as exc:
        raise SamplingFailure(f"compatibility judge unparseable: {exc}") from exc
    verdict = out.get("is_compatible", "").strip().upper()
    return verdict == "YES", out.get("reasoning", "")
