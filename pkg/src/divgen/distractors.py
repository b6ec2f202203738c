"""Hard-negative candidate selection: retrieve, rate, filter, cut at the elbow.

Distractors come from embedding retrieval over function descriptions, survive
only when an LLM rates them implausible as answers (<=2 generally, <=1 for
MISSING_PARAMS), and are then cut at the point where retrieval scores drop
fastest. Targets are exempt from every filter; they can shrink only when a
validated alternative invocation shows some of them to be redundant.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from divgen.model import ExecutionType, FunctionSchema
from divgen.providers import catalog
from divgen.providers.base import SignatureClient
from divgen.providers.signature import SignatureParseError


class DistractorFailure(RuntimeError):
    """The example cannot get a valid candidate set; caller regenerates."""


PLAUSIBILITY_THRESHOLDS = {
    ExecutionType.SINGLE: 2,
    ExecutionType.NONE: 2,
    ExecutionType.PARALLEL: 2,
    ExecutionType.SEQUENTIAL: 2,
    ExecutionType.MISSING_PARAMS: 1,
}


@dataclass(frozen=True)
class ScoredCandidate:
    name: str
    retrieval_score: float
    plausibility: int | None = None
    is_target: bool = False


def retrieve_candidates(
    query: str,
    library: Sequence[FunctionSchema],
    embedder,
    k: int = 20,
    targets: Sequence[str] = (),
    force_targets: bool = True,
) -> list[ScoredCandidate]:
    """Top-k functions by cosine similarity of the query to their descriptions.

    Target functions are appended with their true scores when they miss the
    top-k (not for NONE examples, which pass force_targets=False). Ties break
    by library order.
    """
    texts = [fn.description or fn.name for fn in library]
    vectors = [np.asarray(v, dtype=np.float64) for v in embedder.embed(texts + [query])]
    qvec = vectors[-1]
    qnorm = float(np.linalg.norm(qvec))
    scores: list[tuple[str, float]] = []
    for fn, vec in zip(library, vectors[:-1]):
        norm = float(np.linalg.norm(vec))
        cos = 0.0 if norm == 0.0 or qnorm == 0.0 else float(vec @ qvec) / (norm * qnorm)
        scores.append((fn.name, cos))
    order = sorted(range(len(scores)), key=lambda i: (-scores[i][1], i))
    top = [scores[i] for i in order[:k]]
    target_set = set(targets)
    if force_targets:
        present = {name for name, _ in top}
        for name, score in scores:
            if name in target_set and name not in present:
                top.append((name, score))
    return [ScoredCandidate(name, score, is_target=name in target_set)
            for name, score in top]


def score_plausibility(
    query: str,
    candidates: Sequence[ScoredCandidate],
    targets: Sequence[str],
    exec_type: ExecutionType,
    library: Sequence[FunctionSchema],
    client: SignatureClient,
) -> list[ScoredCandidate]:
    """One batched 1-5 rating call, order-aligned with the candidates."""
    if not candidates:
        return []
    by_name = {fn.name: fn for fn in library}
    apis_payload = json.dumps([by_name[c.name].to_dict() for c in candidates],
                              ensure_ascii=False)
    if exec_type in (ExecutionType.PARALLEL, ExecutionType.SEQUENTIAL):
        sig = catalog.get("ParallelAPIRelevanceScorer")
        inputs = {"query": query, "apis": apis_payload,
                  "target_apis": json.dumps(list(targets), ensure_ascii=False)}
    else:
        sig = catalog.get("BatchAPIRelevanceScorer")
        inputs = {"query": query, "apis": apis_payload,
                  "target_api": targets[0] if targets else ""}

    last_error = ""
    for _ in range(2):  # one retry on misalignment
        try:
            out = client.call(sig, inputs)
            rows = json.loads(out["scores"])
        except (SignatureParseError, json.JSONDecodeError) as exc:
            last_error = str(exc)
            continue
        if (isinstance(rows, list) and len(rows) == len(candidates)
                and all(isinstance(r, dict) and "score" in r for r in rows)):
            return [
                ScoredCandidate(c.name, c.retrieval_score,
                                plausibility=int(r["score"]), is_target=c.is_target)
                for c, r in zip(candidates, rows)
            ]
        last_error = "scores misaligned with candidates"
    raise DistractorFailure(f"plausibility scoring failed: {last_error}")


def filter_by_plausibility(
    scored: Sequence[ScoredCandidate], exec_type: ExecutionType
) -> list[ScoredCandidate]:
    """Keep targets unconditionally and non-targets at or below the threshold."""
    threshold = PLAUSIBILITY_THRESHOLDS[exec_type]
    kept = []
    for c in scored:
        if c.is_target:
            kept.append(c)
        elif c.plausibility is not None and c.plausibility <= threshold:
            kept.append(c)
    return kept


def elbow_cutoff(sorted_scores: Sequence[float], min_keep: int = 1) -> int:
    """How many leading entries to keep from a descending score list.

    With d_i = s_i - s_{i+1} and dd_i = d_i - d_{i-1}, the elbow sits at the
    first argmax of dd (the sharpest acceleration of the drop); indices up to
    and including it survive, floored at max(min_keep, 1). Fewer than three
    scores keep everything.
    """
    n = len(sorted_scores)
    if any(sorted_scores[i] < sorted_scores[i + 1] for i in range(n - 1)):
        raise ValueError("scores must be sorted descending")
    if n < 3:
        return n
    d = [sorted_scores[i] - sorted_scores[i + 1] for i in range(n - 1)]
    dd = [d[i] - d[i - 1] for i in range(1, len(d))]
    elbow = 1 + max(range(len(dd)), key=lambda i: (dd[i], -i))
    keep = elbow + 1
    return min(n, max(keep, min_keep, 1))


def parse_invocation_names(raw: str, known: Sequence[str]) -> list[str]:
    """Function names from '[name(arg=v, ...), name2(...)]' or a single call.

    Names may contain spaces; known names are matched preferentially so exotic
    characters survive.
    """
    text = raw.strip()
    if text in ("", "[]", "''", '""'):
        return []
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    names: list[str] = []
    depth = 0
    start = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            if depth == 0:
                candidate = text[start:i].strip().strip(",").strip()
                if candidate:
                    names.append(candidate)
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
            if depth == 0:
                start = i + 1
        i += 1
    # exact-match cleanup against known names
    cleaned = []
    known_set = set(known)
    for name in names:
        if name in known_set:
            cleaned.append(name)
        else:
            match = next((k for k in known if name.endswith(k) or k in name), None)
            cleaned.append(match if match is not None else name)
    return cleaned


@dataclass
class AlternativeOutcome:
    candidates: list[ScoredCandidate]
    targets: list[str]
    exec_type: ExecutionType
    invalid: bool = False
    note: str = ""


def validate_invocation_alternatives(
    query: str,
    kept: Sequence[ScoredCandidate],
    targets: Sequence[str],
    exec_type: ExecutionType,
    library: Sequence[FunctionSchema],
    client: SignatureClient,
) -> AlternativeOutcome:
    """For multi-call examples: look for a validated alternative invocation.

    An alternative using non-target candidates removes those candidates; an
    alternative that is a strict subset of the targets shrinks the targets
    (one left -> SINGLE, none left -> invalid).
    """
    if exec_type not in (ExecutionType.PARALLEL, ExecutionType.SEQUENTIAL):
        return AlternativeOutcome(list(kept), list(targets), exec_type)
    by_name = {fn.name: fn for fn in library}
    available = sorted({c.name for c in kept} | set(targets))
    available_payload = json.dumps([by_name[n].to_dict() for n in available],
                                   ensure_ascii=False)
    try:
        if exec_type is ExecutionType.PARALLEL:
            out = client.call(catalog.get("ConstructParallelInvocation"),
                              {"query": query, "available_apis": available_payload})
            invocations = parse_invocation_names(out["invocation_apis"], available)
            if not invocations:
                return AlternativeOutcome(list(kept), list(targets), exec_type)
            schemas_payload = json.dumps(
                [by_name[n].to_dict() for n in invocations if n in by_name],
                ensure_ascii=False)
            verdict = client.call(catalog.get("ValidateParallelInvocation"), {
                "query": query,
                "invocation_apis": out["invocation_apis"],
                "api_schemas": schemas_payload,
            })
        else:
            calls: list[str] = []
            for _ in range(len(available)):
                step = client.call(catalog.get("ConstructSequentialInvocation"), {
                    "query": query,
                    "available_apis": available_payload,
                    "invocations_up_to_this_point": json.dumps(calls, ensure_ascii=False),
                    "return_values_up_to_this_point": "[]",
                })
                nxt = step["next_api"].strip()
                if not nxt:
                    break
                calls.append(nxt)
            invocations = parse_invocation_names(json.dumps(calls), available) if calls else []
            if not invocations:
                return AlternativeOutcome(list(kept), list(targets), exec_type)
            schemas_payload = json.dumps(
                [by_name[n].to_dict() for n in invocations if n in by_name],
                ensure_ascii=False)
            verdict = client.call(catalog.get("ValidateSequentialInvocation"), {
                "query": query,
                "invocation_apis": json.dumps(calls, ensure_ascii=False),
                "api_schemas": schemas_payload,
                "return_values_list": "[]",
            })
    except SignatureParseError:
        return AlternativeOutcome(list(kept), list(targets), exec_type,
                                  note="alternative check unparseable; unchanged")

    if verdict["is_valid"].strip().upper() != "YES":
        return AlternativeOutcome(list(kept), list(targets), exec_type)
    alt = set(invocations)
    target_set = set(targets)
    if alt == target_set:
        return AlternativeOutcome(list(kept), list(targets), exec_type)
    extra = alt - target_set
    if extra:
        new_kept = [c for c in kept if c.name not in extra]
        return AlternativeOutcome(new_kept, list(targets), exec_type,
                                  note=f"removed ambiguous candidates: {sorted(extra)}")
    # strict subset of targets: shrink
    new_targets = [t for t in targets if t in alt]
    if not new_targets:
        return AlternativeOutcome(list(kept), [], exec_type, invalid=True,
                                  note="alternative empty; query invalid")
    new_type = ExecutionType.SINGLE if len(new_targets) == 1 else exec_type
    return AlternativeOutcome(list(kept), new_targets, new_type,
                              note=f"targets shrunk to {new_targets}")


def finalize(
    distractors: Sequence[str], targets: Sequence[str], rng: random.Random
) -> list[str]:
    """Union the targets with the kept distractors and shuffle under the seed."""
    final = list(targets) + [d for d in distractors if d not in set(targets)]
    rng.shuffle(final)
    return final


def assemble_candidates(
    query: str,
    targets: Sequence[str],
    exec_type: ExecutionType,
    library: Sequence[FunctionSchema],
    embedder,
    client: SignatureClient,
    rng: random.Random,
    retrieval_k: int = 20,
) -> AlternativeOutcome:
    """The full per-example pipeline; the finalized shuffled list is left to the
    caller so target updates can be applied first."""
    retrieved = retrieve_candidates(
        query, library, embedder, retrieval_k, targets,
        force_targets=exec_type is not ExecutionType.NONE)
    scored = score_plausibility(query, retrieved, targets, exec_type, library, client)
    kept = filter_by_plausibility(scored, exec_type)
    survivors = [c for c in kept if not c.is_target]
    if exec_type in (ExecutionType.PARALLEL, ExecutionType.SEQUENTIAL):
        min_keep = 2 * len(targets)
        if len(survivors) < min_keep:
            raise DistractorFailure(
                f"only {len(survivors)} distractor candidates for {len(targets)} targets")
    else:
        min_keep = 1
    survivors.sort(key=lambda c: -c.retrieval_score)
    n_keep = elbow_cutoff([c.retrieval_score for c in survivors], min_keep) if survivors else 0
    cut = survivors[:n_keep]
    outcome = validate_invocation_alternatives(
        query, cut, targets, exec_type, library, client)
    return outcome
