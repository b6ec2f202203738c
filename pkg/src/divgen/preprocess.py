"""Preprocessing: parameter grouping, API pools, and the API similarity graph.

Grouping is a single seed-anchored pass per category: each still-ungrouped
parameter (in library order) opens a group and absorbs every later ungrouped
parameter whose described-sentence embedding lands within the cosine threshold
of the seed. Group value trackers are the only mutable state in the system;
everything else built here is immutable.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from divgen.model import FunctionSchema, ParamCategory, ParameterSpec, ReturnField, parse_function_library


def describe_parameter(spec: ParameterSpec) -> str:
    """The fixed sentence template embedded for grouping and graph building."""
    sentence = f"The {spec.name} parameter is a {spec.declared_type} that {spec.description}"
    if spec.category is ParamCategory.ENUM:
        sentence += " and must be one of: " + ", ".join(spec.enum_values)
    return sentence


def describe_return_field(field_spec: ReturnField) -> str:
    # return-schema fields reuse the parameter template so they embed comparably
    return f"The {field_spec.name} parameter is a {field_spec.declared_type} that {field_spec.description}"


@dataclass
class ParameterGroup:
    """A semantic cluster of parameters sharing one category.

    ``tracker`` is the append-only list of committed argument values used by the
    greedy diversity selector.
    """

    id: str
    category: ParamCategory
    members: tuple[tuple[str, str], ...]  # (function name, parameter name)
    tracker: list[Any] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "category": self.category.value,
            "members": [list(m) for m in self.members],
            "tracker": list(self.tracker),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ParameterGroup":
        return cls(
            id=d["id"],
            category=ParamCategory(d["category"]),
            members=tuple((m[0], m[1]) for m in d["members"]),
            tracker=list(d.get("tracker", [])),
        )


class GroupIndex:
    """Groups plus the (function, parameter) -> group lookup."""

    def __init__(self, groups: Sequence[ParameterGroup]):
        self.groups = list(groups)
        self._by_member: dict[tuple[str, str], ParameterGroup] = {}
        for g in self.groups:
            for member in g.members:
                if member in self._by_member:
                    raise ValueError(f"parameter {member} assigned to two groups")
                self._by_member[member] = g

    def group_of(self, function_name: str, parameter_name: str) -> ParameterGroup:
        return self._by_member[(function_name, parameter_name)]

    def tracker_snapshot(self, group_id: str) -> tuple[Any, ...]:
        for g in self.groups:
            if g.id == group_id:
                return tuple(g.tracker)
        raise KeyError(group_id)

    def snapshot_all(self) -> dict[str, list[Any]]:
        return {g.id: list(g.tracker) for g in self.groups}

    def restore(self, snapshot: dict[str, list[Any]]) -> None:
        for g in self.groups:
            g.tracker[:] = list(snapshot.get(g.id, []))

    def to_dicts(self) -> list[dict[str, Any]]:
        return [g.to_dict() for g in self.groups]

    @classmethod
    def from_dicts(cls, rows: list[dict[str, Any]]) -> "GroupIndex":
        return cls([ParameterGroup.from_dict(r) for r in rows])


def group_parameters(
    library: Sequence[FunctionSchema], embedder, threshold: float = 0.6
) -> GroupIndex:
    """Partition all parameters into semantic groups, one pass per category."""
    if not library:
        raise ValueError("group_parameters requires a non-empty library")
    entries: list[tuple[str, str, ParamCategory, str]] = []
    for fn in library:
        for p in fn.parameters:
            entries.append((fn.name, p.name, p.category, describe_parameter(p)))
    groups: list[ParameterGroup] = []
    if not entries:
        return GroupIndex(groups)
    vectors = embedder.embed([e[3] for e in entries])
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]

    counter = 0
    for category in ParamCategory:
        idxs = [i for i, e in enumerate(entries) if e[2] is category]
        ungrouped = set(idxs)
        for i in idxs:
            if i not in ungrouped:
                continue
            ungrouped.discard(i)
            members = [i]
            seed_vec = vectors[i]
            seed_norm = float(np.linalg.norm(seed_vec))
            for j in idxs:
                if j not in ungrouped:
                    continue
                norm_j = float(np.linalg.norm(vectors[j]))
                if seed_norm == 0.0 or norm_j == 0.0:
                    cos = 1.0 if seed_norm == norm_j else 0.0
                else:
                    cos = float(seed_vec @ vectors[j]) / (seed_norm * norm_j)
                if cos >= threshold:
                    members.append(j)
                    ungrouped.discard(j)
            groups.append(
                ParameterGroup(
                    id=f"g{counter:03d}",
                    category=category,
                    members=tuple((entries[k][0], entries[k][1]) for k in members),
                )
            )
            counter += 1
    return GroupIndex(groups)


# ---------------------------------------------------------------------------
# API pools


@dataclass(frozen=True)
class ApiPools:
    general: tuple[str, ...]
    focused: tuple[str, ...]
    other: tuple[str, ...]

    def to_dict(self) -> dict[str, list[str]]:
        return {"general": list(self.general), "focused": list(self.focused),
                "other": list(self.other)}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ApiPools":
        return cls(tuple(d["general"]), tuple(d["focused"]), tuple(d["other"]))


def build_api_pools(
    library: Sequence[FunctionSchema],
    groups: GroupIndex,
    rng: random.Random,
    focused_size: int | None = None,
) -> ApiPools:
    """General = everything; focused = weighted draw toward large groups;
    other = functions owning an OTHER-category parameter.

    A function's focused weight is the size of the largest group any of its
    parameters belongs to. Sampling is sequential weighted draws without
    replacement (one ``rng.random()`` per draw).
    """
    names = [fn.name for fn in library]
    if focused_size is None:
        focused_size = max(1, math.ceil(len(names) / 3))
    weights: dict[str, float] = {}
    for fn in library:
        w = 0.0
        for p in fn.parameters:
            w = max(w, float(len(groups.group_of(fn.name, p.name).members)))
        weights[fn.name] = w if w > 0 else 1.0

    remaining = list(names)
    focused: list[str] = []
    while remaining and len(focused) < focused_size:
        total = sum(weights[n] for n in remaining)
        roll = rng.random() * total
        acc = 0.0
        chosen = remaining[-1]
        for n in remaining:
            acc += weights[n]
            if roll < acc:
                chosen = n
                break
        focused.append(chosen)
        remaining.remove(chosen)

    other = tuple(
        fn.name for fn in library
        if any(p.category is ParamCategory.OTHER for p in fn.parameters)
    )
    return ApiPools(general=tuple(names), focused=tuple(focused), other=other)


# ---------------------------------------------------------------------------
# API similarity graph


@dataclass(frozen=True)
class GraphEdge:
    source: str
    target: str
    kind: str  # "P-P" (undirected) or "P-R" (directed source -> target)
    weight: float

    def to_dict(self) -> dict[str, Any]:
        return {"source": self.source, "target": self.target,
                "kind": self.kind, "weight": self.weight}


@dataclass(frozen=True)
class ApiGraph:
    vertices: tuple[str, ...]
    edges: tuple[GraphEdge, ...]

    def pp_neighbors(self, name: str) -> list[tuple[str, float]]:
        out = []
        for e in self.edges:
            if e.kind != "P-P":
                continue
            if e.source == name:
                out.append((e.target, e.weight))
            elif e.target == name:
                out.append((e.source, e.weight))
        return out

    def pr_successors(self, name: str) -> list[tuple[str, float]]:
        return [(e.target, e.weight) for e in self.edges
                if e.kind == "P-R" and e.source == name]

    def has_kind(self, kind: str) -> bool:
        return any(e.kind == kind for e in self.edges)

    def to_dict(self) -> dict[str, Any]:
        return {"vertices": list(self.vertices),
                "edges": [e.to_dict() for e in self.edges]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ApiGraph":
        return cls(
            vertices=tuple(d["vertices"]),
            edges=tuple(GraphEdge(e["source"], e["target"], e["kind"], e["weight"])
                        for e in d["edges"]),
        )


def build_similarity_graph(
    library: Sequence[FunctionSchema], embedder, threshold: float = 0.6
) -> ApiGraph:
    """P-P edge when two functions share a similar input parameter; P-R edge
    u -> v when a return field of u resembles an input parameter of v.
    Edge weight is the maximum qualifying similarity.
    """
    param_texts: dict[str, list[str]] = {}
    return_texts: dict[str, list[str]] = {}
    for fn in library:
        param_texts[fn.name] = [describe_parameter(p) for p in fn.parameters]
        flat_returns: list[ReturnField] = []

        def flatten(fields: tuple[ReturnField, ...]) -> None:
            for f in fields:
                flat_returns.append(f)
                flatten(f.fields)

        flatten(fn.return_fields)
        return_texts[fn.name] = [describe_return_field(f) for f in flat_returns]

    all_texts = sorted({t for ts in param_texts.values() for t in ts}
                       | {t for ts in return_texts.values() for t in ts})
    vectors: dict[str, np.ndarray] = {}
    if all_texts:
        for text, vec in zip(all_texts, embedder.embed(all_texts)):
            vectors[text] = np.asarray(vec, dtype=np.float64)

    def max_sim(texts_a: list[str], texts_b: list[str]) -> float:
        best = -1.0
        for ta in texts_a:
            va = vectors[ta]
            na = float(np.linalg.norm(va))
            for tb in texts_b:
                vb = vectors[tb]
                nb = float(np.linalg.norm(vb))
                if na == 0.0 or nb == 0.0:
                    continue
                best = max(best, float(va @ vb) / (na * nb))
        return best

    names = [fn.name for fn in library]
    edges: list[GraphEdge] = []
    for i, u in enumerate(names):
        for v in names[i + 1:]:
            sim = max_sim(param_texts[u], param_texts[v])
            if sim >= threshold:
                edges.append(GraphEdge(u, v, "P-P", round(sim, 12)))
    for u in names:
        for v in names:
            if u == v:
                continue
            sim = max_sim(return_texts[u], param_texts[v])
            if sim >= threshold:
                edges.append(GraphEdge(u, v, "P-R", round(sim, 12)))
    return ApiGraph(vertices=tuple(names), edges=tuple(edges))


# ---------------------------------------------------------------------------
# Artifact persistence


def write_artifact(
    path: str | Path,
    library: Sequence[FunctionSchema],
    groups: GroupIndex,
    pools: ApiPools,
    graph: ApiGraph,
    config: dict[str, Any] | None = None,
) -> None:
    """Persist everything `generate` needs so it can run without recomputation."""
    doc = {
        "library": [fn.to_dict() for fn in library],
        "groups": groups.to_dicts(),
        "pools": pools.to_dict(),
        "graph": graph.to_dict(),
        "config": config or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False, indent=1, sort_keys=True)
        fh.write("\n")


def read_artifact(path: str | Path) -> tuple[list[FunctionSchema], GroupIndex, ApiPools, ApiGraph, dict]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    library = parse_function_library(doc["library"])
    return (
        library,
        GroupIndex.from_dicts(doc["groups"]),
        ApiPools.from_dict(doc["pools"]),
        ApiGraph.from_dict(doc["graph"]),
        doc.get("config", {}),
    )
