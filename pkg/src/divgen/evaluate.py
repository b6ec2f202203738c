"""Dataset-vs-dataset diversity comparison and paired model statistics.

Linguistic comparison scores twelve metrics per corpus with seeded bootstrap
standard deviations and the 1.96-rule significance flag. Argument comparison
matches parameter groups across datasets (grouping both libraries jointly),
samples 20 values per group, and scores them by compression distance and
cluster entropy. Model comparisons build discordant-pair counts for McNemar,
with Holm-Bonferroni across categories.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Any, Sequence

from divgen.metrics.battery import (
    REPORT_METRICS,
    EmbeddingCache,
    evaluate_full_battery,
    metric_fn_over_indices,
)
from divgen.metrics.cluster_entropy import value_cluster_entropy
from divgen.metrics.stats import bootstrap_std, holm_bonferroni, mcnemar, significance
from divgen.metrics.text import ncd_diversity
from divgen.model import FunctionSchema, GeneratedExample, ParamCategory
from divgen.preprocess import GroupIndex, group_parameters
from divgen.providers import catalog
from divgen.providers.base import SignatureClient

@dataclass
class MetricRow:
    metric: str
    score_a: float
    std_a: float
    score_b: float | None = None
    std_b: float | None = None
    significant: bool | None = None
    direction: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass
class DiversityReport:
    rows: list[MetricRow] = field(default_factory=list)
    label_a: str = "A"
    label_b: str | None = None
    seed: int = 0
    warnings: list[str] = field(default_factory=list)

    def row(self, metric: str) -> MetricRow:
        for r in self.rows:
            if r.metric == metric:
                return r
        raise KeyError(metric)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "label_a": self.label_a,
            "seed": self.seed,
            "rows": [r.to_dict() for r in self.rows],
        }
        if self.label_b is not None:
            d["label_b"] = self.label_b
        if self.warnings:
            d["warnings"] = self.warnings
        return d

    def to_table(self) -> str:
        """Aligned plain-text table mirroring the structured report."""
        headers = ["metric", self.label_a, "std"]
        if self.label_b is not None:
            headers += [self.label_b, "std", "significant"]
        lines = []
        for r in self.rows:
            cells = [r.metric, f"{r.score_a:.4f}", f"{r.std_a:.4f}"]
            if self.label_b is not None:
                flag = "*" if r.significant else ""
                cells += [f"{r.score_b:.4f}", f"{r.std_b:.4f}", flag]
            lines.append(cells)
        widths = [max(len(h), *(len(row[i]) for row in lines)) if lines else len(h)
                  for i, h in enumerate(headers)]
        def fmt(cells: list[str]) -> str:
            return "  ".join(c.ljust(w) for c, w in zip(cells, widths))
        return "\n".join([fmt(headers)] + [fmt(row) for row in lines])


def _metric_seed(seed: int, metric: str) -> int:
    # stable per-metric offset so reports are reproducible metric by metric
    return seed * 1000 + REPORT_METRICS.index(metric)


def analyze_corpus(corpus: Sequence[str], embedder, seed: int = 0,
                   label: str = "corpus") -> DiversityReport:
    """Single-corpus report: all twelve metrics with bootstrap stds."""
    if not corpus:
        raise ValueError("cannot analyze an empty corpus")
    cache = EmbeddingCache(embedder)
    embeddings = cache.matrix(list(corpus))
    scores = evaluate_full_battery(list(corpus), embeddings)
    report = DiversityReport(label_a=label, seed=seed)
    indices = list(range(len(corpus)))
    for metric in REPORT_METRICS:
        fn = metric_fn_over_indices(metric, corpus, embeddings)
        std = bootstrap_std(indices, fn, seed=_metric_seed(seed, metric))
        report.rows.append(MetricRow(metric, scores[metric], std))
    return report


def compare_linguistic_diversity(
    corpus_a: Sequence[str],
    corpus_b: Sequence[str],
    embedder,
    seed: int = 0,
    label_a: str = "A",
    label_b: str = "B",
) -> DiversityReport:
    """Two-corpus report with per-metric significance verdicts."""
    rep_a = analyze_corpus(corpus_a, embedder, seed, label_a)
    rep_b = analyze_corpus(corpus_b, embedder, seed, label_b)
    report = DiversityReport(label_a=label_a, label_b=label_b, seed=seed)
    for metric in REPORT_METRICS:
        a = rep_a.row(metric)
        b = rep_b.row(metric)
        sig, direction = significance(a.score_a, a.std_a, b.score_a, b.std_a)
        report.rows.append(MetricRow(metric, a.score_a, a.std_a,
                                     b.score_a, b.std_a, sig, direction))
    return report


# ---------------------------------------------------------------------------
# Argument diversity


def collect_group_values(
    examples: Sequence[GeneratedExample], groups: GroupIndex
) -> dict[str, list[Any]]:
    """Argument values per group id, in dataset order, sentinels excluded."""
    out: dict[str, list[Any]] = {}
    for ex in examples:
        for inv in ex.target_invocations:
            for pname, value in inv.arguments.items():
                if value == "__MISSING__":
                    continue
                try:
                    group = groups.group_of(inv.function_name, pname)
                except KeyError:
                    continue
                out.setdefault(group.id, []).append(value)
    return out


def group_value_frequencies(
    examples: Sequence[GeneratedExample], groups: GroupIndex
) -> dict[str, dict[str, int]]:
    """Value -> count per group, most frequent first (machine-checkable view of
    how concentrated each group's argument distribution is)."""
    tables: dict[str, dict[str, int]] = {}
    for group_id, values in collect_group_values(examples, groups).items():
        counts: dict[str, int] = {}
        for value in values:
            key = value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)
            counts[key] = counts.get(key, 0) + 1
        tables[group_id] = dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))
    return tables


def compare_argument_diversity(
    examples_a: Sequence[GeneratedExample],
    examples_b: Sequence[GeneratedExample],
    library_a: Sequence[FunctionSchema],
    library_b: Sequence[FunctionSchema],
    embedder,
    seed: int = 0,
    min_occurrences: int = 20,
    sample_size: int = 20,
    threshold: float = 0.6,
) -> dict[str, Any]:
    """Per-group and average NCD + cluster entropy over matched groups.

    Both libraries are grouped jointly with the shared threshold so a group can
    span datasets; only groups with at least ``min_occurrences`` values in each
    dataset participate. Values are sampled uniformly (``sample_size`` each)
    under the seed.
    """
    merged: list[FunctionSchema] = list(library_a)
    names_a = {fn.name for fn in library_a}
    merged += [fn for fn in library_b if fn.name not in names_a]
    groups = group_parameters(merged, embedder, threshold)
    values_a = collect_group_values(examples_a, groups)
    values_b = collect_group_values(examples_b, groups)
    freq_a = group_value_frequencies(examples_a, groups)
    freq_b = group_value_frequencies(examples_b, groups)

    rng = random.Random(seed)
    rows: list[dict[str, Any]] = []
    sums = {"ncd_a": 0.0, "ncd_b": 0.0, "ce_a": 0.0, "ce_b": 0.0}
    for group in groups.groups:
        if group.category not in (ParamCategory.NUMERICAL, ParamCategory.STRING):
            continue
        va = values_a.get(group.id, [])
        vb = values_b.get(group.id, [])
        if len(va) < min_occurrences or len(vb) < min_occurrences:
            continue
        sample_a = rng.sample(va, sample_size)
        sample_b = rng.sample(vb, sample_size)
        category = group.category.value

        def ncd_fn(vals: list[Any]) -> float:
            return ncd_diversity([str(v) for v in vals])

        def ce_fn(vals: list[Any], _cat: str = category) -> float:
            return value_cluster_entropy(vals, _cat, embedder)

        row = {
            "group": group.id,
            "category": category,
            "members": [f"{fn}.{pn}" for fn, pn in group.members],
            "frequencies_a": freq_a.get(group.id, {}),
            "frequencies_b": freq_b.get(group.id, {}),
            "ncd_a": ncd_fn(sample_a),
            "ncd_b": ncd_fn(sample_b),
            "ncd_std_a": bootstrap_std(sample_a, ncd_fn, seed=seed + 1),
            "ncd_std_b": bootstrap_std(sample_b, ncd_fn, seed=seed + 2),
            "ce_a": ce_fn(sample_a),
            "ce_b": ce_fn(sample_b),
            "ce_std_a": bootstrap_std(sample_a, ce_fn, seed=seed + 3),
            "ce_std_b": bootstrap_std(sample_b, ce_fn, seed=seed + 4),
        }
        ncd_sig, ncd_dir = significance(row["ncd_a"], row["ncd_std_a"],
                                        row["ncd_b"], row["ncd_std_b"])
        ce_sig, ce_dir = significance(row["ce_a"], row["ce_std_a"],
                                      row["ce_b"], row["ce_std_b"])
        row["ncd_significant"], row["ncd_direction"] = ncd_sig, ncd_dir
        row["ce_significant"], row["ce_direction"] = ce_sig, ce_dir
        rows.append(row)
        for key, col in (("ncd_a", "ncd_a"), ("ncd_b", "ncd_b"),
                         ("ce_a", "ce_a"), ("ce_b", "ce_b")):
            sums[key] += row[col]

    result: dict[str, Any] = {"groups": rows, "seed": seed}
    if rows:
        n = len(rows)
        result["average"] = {k: v / n for k, v in sums.items()}
    else:
        result["warning"] = ("no parameter group appears at least"
                             f" {min_occurrences} times in both datasets")
    return result


# ---------------------------------------------------------------------------
# Model-output evaluation


def judge_tool_call_equivalence(
    query: str,
    schema: FunctionSchema | dict[str, Any],
    ground_truth_call: dict[str, Any] | str,
    predicted_call: dict[str, Any] | str,
    client: SignatureClient,
) -> tuple[bool, str]:
    """LLM verdict on whether two calls mean the same thing."""
    schema_dict = schema.to_dict() if isinstance(schema, FunctionSchema) else schema

    def as_text(call: dict[str, Any] | str) -> str:
        return call if isinstance(call, str) else json.dumps(call, ensure_ascii=False)

    out = client.call(catalog.get("ToolCallEquivalence"), {
        "user_query": query,
        "tool_schema": json.dumps(schema_dict, ensure_ascii=False),
        "ground_truth_call": as_text(ground_truth_call),
        "predicted_call": as_text(predicted_call),
    })
    return out["equivalent"].strip().upper() == "YES", out.get("reasoning", "")


def paired_model_comparison(
    labels_a: Sequence[bool],
    labels_b: Sequence[bool],
    alpha: float = 0.05,
    correction: str = "none",
    categories: Sequence[str] | None = None,
) -> dict[str, Any]:
    """Accuracies, discordant counts, McNemar p-value(s), and verdicts.

    b counts items the first system got right and the second wrong; c the
    reverse. With ``categories`` given, per-category p-values are corrected by
    Holm-Bonferroni when requested.
    """
    if len(labels_a) != len(labels_b):
        raise ValueError("label vectors must have equal length")
    if correction not in ("none", "holm"):
        raise ValueError("correction must be 'none' or 'holm'")
    n = len(labels_a)
    if n == 0:
        raise ValueError("label vectors must be non-empty")

    def counts(idx: Sequence[int]) -> tuple[int, int]:
        b = sum(1 for i in idx if labels_a[i] and not labels_b[i])
        c = sum(1 for i in idx if not labels_a[i] and labels_b[i])
        return b, c

    all_idx = list(range(n))
    b, c = counts(all_idx)
    result: dict[str, Any] = {
        "accuracy_a": sum(map(bool, labels_a)) / n,
        "accuracy_b": sum(map(bool, labels_b)) / n,
        "b": b,
        "c": c,
        "p_value": mcnemar(b, c),
    }
    result["significant"] = result["p_value"] < alpha
    if categories is not None:
        if len(categories) != n:
            raise ValueError("categories must align with labels")
        per_cat: list[dict[str, Any]] = []
        cat_names = sorted(set(categories))
        pvalues = []
        for cat in cat_names:
            idx = [i for i in all_idx if categories[i] == cat]
            cb, cc = counts(idx)
            p = mcnemar(cb, cc)
            pvalues.append(p)
            per_cat.append({
                "category": cat,
                "accuracy_a": sum(1 for i in idx if labels_a[i]) / len(idx),
                "accuracy_b": sum(1 for i in idx if labels_b[i]) / len(idx),
                "b": cb, "c": cc, "p_value": p,
            })
        if correction == "holm":
            rejects = holm_bonferroni(pvalues, alpha)
        else:
            rejects = [p < alpha for p in pvalues]
        for row, rej in zip(per_cat, rejects):
            row["significant"] = rej
        result["categories"] = per_cat
    return result
