import json
import math
import random

import pytest

from divgen.evaluate import (
    analyze_corpus,
    collect_group_values,
    compare_argument_diversity,
    compare_linguistic_diversity,
    judge_tool_call_equivalence,
    paired_model_comparison,
)
from divgen.fixtures import repetitive_corpus, varied_corpus
from divgen.metrics.battery import REPORT_METRICS
from divgen.model import ExecutionType, GeneratedExample, Invocation
from divgen.preprocess import group_parameters
from divgen.providers.base import SignatureClient
from divgen.providers.mock import ScriptedChat
from test_preprocess import fn, param


def test_corpus_vs_itself_never_significant(embedder):
    corpus = varied_corpus()[:12]
    report = compare_linguistic_diversity(corpus, corpus, embedder, seed=3)
    assert len(report.rows) == 12
    assert all(not r.significant for r in report.rows)


def test_fixture_pair_direction_check(embedder):
    report = compare_linguistic_diversity(
        varied_corpus(), repetitive_corpus(), embedder, seed=5,
        label_a="varied", label_b="repetitive")
    wins = [r.metric for r in report.rows
            if r.metric != "var_length" and r.score_a > r.score_b]
    assert len(wins) >= 11
    anomaly = report.row("var_length")
    assert anomaly.score_b > anomaly.score_a  # long outliers inflate the variance


def test_report_bytes_reproducible(embedder):
    corpus = varied_corpus()[:15]
    a = json.dumps(analyze_corpus(corpus, embedder, seed=7).to_dict())
    b = json.dumps(analyze_corpus(corpus, embedder, seed=7).to_dict())
    assert a == b


def test_report_internal_consistency(embedder):
    report = compare_linguistic_diversity(
        varied_corpus()[:20], repetitive_corpus()[:20], embedder, seed=1)
    from divgen.metrics.stats import significance
    for row in report.rows:
        sig, direction = significance(row.score_a, row.std_a, row.score_b, row.std_b)
        assert sig == row.significant
        assert direction == row.direction


def test_report_table_lists_every_metric(embedder):
    report = analyze_corpus(varied_corpus()[:10], embedder, seed=0)
    table = report.to_table()
    for metric in REPORT_METRICS:
        assert metric in table


# --- argument diversity ----------------------------------------------------------


def city_example(eid, city, function="city_weather"):
    return GeneratedExample(
        id=eid, execution_type=ExecutionType.SINGLE,
        query=f"check {city}",
        target_invocations=(Invocation(function, {"city": city}),),
        candidate_functions=(function,), metadata={})


def shared_library():
    return [fn("city_weather", param("city", "names the destination city"),
               description="weather by city")]


def test_collect_group_values_skips_sentinels(embedder):
    lib = shared_library()
    groups = group_parameters(lib, embedder, 0.6)
    examples = [city_example("e1", "Oslo"),
                GeneratedExample(
                    id="e2", execution_type=ExecutionType.MISSING_PARAMS,
                    query="q",
                    target_invocations=(Invocation("city_weather",
                                                   {"city": "__MISSING__"}),),
                    candidate_functions=("city_weather",), metadata={})]
    values = collect_group_values(examples, groups)
    assert list(values.values()) == [["Oslo"]]


def test_argument_diversity_distinct_values_hit_max(embedder):
    lib = shared_library()
    cities_a = [f"city{i} alpha{i} beta{i} gamma{i} delta{i}" for i in range(20)]
    cities_b = ["Same Place"] * 20
    ex_a = [city_example(f"a{i}", c) for i, c in enumerate(cities_a)]
    ex_b = [city_example(f"b{i}", c) for i, c in enumerate(cities_b)]
    result = compare_argument_diversity(ex_a, ex_b, lib, lib, embedder, seed=2)
    assert len(result["groups"]) == 1
    row = result["groups"][0]
    assert row["ce_a"] == pytest.approx(math.log2(20), abs=1e-9)
    assert row["ce_b"] == 0.0
    assert row["ce_significant"] and row["ce_direction"] == 1
    assert result["average"]["ce_a"] == pytest.approx(4.3219, abs=1e-4)


def test_argument_diversity_no_shared_groups_warns(embedder):
    lib = shared_library()
    examples = [city_example(f"a{i}", f"city {i}") for i in range(5)]  # < 20
    result = compare_argument_diversity(examples, examples, lib, lib, embedder)
    assert result["groups"] == []
    assert "warning" in result


def test_argument_diversity_reproducible(embedder):
    lib = shared_library()
    rng = random.Random(0)
    cities = [f"town{i} r{rng.randrange(99)}" for i in range(30)]
    examples = [city_example(f"a{i}", c) for i, c in enumerate(cities)]
    r1 = compare_argument_diversity(examples, examples, lib, lib, embedder, seed=4)
    r2 = compare_argument_diversity(examples, examples, lib, lib, embedder, seed=4)
    assert json.dumps(r1) == json.dumps(r2)


# --- model comparison ---------------------------------------------------------------


def test_equivalence_judge(embedder):
    schema = fn("get_restaurants", param("location", "city to search"),
                description="find restaurants")
    chat = ScriptedChat().script_output(
        "ToolCallEquivalence",
        {"reasoning": "the two location spellings name the same city and the"
                      " calls would return identical results",
         "equivalent": "YES"})
    ok, reasoning = judge_tool_call_equivalence(
        "find italian restaurants in new york", schema,
        {"name": "get_restaurants", "arguments": {"location": "New York"}},
        {"name": "get_restaurants", "arguments": {"location": "NYC"}},
        SignatureClient(chat))
    assert ok
    assert "same city" in reasoning

    chat = ScriptedChat().script_output(
        "ToolCallEquivalence",
        {"reasoning": "different tools entirely", "equivalent": "NO"})
    ok, _ = judge_tool_call_equivalence(
        "q", schema, {"name": "a"}, {"name": "b"}, SignatureClient(chat))
    assert not ok


def test_paired_comparison_identical_labels():
    labels = [True, False, True, True]
    result = paired_model_comparison(labels, labels)
    assert result["b"] == result["c"] == 0
    assert result["p_value"] == 1.0
    assert not result["significant"]


def test_paired_comparison_constructed_5_15():
    # 5 items only A correct, 15 items only B correct, plus agreements
    labels_a = [True] * 5 + [False] * 15 + [True] * 10
    labels_b = [False] * 5 + [True] * 15 + [True] * 10
    result = paired_model_comparison(labels_a, labels_b)
    assert (result["b"], result["c"]) == (5, 15)
    assert result["p_value"] == pytest.approx(0.0414, abs=5e-4)
    assert result["significant"]


def test_paired_comparison_categories_with_holm():
    # three categories engineered to give small p-values
    labels_a, labels_b, cats = [], [], []
    for cat, (b, c) in {"one": (0, 12), "two": (1, 12), "three": (2, 13)}.items():
        labels_a += [True] * b + [False] * c
        labels_b += [False] * b + [True] * c
        cats += [cat] * (b + c)
    result = paired_model_comparison(labels_a, labels_b, correction="holm",
                                     categories=cats)
    rows = {r["category"]: r for r in result["categories"]}
    assert set(rows) == {"one", "two", "three"}
    from divgen.metrics.stats import holm_bonferroni
    pvalues = [rows[c]["p_value"] for c in sorted(rows)]
    want = holm_bonferroni(pvalues, 0.05)
    assert [rows[c]["significant"] for c in sorted(rows)] == want


def test_paired_comparison_validates_input():
    with pytest.raises(ValueError):
        paired_model_comparison([True], [True, False])
    with pytest.raises(ValueError):
        paired_model_comparison([], [])
    with pytest.raises(ValueError):
        paired_model_comparison([True], [True], correction="bogus")


def test_group_value_frequencies_table(embedder):
    from divgen.evaluate import group_value_frequencies
    from divgen.preprocess import group_parameters as gp
    lib = shared_library()
    groups = gp(lib, embedder, 0.6)
    examples = [city_example("e1", "Oslo"), city_example("e2", "Oslo"),
                city_example("e3", "Kyoto")]
    tables = group_value_frequencies(examples, groups)
    (gid, table), = tables.items()
    assert table == {"Oslo": 2, "Kyoto": 1}
    assert list(table) == ["Oslo", "Kyoto"]  # most frequent first


def test_argument_comparison_carries_frequency_tables(embedder):
    lib = shared_library()
    ex_a = [city_example(f"a{i}", f"town{i} alpha{i}") for i in range(20)]
    ex_b = [city_example(f"b{i}", "Same Place") for i in range(20)]
    result = compare_argument_diversity(ex_a, ex_b, lib, lib, embedder, seed=1)
    row = result["groups"][0]
    assert row["frequencies_b"] == {"Same Place": 20}
    assert len(row["frequencies_a"]) == 20
