import json
import random
from collections import Counter

import pytest

from divgen.distractors import (
    DistractorFailure,
    ScoredCandidate,
    elbow_cutoff,
    filter_by_plausibility,
    finalize,
    parse_invocation_names,
    retrieve_candidates,
    score_plausibility,
    validate_invocation_alternatives,
)
from divgen.model import ExecutionType
from divgen.providers import catalog
from divgen.providers.base import SignatureClient
from divgen.providers.mock import ScriptedChat
from divgen.providers.signature import format_output
from test_preprocess import fn, param


def tiny_library():
    return [
        fn("storm_watch", param("region", "name of the region to monitor"),
           description="track storms and heavy weather warnings for a region"),
        fn("picnic_plan", param("park", "name of the park"),
           description="plan an outdoor picnic with weather friendly timing"),
        fn("plant_care", param("species", "name of the house plant"),
           description="care reminders for potted house plants"),
    ]


def test_retrieve_small_library_returns_all(embedder):
    lib = tiny_library()
    got = retrieve_candidates("will the storm hit our region tomorrow",
                              lib, embedder, k=20, targets=["storm_watch"])
    assert {c.name for c in got} == {f.name for f in lib}
    assert got[0].name == "storm_watch"  # most similar by shared tokens
    assert got[0].is_target


def test_retrieve_force_includes_missing_target(embedder):
    lib = tiny_library()
    got = retrieve_candidates("totally unrelated cosmic verse", lib, embedder,
                              k=1, targets=["plant_care"])
    assert len(got) in (1, 2)
    names = [c.name for c in got]
    assert "plant_care" in names
    target = next(c for c in got if c.name == "plant_care")
    assert target.is_target


def test_retrieve_none_type_does_not_force(embedder):
    lib = tiny_library()
    got = retrieve_candidates("totally unrelated cosmic verse", lib, embedder,
                              k=1, targets=["plant_care"], force_targets=False)
    assert len(got) == 1


def scores_reply(sig_name, rows):
    return format_output(catalog.get(sig_name),
                         {"reasoning": "rated",
                          "scores": json.dumps(rows)})


def test_score_plausibility_order_aligned(embedder):
    lib = tiny_library()
    cands = [ScoredCandidate("storm_watch", 0.9, is_target=True),
             ScoredCandidate("picnic_plan", 0.5),
             ScoredCandidate("plant_care", 0.1)]
    rows = [
        {"api_name": "storm_watch", "score": 5, "reasoning": "direct match"},
        {"api_name": "picnic_plan", "score": 2, "reasoning": "adjacent"},
        {"api_name": "plant_care", "score": 1, "reasoning": "unrelated"},
    ]
    chat = ScriptedChat().script(scores_reply("BatchAPIRelevanceScorer", rows),
                                 signature="BatchAPIRelevanceScorer")
    scored = score_plausibility("storm question", cands, ["storm_watch"],
                                ExecutionType.SINGLE, lib, SignatureClient(chat))
    assert [c.plausibility for c in scored] == [5, 2, 1]


def test_score_plausibility_misalignment_retries_then_fails(embedder):
    lib = tiny_library()
    cands = [ScoredCandidate("storm_watch", 0.9), ScoredCandidate("plant_care", 0.1)]
    short = scores_reply("BatchAPIRelevanceScorer",
                         [{"api_name": "storm_watch", "score": 5, "reasoning": "x"}])
    chat = ScriptedChat().script(short, signature="BatchAPIRelevanceScorer")
    with pytest.raises(DistractorFailure, match="misaligned"):
        score_plausibility("q", cands, ["storm_watch"], ExecutionType.SINGLE,
                           lib, SignatureClient(chat))
    assert len(chat.calls) == 2  # one retry


def test_score_plausibility_empty_candidates(embedder):
    assert score_plausibility("q", [], [], ExecutionType.SINGLE, tiny_library(),
                              SignatureClient(ScriptedChat())) == []


def test_filter_thresholds_per_type():
    scored = [
        ScoredCandidate("t", 0.9, plausibility=5, is_target=True),
        ScoredCandidate("a", 0.8, plausibility=3),
        ScoredCandidate("b", 0.7, plausibility=2),
        ScoredCandidate("c", 0.6, plausibility=1),
    ]
    general = filter_by_plausibility(scored, ExecutionType.SINGLE)
    assert [c.name for c in general] == ["t", "b", "c"]
    strict = filter_by_plausibility(scored, ExecutionType.MISSING_PARAMS)
    assert [c.name for c in strict] == ["t", "c"]
    parallel = filter_by_plausibility(scored, ExecutionType.PARALLEL)
    assert [c.name for c in parallel] == ["t", "b", "c"]


def test_elbow_hand_trace_plateau_then_drop():
    # d = [0.02, 0.02, 0.36, 0.02]; dd = [0, 0.34, -0.34] -> elbow index 2, keep 3
    assert elbow_cutoff([0.9, 0.88, 0.86, 0.5, 0.48], min_keep=1) == 3


def test_elbow_hand_trace_monotone_linear():
    # binary-exact equal steps: dd all zero -> first argmax, keep 2, floored at min_keep
    assert elbow_cutoff([1.0, 0.75, 0.5, 0.25], min_keep=1) == 2
    assert elbow_cutoff([1.0, 0.75, 0.5, 0.25], min_keep=3) == 3


def test_elbow_small_inputs_keep_all():
    assert elbow_cutoff([0.5, 0.4], min_keep=1) == 2
    assert elbow_cutoff([0.5], min_keep=1) == 1


def test_elbow_bounds_property():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randrange(1, 12)
        scores = sorted((rng.random() for _ in range(n)), reverse=True)
        for min_keep in (1, 2, 3):
            keep = elbow_cutoff(scores, min_keep)
            assert max(1, min(min_keep, n)) <= keep <= n


def test_elbow_rejects_unsorted():
    with pytest.raises(ValueError):
        elbow_cutoff([0.1, 0.9])


def test_parse_invocation_names_handles_spaces_and_lists():
    known = ["Video Info by URL", "video_fetch"]
    raw = '[video_fetch(video_url=https://x), Video Info by URL(video_url=https://x)]'
    assert parse_invocation_names(raw, known) == ["video_fetch", "Video Info by URL"]
    assert parse_invocation_names("[]", known) == []
    assert parse_invocation_names("video_fetch(a=1)", known) == ["video_fetch"]


def alt_chat(parallel_invocation, valid="YES"):
    chat = ScriptedChat()
    chat.script_output("ConstructParallelInvocation",
                       {"reasoning": "combining", "invocation_apis": parallel_invocation})
    chat.script_output("ValidateParallelInvocation",
                       {"reasoning": "checked", "is_valid": valid})
    return chat


def multi_library():
    return [
        fn("alpha_api", param("x", "shared field one"), description="alpha service"),
        fn("beta_api", param("y", "shared field two"), description="beta service"),
        fn("gamma_api", param("z", "shared field three"), description="gamma service"),
    ]


def test_alternatives_none_found_keeps_everything():
    lib = multi_library()
    kept = [ScoredCandidate("gamma_api", 0.4, plausibility=2)]
    out = validate_invocation_alternatives(
        "q", kept, ["alpha_api", "beta_api"], ExecutionType.PARALLEL,
        lib, SignatureClient(alt_chat("[]")))
    assert [c.name for c in out.candidates] == ["gamma_api"]
    assert out.targets == ["alpha_api", "beta_api"]
    assert not out.invalid


def test_alternatives_subset_downgrades_to_single():
    lib = multi_library()
    out = validate_invocation_alternatives(
        "q", [ScoredCandidate("gamma_api", 0.4, plausibility=2)],
        ["alpha_api", "beta_api"], ExecutionType.PARALLEL,
        lib, SignatureClient(alt_chat("[alpha_api(x=1)]")))
    assert out.targets == ["alpha_api"]
    assert out.exec_type is ExecutionType.SINGLE
    assert not out.invalid


def test_alternatives_with_distractor_removes_it():
    lib = multi_library()
    out = validate_invocation_alternatives(
        "q", [ScoredCandidate("gamma_api", 0.4, plausibility=2)],
        ["alpha_api", "beta_api"], ExecutionType.PARALLEL,
        lib, SignatureClient(alt_chat("[alpha_api(x=1), gamma_api(z=3)]")))
    assert [c.name for c in out.candidates] == []
    assert out.targets == ["alpha_api", "beta_api"]


def test_alternatives_invalid_verdict_changes_nothing():
    lib = multi_library()
    out = validate_invocation_alternatives(
        "q", [ScoredCandidate("gamma_api", 0.4, plausibility=2)],
        ["alpha_api", "beta_api"], ExecutionType.PARALLEL,
        lib, SignatureClient(alt_chat("[alpha_api(x=1)]", valid="NO")))
    assert out.targets == ["alpha_api", "beta_api"]
    assert out.exec_type is ExecutionType.PARALLEL


def test_finalize_reproducible_and_complete():
    rng = random.Random(8)
    order1 = finalize(["d1", "d2"], ["t1"], random.Random(8))
    order2 = finalize(["d1", "d2"], ["t1"], random.Random(8))
    assert order1 == order2
    assert sorted(order1) == ["d1", "d2", "t1"]
    none_case = finalize(["d1", "d2"], [], rng)
    assert sorted(none_case) == ["d1", "d2"]  # NONE: distractors only


def test_finalize_first_position_roughly_uniform():
    hits = Counter()
    for seed in range(3000):
        order = finalize(["d1", "d2"], ["t1"], random.Random(seed))
        hits[order[0]] += 1
    assert abs(hits["t1"] / 3000 - 1 / 3) < 0.05


def test_assemble_requires_twice_the_targets_for_parallel(embedder):
    from divgen.distractors import assemble_candidates

    lib = multi_library()
    rows = [{"api_name": f.name, "score": 5, "reasoning": "all plausible"}
            for f in lib]  # every non-target filtered out
    chat = ScriptedChat().script(scores_reply("ParallelAPIRelevanceScorer", rows),
                                 signature="ParallelAPIRelevanceScorer")
    with pytest.raises(DistractorFailure, match="distractor candidates"):
        assemble_candidates("query words", ["alpha_api", "beta_api"],
                            ExecutionType.PARALLEL, lib, embedder,
                            SignatureClient(chat), random.Random(0))
