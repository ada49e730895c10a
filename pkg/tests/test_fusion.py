"""Reciprocal normalization and the four fusion methods."""

from __future__ import annotations

import numpy as np
import pytest

from rankfuse.fusion import (
    ScoredList,
    borda,
    comb_mnz,
    comb_sum,
    linear_combine,
    normalize_reciprocal,
)
from rankfuse.regression import WeightVector
from rankfuse.trec import RunList, write_run


def _run(tag, queries):
    return RunList.from_scores(
        tag,
        {
            q: {doc: float(len(docs) - i) for i, doc in enumerate(docs)}
            for q, docs in queries.items()
        },
    )


def _weights(tags, weights, intercept=0.0):
    return WeightVector(tuple(tags), intercept, np.asarray(weights, dtype=float))


def _random_runs(rng, num_runs=3, num_queries=3, universe=20, max_len=12):
    runs = []
    for r in range(num_runs):
        scores = {}
        for q in range(1, num_queries + 1):
            picks = rng.permutation(universe)[: rng.integers(2, max_len)]
            scores[str(q)] = {f"D{i:02d}": float(rng.integers(1, 1000)) for i in picks}
        runs.append(RunList.from_scores(f"s{r}", scores))
    return runs


def test_normalize_reciprocal_values():
    run = _run("t", {"q": [f"d{i:02d}" for i in range(40)]})
    scored = normalize_reciprocal(run)
    assert scored.score("q", "d00") == pytest.approx(1 / 61)
    assert scored.score("q", "d39") == 0.01  # rank 40 -> 1/100 exactly
    assert scored.score("q", "unranked") == 0.0


def test_normalize_preserves_order():
    rng = np.random.default_rng(4)
    for run in _random_runs(rng):
        scored = normalize_reciprocal(run)
        for query_id in run.query_ids:
            docs = run.docs(query_id)
            values = [scored.score(query_id, d) for d in docs]
            assert values == sorted(values, reverse=True)
            assert all(v > 0 for v in values)


def test_normalize_constant_configurable_and_validated():
    run = _run("t", {"q": ["a"]})
    assert normalize_reciprocal(run, 0.0).score("q", "a") == 1.0
    assert normalize_reciprocal(run, -0.5).score("q", "a") == 2.0
    with pytest.raises(ValueError):
        normalize_reciprocal(run, -1.0)


def test_linear_combine_hand_example():
    # a: (0.5, 0.1), b: (0.2, 0.4), weights (1, 2) -> a=0.7, b=1.0
    s1 = ScoredList("s1", {"q": {"a": 0.5, "b": 0.2}})
    s2 = ScoredList("s2", {"q": {"a": 0.1, "b": 0.4}})
    fused = linear_combine([s1, s2], _weights(["s1", "s2"], [1.0, 2.0]))
    assert fused.docs("q") == ("b", "a")
    scores = {e.doc_id: e.raw_score for e in fused.entries("q")}
    assert scores["a"] == pytest.approx(0.7)
    assert scores["b"] == pytest.approx(1.0)
    assert fused.run_tag == "LC-mlr"


def test_linear_combine_missing_doc_scores_zero():
    s1 = ScoredList("s1", {"q": {"a": 0.5}})
    s2 = ScoredList("s2", {"q": {"b": 0.4}})
    fused = linear_combine([s1, s2], _weights(["s1", "s2"], [1.0, 1.0]))
    assert {e.doc_id: e.raw_score for e in fused.entries("q")} == {"a": 0.5, "b": 0.4}


def test_linear_combine_unit_weights_equals_comb_sum():
    rng = np.random.default_rng(6)
    runs = _random_runs(rng)
    scored = [normalize_reciprocal(r) for r in runs]
    lc = linear_combine(scored, _weights([s.run_tag for s in scored], [1.0] * 3))
    cs = comb_sum(scored)
    for query_id in cs.query_ids:
        assert lc.docs(query_id) == cs.docs(query_id)


def test_linear_combine_intercept_shift_invariance():
    rng = np.random.default_rng(10)
    runs = _random_runs(rng)
    scored = [normalize_reciprocal(r) for r in runs]
    tags = [s.run_tag for s in scored]
    weights = rng.uniform(0.5, 2.0, size=3)
    plain = linear_combine(scored, _weights(tags, weights, intercept=0.0))
    shifted = linear_combine(scored, _weights(tags, weights, intercept=5.0))
    for query_id in plain.query_ids:
        assert plain.docs(query_id) == shifted.docs(query_id)
        for a, b in zip(plain.entries(query_id), shifted.entries(query_id)):
            assert b.raw_score - a.raw_score == pytest.approx(5.0)


def test_linear_combine_positive_scale_invariance():
    rng = np.random.default_rng(14)
    runs = _random_runs(rng)
    scored = [normalize_reciprocal(r) for r in runs]
    tags = [s.run_tag for s in scored]
    weights = rng.uniform(0.5, 2.0, size=3)
    base = linear_combine(scored, _weights(tags, weights, intercept=0.3))
    scaled = linear_combine(scored, _weights(tags, weights * 7.0, intercept=0.3 * 7.0))
    for query_id in base.query_ids:
        assert base.docs(query_id) == scaled.docs(query_id)


def test_linear_combine_dimension_mismatch():
    s1 = ScoredList("s1", {"q": {"a": 0.5}})
    with pytest.raises(ValueError):
        linear_combine([s1], _weights(["s1", "s2"], [1.0, 1.0]))
    with pytest.raises(ValueError):
        linear_combine([s1], _weights(["other"], [1.0]))
    with pytest.raises(ValueError):
        linear_combine([], _weights([], []))


def test_comb_sum_single_system_identity():
    rng = np.random.default_rng(15)
    (run,) = _random_runs(rng, num_runs=1)
    fused = comb_sum([normalize_reciprocal(run)])
    for query_id in run.query_ids:
        assert fused.docs(query_id) == run.docs(query_id)


def test_comb_sum_tie_breaks_by_doc_id():
    # dyadic scores keep the two sums exactly equal in binary arithmetic
    s1 = ScoredList("s1", {"q": {"a": 0.5, "b": 0.25}})
    s2 = ScoredList("s2", {"q": {"a": 0.25, "b": 0.5}})
    fused = comb_sum([s1, s2])
    assert [e.raw_score for e in fused.entries("q")] == [0.75, 0.75]
    assert fused.docs("q") == ("a", "b")
    assert fused.run_tag == "combsum"


def test_comb_mnz_counts_systems():
    # two systems summing 0.3 beat one system with 0.5
    s1 = ScoredList("s1", {"q": {"a": 0.1, "b": 0.5}})
    s2 = ScoredList("s2", {"q": {"a": 0.2}})
    fused = comb_mnz([s1, s2])
    scores = {e.doc_id: e.raw_score for e in fused.entries("q")}
    assert scores["a"] == pytest.approx(0.6)
    assert scores["b"] == pytest.approx(0.5)
    assert fused.docs("q") == ("a", "b")
    assert fused.run_tag == "combmnz"


def test_comb_mnz_single_system_identity():
    rng = np.random.default_rng(16)
    (run,) = _random_runs(rng, num_runs=1)
    fused = comb_mnz([normalize_reciprocal(run)])
    for query_id in run.query_ids:
        assert fused.docs(query_id) == run.docs(query_id)


def test_comb_mnz_equals_comb_sum_when_all_rank_all():
    rng = np.random.default_rng(18)
    docs = [f"D{i:02d}" for i in range(10)]
    scored = [
        ScoredList(f"s{r}", {"q": {d: float(v) for d, v in zip(docs, rng.permutation(10) + 1)}})
        for r in range(3)
    ]
    mnz = comb_mnz(scored)
    cs = comb_sum(scored)
    assert mnz.docs("q") == cs.docs("q")


def test_borda_single_run_points():
    fused = borda([_run("r", {"q": ["a", "b", "c"]})])
    assert {e.doc_id: e.raw_score for e in fused.entries("q")} == {
        "a": 3.0,
        "b": 2.0,
        "c": 1.0,
    }
    assert fused.run_tag == "borda"


def test_borda_symmetric_tie():
    fused = borda([_run("r1", {"q": ["a", "b"]}), _run("r2", {"q": ["b", "a"]})])
    assert [e.raw_score for e in fused.entries("q")] == [3.0, 3.0]
    assert fused.docs("q") == ("a", "b")


def test_borda_uneven_lists():
    # C={a,b,c}: a=3+2=5, b=2+0=2, c=1+3=4
    fused = borda([_run("r1", {"q": ["a", "b", "c"]}), _run("r2", {"q": ["c", "a"]})])
    scores = {e.doc_id: e.raw_score for e in fused.entries("q")}
    assert scores == {"a": 5.0, "b": 2.0, "c": 4.0}
    assert fused.docs("q") == ("a", "c", "b")


def test_empty_inputs_raise():
    for method in (comb_sum, comb_mnz):
        with pytest.raises(ValueError):
            method([])
    with pytest.raises(ValueError):
        borda([])


def test_permutation_invariance_of_unweighted_methods():
    rng = np.random.default_rng(19)
    runs = _random_runs(rng)
    scored = [normalize_reciprocal(r) for r in runs]
    for method, inputs in ((comb_sum, scored), (comb_mnz, scored), (borda, runs)):
        forward = method(list(inputs))
        backward = method(list(reversed(inputs)))
        assert write_run(forward) == write_run(backward)


def test_depth_truncation():
    docs = [f"d{i:02d}" for i in range(30)]
    fused = comb_sum([normalize_reciprocal(_run("r", {"q": docs}))], depth=5)
    assert len(fused.entries("q")) == 5


def test_queries_restriction():
    runs = _random_runs(np.random.default_rng(20), num_queries=4)
    scored = [normalize_reciprocal(r) for r in runs]
    fused = comb_sum(scored, queries=["1", "3"])
    assert fused.query_ids == ["1", "3"]


def test_fusion_determinism_bytes():
    rng = np.random.default_rng(23)
    runs = _random_runs(rng)
    scored = [normalize_reciprocal(r) for r in runs]
    tags = [s.run_tag for s in scored]
    w = _weights(tags, [0.7, 0.2, 0.1], intercept=0.05)
    for method, args in (
        (linear_combine, (scored, w)),
        (comb_sum, (scored,)),
        (comb_mnz, (scored,)),
        (borda, (runs,)),
    ):
        assert write_run(method(*args)) == write_run(method(*args))
