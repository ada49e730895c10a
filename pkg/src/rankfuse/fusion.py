"""Rank-to-score normalization and run fusion.

Ranked lists are first normalized with the reciprocal model
score(d) = 1/(constant + rank(d)), then combined per query over the
union of retrieved documents. Fusion methods: weighted linear
combination, CombSum, CombMNZ, and Borda count. Every fused run is
sorted score-descending with doc_id-ascending tie-break, densely
ranked, and truncated to the output depth, so identical inputs yield
byte-identical output.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .trec import RunList, sort_query_ids

if TYPE_CHECKING:  # import cycle: regression trains on ScoredList
    from .regression import WeightVector

DEFAULT_RECIPROCAL_CONSTANT = 60.0
DEFAULT_OUTPUT_DEPTH = 1000

# A fused run is an ordinary RunList whose tag names the method.
FusedRun = RunList


@dataclass(frozen=True)
class ScoredList:
    """Per-query doc_id -> normalized score map for one system."""

    run_tag: str
    scores: dict[str, dict[str, float]]

    @property
    def query_ids(self) -> list[str]:
        return sort_query_ids(self.scores)

    def score(self, query_id: str, doc_id: str) -> float:
        """Normalized score, 0.0 for docs this system did not retrieve."""
        return self.scores.get(query_id, {}).get(doc_id, 0.0)


def normalize_reciprocal(
    run: RunList, constant: float = DEFAULT_RECIPROCAL_CONSTANT
) -> ScoredList:
    """Convert canonical ranks to scores 1/(constant + rank).

    constant must exceed -1 so every rank >= 1 maps to a finite positive
    score; the mapping is strictly decreasing in rank, so ranking order
    is preserved.
    """
    if constant <= -1:
        raise ValueError(f"reciprocal constant must be > -1, got {constant}")
    scores = {
        query_id: {e.doc_id: 1.0 / (constant + e.rank) for e in run.entries(query_id)}
        for query_id in run.query_ids
    }
    return ScoredList(run.run_tag, scores)


def _select_queries(
    per_system: Sequence[Mapping[str, Mapping[str, float]]],
    queries: Iterable[str] | None,
) -> list[str]:
    if queries is not None:
        return sort_query_ids(queries)
    seen: set[str] = set()
    for scores in per_system:
        seen.update(scores)
    return sort_query_ids(seen)


def _fuse_by_doc(
    scored: Sequence[ScoredList],
    queries: Iterable[str] | None,
    combine,
) -> dict[str, dict[str, float]]:
    """Apply ``combine(per-system scores for one doc)`` over each query's union."""
    fused: dict[str, dict[str, float]] = {}
    for query_id in _select_queries([s.scores for s in scored], queries):
        union: set[str] = set()
        for system in scored:
            union.update(system.scores.get(query_id, {}))
        if not union:
            continue
        fused[query_id] = {
            doc_id: combine([system.scores.get(query_id, {}).get(doc_id) for system in scored])
            for doc_id in sorted(union)
        }
    return fused


def linear_combine(
    scored: Sequence[ScoredList],
    w: WeightVector,
    depth: int = DEFAULT_OUTPUT_DEPTH,
    run_tag: str = "LC-mlr",
    queries: Iterable[str] | None = None,
) -> FusedRun:
    """Fuse by fused(d) = intercept + sum_j w_j * score_j(d), missing = 0.

    The scored lists must line up one-to-one with w.system_order. The
    intercept shifts all fused scores equally, so it never alters the
    ranking; it is kept so fused scores match the trained model's
    predictions.
    """
    if not scored:
        raise ValueError("need at least one scored run")
    tags = tuple(system.run_tag for system in scored)
    if tags != w.system_order or len(w.weights) != len(scored):
        raise ValueError(
            f"scored runs {tags} do not match weight vector systems {w.system_order}"
        )
    weights = [float(x) for x in w.weights]

    def combine(values: list[float | None]) -> float:
        return w.intercept + sum(
            weight * value for weight, value in zip(weights, values) if value is not None
        )

    return RunList.from_scores(run_tag, _fuse_by_doc(scored, queries, combine), depth=depth)


def comb_sum(
    scored: Sequence[ScoredList],
    depth: int = DEFAULT_OUTPUT_DEPTH,
    run_tag: str = "combsum",
    queries: Iterable[str] | None = None,
) -> FusedRun:
    """Fuse by fused(d) = sum_j score_j(d), missing = 0."""
    if not scored:
        raise ValueError("need at least one scored run")

    def combine(values: list[float | None]) -> float:
        return sum(value for value in values if value is not None)

    return RunList.from_scores(run_tag, _fuse_by_doc(scored, queries, combine), depth=depth)


def comb_mnz(
    scored: Sequence[ScoredList],
    depth: int = DEFAULT_OUTPUT_DEPTH,
    run_tag: str = "combmnz",
    queries: Iterable[str] | None = None,
) -> FusedRun:
    """Fuse by fused(d) = (systems ranking d) * sum_j score_j(d)."""
    if not scored:
        raise ValueError("need at least one scored run")

    def combine(values: list[float | None]) -> float:
        present = [value for value in values if value is not None]
        return len(present) * sum(present)

    return RunList.from_scores(run_tag, _fuse_by_doc(scored, queries, combine), depth=depth)


def borda(
    runs: Sequence[RunList],
    depth: int = DEFAULT_OUTPUT_DEPTH,
    run_tag: str = "borda",
    queries: Iterable[str] | None = None,
) -> FusedRun:
    """Fuse by Borda count over each query's candidate union C.

    A system ranking d at rank r awards |C| - r + 1 points; a system
    that did not rank d awards 0. Unranked candidates share no residual
    points under this variant.
    """
    if not runs:
        raise ValueError("need at least one run")
    rank_maps = [
        {
            query_id: {e.doc_id: e.rank for e in run.entries(query_id)}
            for query_id in run.query_ids
        }
        for run in runs
    ]
    fused: dict[str, dict[str, float]] = {}
    for query_id in _select_queries(rank_maps, queries):
        union: set[str] = set()
        for ranks in rank_maps:
            union.update(ranks.get(query_id, {}))
        if not union:
            continue
        size = len(union)
        fused[query_id] = {
            doc_id: float(
                sum(
                    size - ranks[query_id][doc_id] + 1
                    for ranks in rank_maps
                    if doc_id in ranks.get(query_id, {})
                )
            )
            for doc_id in sorted(union)
        }
    return RunList.from_scores(run_tag, fused, depth=depth)
