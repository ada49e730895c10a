"""Fixed-depth pooling and pool-derived partial qrels.

A depth-k pool is, per query, the union of the top-k documents from
every run. Restricting a full qrels to the pool yields a partial qrels:
pooled documents keep their official grade (0 when unjudged), and
everything outside the pool is simply absent, i.e. non-relevant.
"""

from __future__ import annotations

import warnings
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .trec import Qrels, RunList, sort_query_ids


@dataclass(frozen=True)
class Pool:
    """Per-query sets of pooled doc ids at one depth."""

    depth: int
    docs: dict[str, frozenset[str]]

    @property
    def query_ids(self) -> list[str]:
        return sort_query_ids(self.docs)

    def for_query(self, query_id: str) -> frozenset[str]:
        return self.docs.get(query_id, frozenset())


@dataclass(frozen=True)
class SweepRow:
    """Relevant-document coverage of the depth-``depth`` partial qrels."""

    depth: int
    relevant_count: int
    percent: float


def build_pool(runs: Sequence[RunList], depth: int) -> Pool:
    """Union of each run's top-``depth`` docs, per query.

    A run shorter than ``depth`` contributes all of its docs. Membership
    depends only on the union of prefixes, never on which run
    contributed a document.
    """
    if depth < 1:
        raise ValueError("pool depth must be >= 1")
    if not runs:
        raise ValueError("need at least one run to build a pool")
    docs: dict[str, set[str]] = {}
    for run in runs:
        for query_id in run.by_query:
            pooled = docs.setdefault(query_id, set())
            for entry in run.entries(query_id)[:depth]:
                pooled.add(entry.doc_id)
    return Pool(depth, {q: frozenset(s) for q, s in docs.items()})


def make_partial_qrels(pool: Pool, full: Qrels, name: str = "") -> Qrels:
    """Restrict ``full`` to the pooled documents.

    The result contains exactly the pooled (query, doc) pairs; pairs
    missing from ``full`` get grade 0. Queries pooled but entirely
    absent from ``full`` are kept (all grade 0) and reported once via a
    warning.
    """
    grades: dict[str, dict[str, int]] = {}
    unjudged_queries: list[str] = []
    for query_id in pool.query_ids:
        if query_id not in full.grades:
            unjudged_queries.append(query_id)
        grades[query_id] = {
            doc_id: full.grade(query_id, doc_id) for doc_id in sorted(pool.for_query(query_id))
        }
    if unjudged_queries:
        warnings.warn(
            f"{len(unjudged_queries)} pooled queries have no judgments "
            f"(e.g. {unjudged_queries[0]}); their pooled docs get grade 0",
            stacklevel=2,
        )
    return Qrels(grades, name=name or f"depth{pool.depth}")


def _coverage_counts(runs: Sequence[RunList], full: Qrels, max_depth: int) -> list[int]:
    """Relevant docs covered by the depth-d pool, for d = 1..max_depth."""
    pooled: dict[str, set[str]] = {}
    counts: list[int] = []
    covered = 0
    for depth in range(1, max_depth + 1):
        for run in runs:
            for query_id in run.by_query:
                entries = run.entries(query_id)
                if depth > len(entries):
                    continue
                doc_id = entries[depth - 1].doc_id
                seen = pooled.setdefault(query_id, set())
                if doc_id in seen:
                    continue
                seen.add(doc_id)
                if full.grade(query_id, doc_id) > 0:
                    covered += 1
        counts.append(covered)
    return counts


def pool_sweep(runs: Sequence[RunList], full: Qrels, depths: Iterable[int]) -> list[SweepRow]:
    """Coverage table over pool depths: how many of the full qrels'
    relevant docs the depth-d partial qrels retains, and the percentage.

    Both columns are non-decreasing in depth and saturate once the pool
    holds every retrieved relevant document.
    """
    wanted = sorted(set(depths))
    if not wanted:
        raise ValueError("depths must be non-empty")
    if wanted[0] < 1:
        raise ValueError("pool depths must be >= 1")
    counts = _coverage_counts(runs, full, wanted[-1])
    total = full.total_relevant()
    rows = []
    for depth in wanted:
        count = counts[depth - 1]
        percent = 100.0 * count / total if total else 0.0
        rows.append(SweepRow(depth, count, percent))
    return rows


def pick_depth_for_fraction(
    runs: Sequence[RunList], full: Qrels, target_fraction: float
) -> tuple[int, float]:
    """Smallest pool depth whose relevant-doc fraction is closest to target.

    Scans depths 1..max list length; ties go to the smaller depth.
    Returns (depth, achieved_fraction).
    """
    if not 0.0 < target_fraction <= 1.0:
        raise ValueError("target_fraction must be in (0, 1]")
    max_depth = max(
        (len(entries) for run in runs for entries in run.by_query.values()), default=0
    )
    if max_depth == 0:
        raise ValueError("runs contain no ranked documents")
    counts = _coverage_counts(runs, full, max_depth)
    total = full.total_relevant()
    best_depth, best_fraction = 1, 0.0
    best_gap = float("inf")
    for depth, count in enumerate(counts, start=1):
        fraction = count / total if total else 0.0
        gap = abs(fraction - target_fraction)
        if gap < best_gap:
            best_depth, best_fraction, best_gap = depth, fraction, gap
    return best_depth, best_fraction


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    """Plot-ready CSV for a coverage sweep."""
    out = ["depth,relevant_count,percent\n"]
    for row in rows:
        out.append(f"{row.depth},{row.relevant_count},{row.percent:.2f}\n")
    return "".join(out)
