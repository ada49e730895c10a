"""
How deep must the judging pool go?
==================================

Pooled judging only assesses documents that some system ranked inside
the top k. Sweeping k shows how fast the pool covers the full label
set, and where a target coverage fraction lands.
"""

from rankfuse import (
    build_pool,
    generate_synthetic,
    make_partial_qrels,
    pick_depth_for_fraction,
    pool_sweep,
    sweep_csv,
)

runs, full = generate_synthetic(
    seed=9, num_queries=30, num_systems=8, docs_per_query=100, relevant_per_query=20
)

# coverage climbs with depth and saturates once pools swallow the runs
rows = pool_sweep(runs, full, range(1, 13))
print(sweep_csv(rows))

# pick the depth whose coverage lands nearest one half of the labels
depth, fraction = pick_depth_for_fraction(runs, full, 0.5)
print(f"target 50% -> depth {depth} covers {fraction:.1%} of the relevant labels")

# a partial qrels keeps only pooled documents; everything else in the
# pool is recorded as judged non-relevant, and nothing new is invented
partial = make_partial_qrels(build_pool(runs, depth), full)
print(f"\npartial set '{partial.name}':")
print(f"  relevant labels {partial.total_relevant()} of {full.total_relevant()}")
for query_id in full.query_ids[:5]:
    kept = partial.relevant_count(query_id)
    print(f"  query {query_id}: {kept:2d} of {full.relevant_count(query_id)} kept")
