"""
Training linear fusion weights
==============================

Reciprocal-rank normalization turns ranks into scores, least squares
fits one weight per system against binary relevance targets, and the
weighted sum produces a fused ranking that beats its inputs.
"""

from rankfuse import (
    assemble_matrix,
    comb_sum,
    evaluate,
    generate_synthetic,
    linear_combine,
    normalize_reciprocal,
    solve_ols,
)

runs, qrels = generate_synthetic(
    seed=13, num_queries=40, num_systems=6, docs_per_query=100, relevant_per_query=20
)

# score(d) = 1 / (60 + rank): high ranks dominate, unranked docs get 0
scored = [normalize_reciprocal(run) for run in runs]

# one training row per (query, retrieved document)
matrix = assemble_matrix(scored, qrels, qrels.query_ids)
print(f"training matrix: {matrix.num_rows} rows x {matrix.num_systems} systems")

weights = solve_ols(matrix)
print(f"intercept {weights.intercept:+.4f}, rss {weights.rss:.2f}, "
      f"condition {weights.condition:.1e}")
# the fit discovers the quality ordering baked into the generator
for tag, value in zip(weights.system_order, weights.weights):
    print(f"  {tag}: {value:+.3f}")

# fuse with the learned weights and with plain score summation
learned = linear_combine(scored, weights)
baseline = comb_sum(scored)
for run in (learned, baseline, runs[0]):
    report = evaluate(run, qrels)
    print(f"{report.run_tag:>8s}: MAP {report.mean('map'):.4f}  "
          f"P@10 {report.mean('p10'):.4f}")
