"""rankfuse: pooled relevance judgments, least-squares fusion weights,
TREC run fusion, and IR evaluation."""

from .evaluation import (
    METRICS,
    EvalReport,
    QueryEval,
    SensitivityRow,
    average_precision,
    evaluate,
    format_variance,
    percent_variance,
    precision_at,
    r_precision,
    report_csv,
    sensitivity_csv,
    sensitivity_table,
)
from .fusion import (
    DEFAULT_OUTPUT_DEPTH,
    DEFAULT_RECIPROCAL_CONSTANT,
    FusedRun,
    ScoredList,
    borda,
    comb_mnz,
    comb_sum,
    linear_combine,
    normalize_reciprocal,
)
from .harness import (
    ALL_METHODS,
    FUSION_METHODS,
    FoldSplit,
    FusionCurveRow,
    GroupReport,
    QueryGroup,
    XvalResult,
    compare_methods,
    cross_validated_fusion,
    curve_csv,
    generate_synthetic,
    group_by_relcount,
    group_csv,
    grouped_eval,
    incremental_fusion_curve,
    split_odd_even,
)
from .pooling import (
    Pool,
    SweepRow,
    build_pool,
    make_partial_qrels,
    pick_depth_for_fraction,
    pool_sweep,
    sweep_csv,
)
from .regression import (
    RIDGE_FALLBACK,
    ScoreMatrix,
    WeightVector,
    assemble_matrix,
    objective_g,
    solve_ols,
    weights_from_csv,
    weights_to_csv,
)
from .trec import (
    DuplicateDocError,
    GradeConflictError,
    MixedRunTagsError,
    ParseError,
    Qrels,
    RunEntry,
    RunList,
    TrecFormatError,
    load_qrels,
    load_run,
    parse_qrels,
    parse_run,
    save_qrels,
    save_run,
    sort_query_ids,
    write_qrels,
    write_run,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_METHODS",
    "DEFAULT_OUTPUT_DEPTH",
    "DEFAULT_RECIPROCAL_CONSTANT",
    "DuplicateDocError",
    "EvalReport",
    "FUSION_METHODS",
    "FoldSplit",
    "FusedRun",
    "FusionCurveRow",
    "GradeConflictError",
    "GroupReport",
    "METRICS",
    "MixedRunTagsError",
    "ParseError",
    "Pool",
    "Qrels",
    "QueryEval",
    "QueryGroup",
    "RIDGE_FALLBACK",
    "RunEntry",
    "RunList",
    "ScoreMatrix",
    "ScoredList",
    "SensitivityRow",
    "SweepRow",
    "TrecFormatError",
    "WeightVector",
    "XvalResult",
    "assemble_matrix",
    "average_precision",
    "borda",
    "build_pool",
    "comb_mnz",
    "comb_sum",
    "compare_methods",
    "cross_validated_fusion",
    "curve_csv",
    "evaluate",
    "format_variance",
    "generate_synthetic",
    "group_by_relcount",
    "group_csv",
    "grouped_eval",
    "incremental_fusion_curve",
    "linear_combine",
    "load_qrels",
    "load_run",
    "make_partial_qrels",
    "normalize_reciprocal",
    "objective_g",
    "parse_qrels",
    "parse_run",
    "percent_variance",
    "pick_depth_for_fraction",
    "pool_sweep",
    "precision_at",
    "r_precision",
    "report_csv",
    "save_qrels",
    "save_run",
    "sensitivity_csv",
    "sensitivity_table",
    "solve_ols",
    "sort_query_ids",
    "split_odd_even",
    "sweep_csv",
    "weights_from_csv",
    "weights_to_csv",
    "write_qrels",
    "write_run",
]
