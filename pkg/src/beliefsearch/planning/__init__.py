"""Belief trees, value bounds and the planners that search them."""

from .bounds import (
    BoundEstimate,
    draw_bound_pair,
    estimate_bounds,
    exact_bounds,
    pinned_policy,
    sample_lower,
    sample_upper,
)
from .models import Algorithm, AuditRecord, PlanningProblem, RunReport, SearchConfig
from .search import (
    PLANNERS,
    flat_oracle_search,
    flat_stochastic_search,
    oracle_depth,
    required_flat_evaluations,
    run_search,
    sbb1_search,
    sbb2_search,
    stochastic_depth,
    stochastic_samples,
)
from .tree import (
    Branch,
    LeafValueSource,
    Tree,
    TreeNode,
    backup,
    backup_values,
    build_full_tree,
    exhaustive_bamdp_value,
    format_tree_dump,
)

__all__ = [
    "PLANNERS",
    "Algorithm",
    "AuditRecord",
    "BoundEstimate",
    "Branch",
    "LeafValueSource",
    "PlanningProblem",
    "RunReport",
    "SearchConfig",
    "Tree",
    "TreeNode",
    "backup",
    "backup_values",
    "build_full_tree",
    "draw_bound_pair",
    "estimate_bounds",
    "exact_bounds",
    "exhaustive_bamdp_value",
    "flat_oracle_search",
    "flat_stochastic_search",
    "format_tree_dump",
    "oracle_depth",
    "pinned_policy",
    "required_flat_evaluations",
    "run_search",
    "sample_lower",
    "sample_upper",
    "sbb1_search",
    "sbb2_search",
    "stochastic_depth",
    "stochastic_samples",
]
