"""Closed-form concentration and complexity calculators."""

from .concentration import (
    TailCurve,
    depth_threshold,
    effective_sample_size,
    expected_leaf_samples,
    hoeffding,
    leaf_sample_hoeffding_tail,
    leaf_sample_tail,
    mean_interval,
    proportion_interval,
    sbb1_depth_curve,
    sbb1_depth_tail,
    sbb1_tail_refined_exponent,
    sbb2_depth_curve,
    sbb2_depth_tail,
    sbb2_tail_exponent,
    tail_error,
    undiscounted_tail_error,
    weighted_hoeffding,
)

__all__ = [
    "TailCurve",
    "depth_threshold",
    "effective_sample_size",
    "expected_leaf_samples",
    "hoeffding",
    "leaf_sample_hoeffding_tail",
    "leaf_sample_tail",
    "mean_interval",
    "proportion_interval",
    "sbb1_depth_curve",
    "sbb1_depth_tail",
    "sbb1_tail_refined_exponent",
    "sbb2_depth_curve",
    "sbb2_depth_tail",
    "sbb2_tail_exponent",
    "tail_error",
    "undiscounted_tail_error",
    "weighted_hoeffding",
]
