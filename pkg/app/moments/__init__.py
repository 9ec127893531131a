"""Exact analytic oracle: a_t, raw and central moments, bounds."""
from .bounds import ABounds, a_bounds, concentration_bound, concentration_scaling, squared_reward_sum
from .enumeration import enumerate_paths, enumerated_raw_moments
from .recursions import (
    MAX_ORDER,
    MomentTable,
    a_sequence,
    central_from_raw,
    central_step_residuals,
    constant_reward_variance,
    exact_ratio_variance,
    raw_moment_table,
)

__all__ = [
    "ABounds",
    "MAX_ORDER",
    "MomentTable",
    "a_bounds",
    "a_sequence",
    "central_from_raw",
    "central_step_residuals",
    "concentration_bound",
    "concentration_scaling",
    "constant_reward_variance",
    "enumerate_paths",
    "enumerated_raw_moments",
    "exact_ratio_variance",
    "raw_moment_table",
    "squared_reward_sum",
]
