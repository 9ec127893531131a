"""Experiment runner, figure registry, estimators and acceptance checks."""
from __future__ import annotations

from .checks import SUITES, CheckContext, run_checks, suite_checks
from .estimators import (
    Absorption,
    Estimate,
    Histogram,
    KsResult,
    deviation_path,
    estimate_above,
    estimate_absorption,
    estimate_below,
    estimate_deviation,
    estimate_ks,
    estimate_mean,
    estimate_pmax,
    estimate_variance,
    histogram,
    log_slope,
    ratio_variance_path,
)
from .experiments import ExperimentResult, apply_scale, estimate_fieldnames, limit_table, run_experiment
from .figures import FIGURES, figure_names, resolve_figure, run_figure

__all__ = [
    "Absorption",
    "CheckContext",
    "Estimate",
    "ExperimentResult",
    "FIGURES",
    "Histogram",
    "KsResult",
    "SUITES",
    "apply_scale",
    "deviation_path",
    "estimate_above",
    "estimate_absorption",
    "estimate_below",
    "estimate_deviation",
    "estimate_fieldnames",
    "estimate_ks",
    "estimate_mean",
    "estimate_pmax",
    "estimate_variance",
    "figure_names",
    "histogram",
    "limit_table",
    "log_slope",
    "ratio_variance_path",
    "resolve_figure",
    "run_checks",
    "run_experiment",
    "run_figure",
    "suite_checks",
]
