"""Dynamical population model with dilution by new investors."""
from __future__ import annotations

from .ensemble import DilutionReport, DynExperiment, dilution_report, dyn_ensemble
from .expectation import (
    LOG_BOUND_LIMIT,
    LimitRatio,
    expected_limit_ratio,
    expected_share_factors,
    limit_classification,
)
from .model import DynSelection, DynState, DynTrajectory, dyn_simulate, dyn_step

__all__ = [
    "DilutionReport",
    "DynExperiment",
    "DynSelection",
    "DynState",
    "DynTrajectory",
    "LOG_BOUND_LIMIT",
    "LimitRatio",
    "dilution_report",
    "dyn_ensemble",
    "dyn_simulate",
    "dyn_step",
    "expected_limit_ratio",
    "expected_share_factors",
    "limit_classification",
]
