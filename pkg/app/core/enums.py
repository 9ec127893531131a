"""Enumerations shared across lab subsystems.

They live in the core package so that schedule, moments, limits and lab code
can import them without introducing circular dependencies.
"""
from __future__ import annotations

from enum import Enum


class ScheduleKind(str, Enum):
    """Tags of the deterministic reward rules."""

    CONSTANT = "constant"
    FLOOR_DECAY = "floor_decay"
    FLOOR_POWER = "floor_power"
    POWER_DECAY = "power_decay"
    PROPORTIONAL = "proportional"


class Regime(str, Enum):
    """Asymptotic regimes of a reward schedule."""

    CONSTANT = "constant"
    POSITIVE_FLOOR = "positive_floor"
    FAST_DECAY = "fast_decay"  # R_t ~ t^-a, a > 1/2
    SLOW_DECAY = "slow_decay"  # R_t ~ t^-a, a < 1/2
    SUBLINEAR = "sublinear"  # R_t = rho N^g, g < 1
    GEOMETRIC = "geometric"  # R_t = rho N^g, g > 1
    UNBOUNDED_ANALYSIS = "unbounded-analysis"


class InvestorClass(str, Enum):
    """Initial-stake scaling class relative to a regime threshold."""

    LARGE = "large"
    MEDIUM = "medium"
    SMALL = "small"


class StatementKind(str, Enum):
    """Qualitative limit statements returned when no closed-form law applies."""

    CONCENTRATES = "ratio_concentrates_at_one"
    ANTI_CONCENTRATES = "ratio_anti_concentrates"
    VARIANCE_DIVERGES = "ratio_variance_diverges"


class LawKind(str, Enum):
    """Tags of the limiting laws."""

    DIRICHLET = "dirichlet"
    BETA = "beta"
    GAMMA_RATIO = "gamma_ratio"
    TWO_POINT = "two_point"
    GEM = "gem"
    PITMAN_YOR = "pitman_yor"


class LimitClass(str, Enum):
    """Classification of the expected incumbent share under dilution."""

    POSITIVE = "positive"
    ZERO = "zero"
    UNDETERMINED = "undetermined"


class SelectionKind(str, Enum):
    """Party selected by one step of the dilution model."""

    INCUMBENT = "incumbent"
    ATOM = "atom"
    FRESH = "fresh"


class Estimator(str, Enum):
    """Statistics a figure or experiment can request."""

    P_MAX = "p_max"
    VARIANCE = "variance"
    DEVIATION = "deviation"
    BELOW = "below"
    ABOVE = "above"
    HISTOGRAM = "histogram"
    KS = "ks"
    ABSORPTION = "absorption"
    K_T_GROWTH = "k_t_growth"
    DILUTION = "dilution"


class CheckSuite(str, Enum):
    """Acceptance suites runnable from the CLI."""

    ORACLE = "oracle"
    BOUNDS = "bounds"
    LIMITS = "limits"
    DILUTION = "dilution"
    ALL = "all"
