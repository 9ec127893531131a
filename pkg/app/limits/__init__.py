"""Limit laws, stick breaking and investor classification."""
from __future__ import annotations

from .classifier import (
    InvestorClassification,
    LimitStatement,
    StakeScaling,
    classify_and_limit,
    threshold_exponent,
)
from .laws import (
    GEM,
    BetaMarginal,
    DirichletLaw,
    GammaRatio,
    LimitLaw,
    PitmanYor,
    TwoPointAbsorption,
    dirichlet_density,
    ks_critical_value,
    ks_distance,
    law_from_dict,
    law_to_dict,
    sample_limit,
)
from .sticks import StickBreak, gem_stick_breaking, pitman_yor_weights, stick_breaking

__all__ = [
    "BetaMarginal",
    "DirichletLaw",
    "GEM",
    "GammaRatio",
    "InvestorClassification",
    "LimitLaw",
    "LimitStatement",
    "PitmanYor",
    "StakeScaling",
    "StickBreak",
    "TwoPointAbsorption",
    "classify_and_limit",
    "dirichlet_density",
    "gem_stick_breaking",
    "ks_critical_value",
    "ks_distance",
    "law_from_dict",
    "law_to_dict",
    "pitman_yor_weights",
    "sample_limit",
    "stick_breaking",
    "threshold_exponent",
]
