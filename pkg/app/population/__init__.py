"""Infinite-population models: feature model, discrete infinite urn, species rules."""
from __future__ import annotations

from .discrete import (
    DiscreteWeights,
    FiniteWeights,
    GeometricWeights,
    InfinitePopulation,
    WeightRule,
    ZetaWeights,
    simulate_discrete_infinite,
)
from .feature_model import (
    FEATURE_BATCH_SIZE,
    FeatureEnsemble,
    FeatureRun,
    bm_predictive_step,
    expected_feature_count,
    feature_ensemble,
    log_snapshot_times,
    simulate_feature_model,
)
from .ledger import Appearance, AtomLedger, BaseMeasure, DiffuseBase, DiscreteBase, relabel_by_appearance
from .species import (
    RuleCheck,
    dirichlet_rule,
    exchangeability_defect,
    pattern_probability,
    pitman_yor_rule,
    species_rule_check,
)

__all__ = [
    "Appearance",
    "AtomLedger",
    "BaseMeasure",
    "DiffuseBase",
    "DiscreteBase",
    "DiscreteWeights",
    "FEATURE_BATCH_SIZE",
    "FeatureEnsemble",
    "FeatureRun",
    "FiniteWeights",
    "GeometricWeights",
    "InfinitePopulation",
    "RuleCheck",
    "WeightRule",
    "ZetaWeights",
    "bm_predictive_step",
    "dirichlet_rule",
    "exchangeability_defect",
    "expected_feature_count",
    "feature_ensemble",
    "log_snapshot_times",
    "pattern_probability",
    "pitman_yor_rule",
    "relabel_by_appearance",
    "simulate_discrete_infinite",
    "species_rule_check",
]
