"""Configuration loading and validation package."""

from .loader import (
    figure_config,
    load_experiment_config,
    load_figure_catalog,
    load_lab_settings,
    load_moments_config,
)
from .models import (
    ConstantStake,
    ExperimentConfig,
    FigureCatalog,
    FractionStake,
    HistogramConfig,
    LabSettings,
    MomentsConfig,
    PowerStake,
    ScheduleConfig,
    StakeRule,
    config_hash,
    stake_label,
    stake_value,
)

__all__ = [
    "ConstantStake",
    "ExperimentConfig",
    "FigureCatalog",
    "FractionStake",
    "HistogramConfig",
    "LabSettings",
    "MomentsConfig",
    "PowerStake",
    "ScheduleConfig",
    "StakeRule",
    "config_hash",
    "figure_config",
    "load_experiment_config",
    "load_figure_catalog",
    "load_lab_settings",
    "load_moments_config",
    "stake_label",
    "stake_value",
]
