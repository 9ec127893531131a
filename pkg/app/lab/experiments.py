"""Experiment runner: one ensemble per (N, stake rule) row of a config.

Each row runs with seed ``replicate_seed(master_seed, row_index)``. The finite
urn is used unless the config sets a dilution weight ``theta`` (dynamical
population) or requests ``k_t_growth`` (feature model). Estimates, optional
per-snapshot paths and histograms are returned as rows and, when a
:class:`ResultStorage` is given, written as CSV next to a run manifest.
"""
from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from app.config.models import ConstantStake, ExperimentConfig, FractionStake, PowerStake, config_hash, stake_label, stake_value
from app.core.enums import Estimator, StatementKind
from app.core.errors import DomainError, UnclassifiedRegime
from app.core.seeding import replicate_seed
from app.dilution import DynExperiment, dilution_report, dyn_ensemble, expected_limit_ratio
from app.limits import BetaMarginal, GammaRatio, LimitStatement, classify_and_limit, law_to_dict
from app.limits.classifier import InvestorClassification
from app.limits.laws import LimitLaw
from app.moments import a_sequence, exact_ratio_variance
from app.population import DiffuseBase, expected_feature_count, feature_ensemble
from app.schedule import Constant, RewardSchedule, classify_regime, first_reward
from app.telemetry.events import RunManifest
from app.telemetry.storage import ResultStorage
from app.urn import DEFAULT_BATCH_SIZE, UrnExperiment, ensemble
from app.urn.models import EnsembleSummary

from .estimators import (
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
    ratio_variance_path,
)

LOGGER = logging.getLogger("stake_lab.lab")

AnyStake = Union[PowerStake, FractionStake, ConstantStake]
Outcome = Union[LimitLaw, LimitStatement, None]

ABOVE_LEVEL = 2.0

BASE_FIELDS = ["N", "stake", "n0", "pi0", "replicates", "horizon_reached", "truncated", "regime", "class", "limit"]
ESTIMATOR_FIELDS: Dict[Estimator, List[str]] = {
    Estimator.P_MAX: ["p_max", "p_max_se", "bound", "bound_scaling"],
    Estimator.VARIANCE: ["variance", "variance_se", "exact_variance"],
    Estimator.DEVIATION: ["deviation", "deviation_se"],
    Estimator.BELOW: ["below", "below_se"],
    Estimator.ABOVE: ["above", "above_se", "above_law"],
    Estimator.HISTOGRAM: [],
    Estimator.KS: ["ks", "ks_critical", "ks_law"],
    Estimator.ABSORPTION: ["mass_low", "mass_low_se", "mass_high", "mass_high_se", "mass_middle", "expected_high"],
    Estimator.K_T_GROWTH: [
        "k_mean",
        "k_mean_se",
        "k_expected",
        "k_over_log",
        "first_weight",
        "first_weight_se",
        "first_weight_expected",
    ],
    Estimator.DILUTION: [
        "mean_ratio",
        "mean_ratio_se",
        "expected_ratio",
        "newcomer_mean",
        "newcomer_expected",
        "limit_ratio",
        "limit_lower_bound",
        "limit_class",
        "max_excess_se",
    ],
}
PATH_FIELDS = ["N", "stake", "t", "variance", "exact_variance", "deviation"]
HISTOGRAM_FIELDS = ["N", "stake", "bin_lower", "bin_upper", "mass", "density", "law_density"]
LIMIT_FIELDS = ["N", "stake", "n0", "regime", "class", "threshold_exponent", "threshold", "limit", "detail", "bound", "bound_scaling"]


@dataclass(slots=True)
class ExperimentResult:
    name: str
    config: ExperimentConfig
    master_seed: int
    fieldnames: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    path_rows: List[Dict[str, Any]] = field(default_factory=list)
    histogram_rows: List[Dict[str, Any]] = field(default_factory=list)
    outputs: List[str] = field(default_factory=list)
    manifest: Optional[RunManifest] = None

    def row(self, N: float, stake: Optional[str] = None) -> Dict[str, Any]:
        for row in self.rows:
            if row["N"] == N and (stake is None or row["stake"] == stake):
                return row
        raise KeyError(f"no row for N={N!r} stake={stake!r}")

    def column(self, name: str) -> List[Any]:
        return [row[name] for row in self.rows]


def estimate_fieldnames(config: ExperimentConfig) -> List[str]:
    fields = list(BASE_FIELDS)
    for estimator in Estimator:
        if estimator in config.estimators:
            fields += ESTIMATOR_FIELDS[estimator]
    return fields


def _describe(outcome: Outcome) -> str:
    if outcome is None:
        return ""
    if isinstance(outcome, LimitStatement):
        return outcome.kind.value
    return json.dumps(law_to_dict(outcome), sort_keys=True, separators=(",", ":"))


def _classify(
    s: RewardSchedule, N: float, rule: AnyStake, eps: float
) -> Tuple[Optional[InvestorClassification], Outcome]:
    try:
        return classify_and_limit(s, N, rule.scaling(), eps=eps)
    except UnclassifiedRegime:
        return None, None


def _dilution_law(s: RewardSchedule, N: float, n0: float, theta: float) -> Optional[BetaMarginal]:
    """Beta(n0/R, (N + theta - n0)/R) limit of an incumbent share under constant reward."""

    if not isinstance(s, Constant) or theta <= 0:
        return None
    R = first_reward(s, N)
    return BetaMarginal(a=n0 / R, b=(N + theta - n0) / R)


# ----------------------------------------------------------------------
# Per-row estimators
# ----------------------------------------------------------------------
def _pmax_columns(summary: EnsembleSummary, eps: float, outcome: Outcome) -> Dict[str, Any]:
    estimate = estimate_pmax(summary, eps)
    row: Dict[str, Any] = {"p_max": estimate.value, "p_max_se": estimate.se, "bound": None, "bound_scaling": None}
    if isinstance(outcome, LimitStatement) and outcome.kind is StatementKind.CONCENTRATES:
        row["bound"] = outcome.bound
        row["bound_scaling"] = outcome.scaling
    return row


def _ks_target(summary: EnsembleSummary, law: Outcome) -> Optional[np.ndarray]:
    if isinstance(law, GammaRatio):
        return summary.terminal_ratio()
    if isinstance(law, BetaMarginal):
        return summary.terminal_share()
    return None


def _summary_columns(
    config: ExperimentConfig,
    summary: EnsembleSummary,
    s: RewardSchedule,
    N: float,
    n0: float,
    outcome: Outcome,
) -> Dict[str, Any]:
    wanted = set(config.estimators)
    ratios = summary.terminal_ratio()
    row: Dict[str, Any] = {}
    if Estimator.P_MAX in wanted:
        row.update(_pmax_columns(summary, config.eps, outcome))
    if Estimator.VARIANCE in wanted:
        variance = estimate_variance(ratios)
        exact = None
        if config.theta is None:
            exact = exact_ratio_variance(s, N, n0, int(summary.times[-1])) if summary.times[-1] > 0 else 0.0
        row.update(variance=variance.value, variance_se=variance.se, exact_variance=exact)
    if Estimator.DEVIATION in wanted:
        deviation = estimate_deviation(ratios, config.eps)
        row.update(deviation=deviation.value, deviation_se=deviation.se)
    if Estimator.BELOW in wanted:
        below = estimate_below(ratios, config.eps)
        row.update(below=below.value, below_se=below.se)
    if Estimator.ABOVE in wanted:
        above = estimate_above(ratios, ABOVE_LEVEL)
        law_value = outcome.sf(ABOVE_LEVEL) if isinstance(outcome, GammaRatio) else None
        row.update(above=above.value, above_se=above.se, above_law=law_value)
    if Estimator.KS in wanted:
        target = _ks_target(summary, outcome)
        if target is None:
            row.update(ks=None, ks_critical=None, ks_law="")
        else:
            assert isinstance(outcome, (GammaRatio, BetaMarginal))
            result = estimate_ks(target, outcome.cdf)
            row.update(ks=result.distance, ks_critical=result.critical, ks_law=_describe(outcome))
    if Estimator.ABSORPTION in wanted:
        absorption = estimate_absorption(summary.terminal_share())
        row.update(
            mass_low=absorption.low.value,
            mass_low_se=absorption.low.se,
            mass_high=absorption.high.value,
            mass_high_se=absorption.high.se,
            mass_middle=absorption.middle.value,
            expected_high=n0 / N,
        )
    return row


def _dilution_columns(summary: EnsembleSummary, experiment: DynExperiment) -> Dict[str, Any]:
    report = dilution_report(summary, experiment)
    ratio = estimate_mean(summary.terminal_ratio())
    factor = float(report.predicted[-1, 0] / summary.initial_shares[0])
    limit = expected_limit_ratio(experiment.schedule, experiment.supply, experiment.theta, int(summary.times[-1]) or 1)
    return {
        "mean_ratio": ratio.value,
        "mean_ratio_se": ratio.se,
        "expected_ratio": factor,
        "newcomer_mean": float(report.newcomer_mean[-1]),
        "newcomer_expected": 1.0 - factor,
        "limit_ratio": limit.value,
        "limit_lower_bound": limit.lower_bound,
        "limit_class": limit.classification.value,
        "max_excess_se": report.max_excess_in_se(),
    }


def _feature_columns(config: ExperimentConfig, s: RewardSchedule, N: float, seed: int, threads: int) -> Dict[str, Any]:
    R = first_reward(s, N)
    features = feature_ensemble(DiffuseBase(mass=N), s, config.horizon, config.replicates, seed, threads=threads)
    counts = estimate_mean(features.feature_counts.astype(np.float64))
    weights = estimate_mean(features.first_weights)
    return {
        "k_mean": counts.value,
        "k_mean_se": counts.se,
        "k_expected": expected_feature_count(N / R, features.horizon),
        "k_over_log": features.mean_k_over_log(),
        "first_weight": weights.value,
        "first_weight_se": weights.se,
        "first_weight_expected": R / (N + R),
    }


def _path_rows(
    config: ExperimentConfig, summary: EnsembleSummary, s: RewardSchedule, N: float, n0: float, label: str
) -> List[Dict[str, Any]]:
    variance = ratio_variance_path(summary)
    deviation = deviation_path(summary, config.eps)
    exact: Optional[np.ndarray] = None
    horizon = int(summary.times[-1])
    if config.theta is None and horizon > 0:
        pi0 = n0 / N
        a = np.concatenate(([0.0], a_sequence(s, N, horizon)))
        exact = a * (1.0 - pi0) / pi0
    rows = []
    for i, t in enumerate(summary.times):
        rows.append(
            {
                "N": N,
                "stake": label,
                "t": int(t),
                "variance": float(variance[i]),
                "exact_variance": float(exact[t]) if exact is not None else None,
                "deviation": float(deviation[i]),
            }
        )
    return rows


def _histogram_rows(
    config: ExperimentConfig, summary: EnsembleSummary, outcome: Outcome, N: float, label: str
) -> List[Dict[str, Any]]:
    spec = config.histogram
    values = summary.terminal_share() if spec.variable == "share" else summary.terminal_ratio()
    hist = histogram(values, spec)
    overlay = None
    if spec.variable == "ratio" and isinstance(outcome, GammaRatio):
        overlay = outcome
    elif spec.variable == "share" and isinstance(outcome, BetaMarginal):
        overlay = outcome
    midpoints = 0.5 * (hist.edges[:-1] + hist.edges[1:])
    law_density = overlay.pdf(midpoints) if overlay is not None else None
    density = hist.density()
    return [
        {
            "N": N,
            "stake": label,
            "bin_lower": float(hist.edges[i]),
            "bin_upper": float(hist.edges[i + 1]),
            "mass": float(hist.mass[i]),
            "density": float(density[i]),
            "law_density": float(law_density[i]) if law_density is not None else None,
        }
        for i in range(hist.mass.size)
    ]


# ----------------------------------------------------------------------
# Runner
# ----------------------------------------------------------------------
def run_experiment(
    config: ExperimentConfig,
    *,
    master_seed: Optional[int] = None,
    threads: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
    storage: Optional[ResultStorage] = None,
) -> ExperimentResult:
    """Run every (N, stake) row of ``config`` and optionally persist the results."""

    started = time.perf_counter()
    seed = config.master_seed if master_seed is None else int(master_seed)
    if seed != config.master_seed:
        config = config.model_copy(update={"master_seed": seed})
    s = config.reward_schedule()
    wanted = set(config.estimators)
    needs_ensemble = bool(wanted - {Estimator.K_T_GROWTH})
    result = ExperimentResult(name=config.output or config.name, config=config, master_seed=seed, fieldnames=estimate_fieldnames(config))

    row_index = 0
    for N in config.n_grid:
        for rule in config.stakes:
            row_seed = replicate_seed(seed, row_index)
            row_index += 1
            n0 = stake_value(rule, N)
            label = stake_label(rule)
            coins = config.initial_coins(N, rule)
            classification, outcome = _classify(s, N, rule, config.eps)
            if config.theta is not None:
                outcome = _dilution_law(s, N, n0, config.theta)
            row: Dict[str, Any] = {
                "N": N,
                "stake": label,
                "n0": n0,
                "pi0": n0 / N,
                "replicates": config.replicates,
                "horizon_reached": config.horizon,
                "truncated": False,
                "regime": _regime_label(s),
                "class": classification.investor_class.value if classification else "",
                "limit": _describe(outcome),
            }
            if needs_ensemble:
                summary = _run_ensemble(config, s, coins, row_seed, threads, batch_size)
                row["horizon_reached"] = int(summary.times[-1])
                row["truncated"] = summary.truncated
                row.update(_summary_columns(config, summary, s, N, n0, outcome))
                if Estimator.DILUTION in wanted:
                    row.update(_dilution_columns(summary, _dyn_experiment(config, s, coins)))
                if wanted & {Estimator.VARIANCE, Estimator.DEVIATION}:
                    result.path_rows.extend(_path_rows(config, summary, s, N, n0, label))
                if Estimator.HISTOGRAM in wanted:
                    result.histogram_rows.extend(_histogram_rows(config, summary, outcome, N, label))
            if Estimator.K_T_GROWTH in wanted:
                row.update(_feature_columns(config, s, N, row_seed, threads))
            result.rows.append(row)
            LOGGER.info(
                "Experiment row finished",
                extra={"experiment": result.name, "N": N, "stake": label, "replicates": config.replicates},
            )

    runtime = time.perf_counter() - started
    if storage is not None:
        _persist(result, storage, runtime)
    return result


def _regime_label(s: RewardSchedule) -> str:
    return classify_regime(s).value


def _dyn_experiment(config: ExperimentConfig, s: RewardSchedule, coins: Tuple[float, ...]) -> DynExperiment:
    assert config.theta is not None
    return DynExperiment(
        incumbents=tuple(coins),
        theta=config.theta,
        schedule=s,
        horizon=config.horizon,
        stride=config.stride,
    )


def _run_ensemble(
    config: ExperimentConfig,
    s: RewardSchedule,
    coins: Tuple[float, ...],
    seed: int,
    threads: int,
    batch_size: int,
) -> EnsembleSummary:
    if config.theta is not None:
        return dyn_ensemble(
            _dyn_experiment(config, s, coins), config.replicates, seed, threads=threads, batch_size=batch_size
        )
    experiment = UrnExperiment(initial_coins=tuple(coins), schedule=s, horizon=config.horizon, stride=config.stride)
    return ensemble(experiment, config.replicates, seed, threads=threads, batch_size=batch_size)


def _persist(result: ExperimentResult, storage: ResultStorage, runtime: float) -> None:
    name = result.name
    storage.write_table(f"{name}.csv", result.fieldnames, result.rows)
    result.outputs.append(f"{name}.csv")
    if result.path_rows:
        storage.write_table(f"{name}_paths.csv", PATH_FIELDS, result.path_rows)
        result.outputs.append(f"{name}_paths.csv")
    if result.histogram_rows:
        storage.write_table(f"{name}_histogram.csv", HISTOGRAM_FIELDS, result.histogram_rows)
        result.outputs.append(f"{name}_histogram.csv")
    notes = []
    if any(row["truncated"] for row in result.rows):
        notes.append("supply overflowed before the horizon in at least one row; see horizon_reached")
    manifest = RunManifest(
        name=name,
        config_hash=config_hash(result.config),
        master_seed=result.master_seed,
        replicates=result.config.replicates,
        runtime_sec=round(runtime, 3),
        outputs=list(result.outputs),
        config=result.config.model_dump(mode="json"),
        notes=notes,
    )
    storage.write_manifest(manifest)
    result.manifest = manifest


def limit_table(config: ExperimentConfig) -> Tuple[List[str], List[Dict[str, Any]]]:
    """Classification and limit law or statement for every (N, stake) row."""

    s = config.reward_schedule()
    rows = []
    for N in config.n_grid:
        for rule in config.stakes:
            classification, outcome = classify_and_limit(s, N, rule.scaling(), eps=config.eps)
            row: Dict[str, Any] = {
                "N": N,
                "stake": stake_label(rule),
                "n0": classification.n0,
                "regime": classification.regime.value,
                "class": classification.investor_class.value,
                "threshold_exponent": classification.threshold_exponent,
                "threshold": classification.threshold,
                "limit": _describe(outcome),
                "detail": "",
                "bound": None,
                "bound_scaling": None,
            }
            if isinstance(outcome, LimitStatement):
                row.update(detail=outcome.detail, bound=outcome.bound, bound_scaling=outcome.scaling)
            rows.append(row)
    return list(LIMIT_FIELDS), rows


def apply_scale(config: ExperimentConfig, scale: float) -> ExperimentConfig:
    """Thin the N grid and replicate count for desk-scale runs.

    Every ``round(1/scale)``-th grid value is kept (the last value always);
    replicates become ``ceil(replicates * scale)``.
    """

    if not 0 < scale <= 1:
        raise DomainError("scale must lie in (0, 1]")
    if scale == 1:
        return config
    step = max(1, round(1.0 / scale))
    grid = list(config.n_grid[::step])
    if grid[-1] != config.n_grid[-1]:
        grid.append(config.n_grid[-1])
    replicates = max(2, math.ceil(config.replicates * scale))
    return config.model_copy(update={"n_grid": grid, "replicates": replicates})


__all__ = [
    "ESTIMATOR_FIELDS",
    "ExperimentResult",
    "HISTOGRAM_FIELDS",
    "LIMIT_FIELDS",
    "PATH_FIELDS",
    "apply_scale",
    "estimate_fieldnames",
    "limit_table",
    "run_experiment",
]
