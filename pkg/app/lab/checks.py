"""Acceptance suites: exact oracles plus toleranced Monte Carlo reproductions.

Every criterion runs with its own seed ``replicate_seed(master_seed, number)``
so suites can run alone or together with identical measurements. Reports carry
no timings; two runs with the same seed serialise to the same bytes.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from app.config import FigureCatalog
from app.config.models import ExperimentConfig
from app.core.enums import CheckSuite, LimitClass
from app.core.seeding import replicate_seed
from app.core.types import FloatArray
from app.dilution import expected_limit_ratio
from app.moments import (
    a_sequence,
    central_step_residuals,
    constant_reward_variance,
    enumerated_raw_moments,
    raw_moment_table,
)
from app.population import exchangeability_defect
from app.schedule import Constant, PowerDecay, RewardSchedule, supply_after
from app.telemetry.events import CheckRecord, CheckReport
from app.telemetry.storage import format_value
from app.urn import DEFAULT_BATCH_SIZE

from .estimators import log_slope
from .experiments import ExperimentResult, run_experiment
from .figures import resolve_figure

LOGGER = logging.getLogger("stake_lab.lab")

ASequenceFn = Callable[[RewardSchedule, float, int], FloatArray]

ORACLE_HORIZON = 100_000
ENUMERATION_HORIZON = 12
STEP_IDENTITY_HORIZON = 1_000
EXCHANGEABILITY_LENGTH = 6
SE_MULTIPLE = 4.0
DILUTION_N = 10.0
DILUTION_THETA = 1.0
DILUTION_HORIZON = 50_000


@dataclass(frozen=True, slots=True)
class CheckContext:
    master_seed: int = 0
    scale: float = 1.0
    threads: int = 1
    batch_size: int = DEFAULT_BATCH_SIZE
    catalog: Optional[FigureCatalog] = None
    a_sequence_fn: ASequenceFn = a_sequence

    def seed(self, criterion: int) -> int:
        return int(replicate_seed(self.master_seed, criterion))

    def replicates(self, full: int, minimum: int = 200) -> int:
        return max(minimum, math.ceil(full * self.scale))

    def figure(self, name: str, n_grid: Sequence[float], replicates: int = 10_000) -> ExperimentConfig:
        config = resolve_figure(name, catalog=self.catalog)
        return config.model_copy(update={"n_grid": list(n_grid), "replicates": self.replicates(replicates)})

    def run(self, config: ExperimentConfig, criterion: int, *, threads: Optional[int] = None) -> ExperimentResult:
        return run_experiment(
            config,
            master_seed=self.seed(criterion),
            threads=self.threads if threads is None else threads,
            batch_size=self.batch_size,
        )


def _record(
    criterion: str,
    suite: CheckSuite,
    passed: bool,
    measured: object,
    tolerance: object,
    *,
    seed: Optional[int] = None,
    detail: str = "",
) -> CheckRecord:
    if isinstance(measured, float) or hasattr(measured, "item"):
        measured = float(measured)  # type: ignore[arg-type]
    return CheckRecord(
        criterion=criterion,
        suite=suite.value,
        passed=bool(passed),
        measured=measured,
        tolerance=tolerance,
        seed=seed,
        detail=detail,
    )


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


# ----------------------------------------------------------------------
# Oracle suite
# ----------------------------------------------------------------------
def check_variance_closed_form(ctx: CheckContext) -> List[CheckRecord]:
    """a_t-based variance against the constant-reward closed form."""

    records = []
    s = Constant(R=1.0)
    for N in (2.0, 100.0, 1e4):
        a = ctx.a_sequence_fn(s, N, ORACLE_HORIZON)
        for pi0 in (0.5, 0.01):
            spread = pi0 * (1.0 - pi0)
            worst = max(
                _relative(float(a[t - 1]) * spread, constant_reward_variance(1.0, N, t, pi0))
                for t in range(1, ORACLE_HORIZON + 1)
            )
            records.append(
                _record(
                    "1a a_t variance recursion",
                    CheckSuite.ORACLE,
                    worst <= 1e-12,
                    worst,
                    1e-12,
                    detail=f"N={N:g} pi0={pi0:g} t<={ORACLE_HORIZON}",
                )
            )
    return records


def _enumeration_schedules() -> Tuple[Tuple[str, RewardSchedule], ...]:
    return (("constant R=1", Constant(R=1.0)), ("power_decay alpha=0.6", PowerDecay(c=1.0, alpha=0.6)))


def check_moments_by_enumeration(ctx: CheckContext) -> List[CheckRecord]:
    coins = (3.0, 5.0)
    N = sum(coins)
    records = []
    for label, s in _enumeration_schedules():
        table = raw_moment_table(s, N, coins[0] / N, ENUMERATION_HORIZON)
        worst = 0.0
        for T in range(1, ENUMERATION_HORIZON + 1):
            exact = enumerated_raw_moments(coins, s, T)
            worst = max(worst, max(_relative(float(table.raw[T, j]), float(exact[j])) for j in range(4)))
        records.append(
            _record(
                "1b raw moments vs path enumeration",
                CheckSuite.ORACLE,
                worst <= 1e-12,
                worst,
                1e-12,
                detail=f"{label} K=2 T<={ENUMERATION_HORIZON}",
            )
        )
    return records


def check_central_step_identities(ctx: CheckContext) -> List[CheckRecord]:
    records = []
    for label, s in _enumeration_schedules():
        N = 8.0
        table = raw_moment_table(s, N, 3.0 / N, STEP_IDENTITY_HORIZON)
        third, fourth = central_step_residuals(table, s, N)
        worst = float(max(third.max(), fourth.max()))
        records.append(
            _record(
                "1c third/fourth central moment step identities",
                CheckSuite.ORACLE,
                worst <= 1e-10,
                worst,
                1e-10,
                detail=f"{label} T<={STEP_IDENTITY_HORIZON}",
            )
        )
    return records


def check_exchangeability(ctx: CheckContext) -> List[CheckRecord]:
    defect = exchangeability_defect((1.0, 2.0), Constant(R=1.0), EXCHANGEABILITY_LENGTH)
    return [
        _record(
            "9 pattern probabilities invariant under permutation",
            CheckSuite.ORACLE,
            defect <= 1e-14,
            defect,
            1e-14,
            detail=f"two atoms, constant reward, patterns of length <= {EXCHANGEABILITY_LENGTH}",
        )
    ]


# ----------------------------------------------------------------------
# Bounds suite
# ----------------------------------------------------------------------
def _bound_records(result: ExperimentResult, criterion: str, seed: int) -> List[CheckRecord]:
    records = []
    for row in result.rows:
        bound = row["bound"]
        records.append(
            _record(
                criterion,
                CheckSuite.BOUNDS,
                bound is not None and row["p_max"] <= bound,
                row["p_max"],
                bound,
                seed=seed,
                detail=f"{result.name} N={row['N']:g} p_max <= bound",
            )
        )
    return records


def check_constant_bound(ctx: CheckContext) -> List[CheckRecord]:
    result = ctx.run(ctx.figure("fig1", [1000.0, 4000.0, 10000.0]), 2)
    records = _bound_records(result, "2 constant-reward concentration bound", ctx.seed(2))
    last = result.row(10000.0)
    records.append(
        _record(
            "2 constant-reward concentration bound",
            CheckSuite.BOUNDS,
            last["p_max"] <= 0.1 and math.isclose(last["bound"], 0.1, rel_tol=1e-12),
            last["p_max"],
            0.1,
            seed=ctx.seed(2),
            detail="N=10000: bound equals 0.1 and p_max stays below it",
        )
    )
    return records


def check_regime_bounds(ctx: CheckContext) -> List[CheckRecord]:
    seed = ctx.seed(5)
    records: List[CheckRecord] = []
    for name, grid in (("fig3", [5700.0, 10700.0]), ("fig5", [6000.0, 11000.0])):
        records += _bound_records(ctx.run(ctx.figure(name, grid), 5), "5 regime concentration bounds", seed)

    slow = ctx.run(ctx.figure("fig7", [2000.0, 11000.0]), 5)
    config = slow.config
    alpha = config.schedule.alpha  # type: ignore[union-attr]
    limit = -alpha / (1.0 - alpha) + 0.15
    slope = log_slope(slow.column("N"), slow.column("p_max"))
    records.append(
        _record(
            "5 regime concentration bounds",
            CheckSuite.BOUNDS,
            slope is None or slope <= limit,
            slope,
            limit,
            seed=seed,
            detail="fig7 slope of log p_max against log N (None: p_max vanished)",
        )
    )
    return records


# ----------------------------------------------------------------------
# Limits suite
# ----------------------------------------------------------------------
def check_gamma_limit(ctx: CheckContext) -> List[CheckRecord]:
    seed = ctx.seed(3)
    result = ctx.run(ctx.figure("fig2a", [100.0, 200.0]), 3)
    small, large = result.row(100.0), result.row(200.0)
    spot = math.exp(-2.0)
    return [
        _record("3 medium investor Gamma limit", CheckSuite.LIMITS, small["ks"] <= 0.05, small["ks"], 0.05, seed=seed, detail="N=100 KS vs Exponential(1)"),
        _record(
            "3 medium investor Gamma limit",
            CheckSuite.LIMITS,
            large["ks"] <= small["ks"] + 0.02,
            large["ks"],
            small["ks"] + 0.02,
            seed=seed,
            detail="N=200 KS within MC noise of N=100",
        ),
        _record(
            "3 medium investor Gamma limit",
            CheckSuite.LIMITS,
            abs(small["above"] - spot) <= 0.02,
            small["above"],
            f"{spot:.6f} +- 0.02",
            seed=seed,
            detail="N=100 P(ratio > 2)",
        ),
    ]


def check_poor_get_poorer(ctx: CheckContext) -> List[CheckRecord]:
    seed = ctx.seed(4)
    result = ctx.run(ctx.figure("fig2b", [100.0, 300.0]), 4)
    small, large = result.row(100.0), result.row(300.0)
    return [
        _record(
            "4 small investor collapse",
            CheckSuite.LIMITS,
            large["below"] > small["below"] and large["below"] > 0.5,
            large["below"],
            f"> max(0.5, {small['below']!r})",
            seed=seed,
            detail="P(ratio < eps) grows with N and exceeds 0.5 at N=300",
        ),
        _record(
            "4 small investor collapse",
            CheckSuite.LIMITS,
            large["variance"] > small["variance"],
            large["variance"],
            f"> {small['variance']!r}",
            seed=seed,
            detail="var(ratio) at N=300 exceeds N=100",
        ),
    ]


def check_chaotic_centralization(ctx: CheckContext) -> List[CheckRecord]:
    seed = ctx.seed(6)
    config = resolve_figure("fig9", catalog=ctx.catalog)
    config = config.model_copy(update={"replicates": ctx.replicates(10_000)})
    result = ctx.run(config, 6)
    records = []
    for row in result.rows:
        pi0 = row["pi0"]
        se = math.sqrt(pi0 * (1.0 - pi0) / row["replicates"])
        records.append(
            _record(
                "6 geometric rewards absorb with probability pi0",
                CheckSuite.LIMITS,
                abs(row["mass_high"] - pi0) <= SE_MULTIPLE * se and row["mass_middle"] <= 0.01,
                row["mass_high"],
                f"{pi0!r} +- {SE_MULTIPLE * se!r}; middle <= 0.01",
                seed=seed,
                detail=f"pi0={pi0:g} middle mass={row['mass_middle']!r} horizon_reached={row['horizon_reached']}",
            )
        )
    return records


def check_feature_growth(ctx: CheckContext) -> List[CheckRecord]:
    seed = ctx.seed(7)
    records = []
    for N in (2.0, 5.0):
        config = ExperimentConfig.model_validate(
            {
                "name": f"k_t_growth_N{N:g}",
                "schedule": {"kind": "constant", "R": 1.0},
                "n_grid": [N],
                "stakes": [{"kind": "fraction", "f": 0.5}],
                "horizon": 100_000,
                "replicates": ctx.replicates(200, minimum=50),
                "estimators": ["k_t_growth"],
            }
        )
        row = ctx.run(config, 7).rows[0]
        records.append(
            _record(
                "7 distinct features grow logarithmically",
                CheckSuite.LIMITS,
                abs(row["k_mean"] - row["k_expected"]) <= 0.1 * row["k_expected"],
                row["k_mean"],
                f"{row['k_expected']!r} +- 10%",
                seed=seed,
                detail=f"N/R={N:g} mean K_T/log T={row['k_over_log']!r}",
            )
        )
        records.append(
            _record(
                "7 first-appearance weight",
                CheckSuite.LIMITS,
                abs(row["first_weight"] - row["first_weight_expected"]) <= SE_MULTIPLE * row["first_weight_se"],
                row["first_weight"],
                f"{row['first_weight_expected']!r} +- {SE_MULTIPLE * row['first_weight_se']!r}",
                seed=seed,
                detail=f"N/R={N:g}",
            )
        )
    return records


# ----------------------------------------------------------------------
# Dilution suite
# ----------------------------------------------------------------------
def check_dilution(ctx: CheckContext) -> List[CheckRecord]:
    seed = ctx.seed(8)
    N, theta, horizon = DILUTION_N, DILUTION_THETA, DILUTION_HORIZON
    config = ExperimentConfig.model_validate(
        {
            "name": "dilution_check",
            "schedule": {"kind": "constant", "R": 1.0},
            "n_grid": [N],
            "stakes": [{"kind": "constant", "c": 1.0}],
            "horizon": horizon,
            "replicates": ctx.replicates(10_000),
            "theta": theta,
            "estimators": ["ks", "dilution"],
        }
    )
    row = ctx.run(config, 8).rows[0]
    return [
        _record("8a incumbent share Beta limit", CheckSuite.DILUTION, row["ks"] <= 0.05, row["ks"], 0.05, seed=seed, detail="KS vs Beta(1, 10)"),
        _record(
            "8b mean incumbent ratio",
            CheckSuite.DILUTION,
            abs(row["mean_ratio"] - N / (N + theta)) <= SE_MULTIPLE * row["mean_ratio_se"],
            row["mean_ratio"],
            f"{N / (N + theta)!r} +- {SE_MULTIPLE * row['mean_ratio_se']!r}",
            seed=seed,
        ),
    ]


def check_dilution_product(ctx: CheckContext) -> List[CheckRecord]:
    """Deterministic truncated-product criteria; no sampling involved."""

    N, theta, horizon = DILUTION_N, DILUTION_THETA, DILUTION_HORIZON
    s = Constant(R=1.0)
    supply = supply_after(s, N, horizon)
    closed = N / (N + theta) * (supply + theta) / supply
    product = expected_limit_ratio(s, N, theta, horizon).value
    error = _relative(product, closed)
    records = [
        _record("8c truncated product closed form", CheckSuite.DILUTION, error <= 1e-12, error, 1e-12, detail=f"T={horizon}")
    ]

    fast = PowerDecay(c=1.0, alpha=2.0)
    early = expected_limit_ratio(fast, N, theta, 1_000)
    late = expected_limit_ratio(fast, N, theta, 1_000_000)
    drop = early.value - late.value
    records.append(
        _record(
            "8d summable rewards: zero class, product settles within its tail bound",
            CheckSuite.DILUTION,
            late.classification is LimitClass.ZERO
            and 0.0 < drop <= early.tail_sum_bound
            and late.lower_bound <= late.value,
            drop,
            f"(0, {early.tail_sum_bound!r}]",
            detail=(
                f"power_decay alpha=2 value T=1e3 {early.value!r} T=1e6 {late.value!r} "
                f"classification={late.classification.value}"
            ),
        )
    )
    return records


# ----------------------------------------------------------------------
# Reproducibility
# ----------------------------------------------------------------------
def _formatted(result: ExperimentResult) -> List[Tuple[object, ...]]:
    return [tuple(format_value(row.get(key)) for key in result.fieldnames) for row in result.rows]


def check_thread_independence(ctx: CheckContext) -> List[CheckRecord]:
    seed = ctx.seed(10)
    config = ctx.figure("fig1", [1000.0], replicates=2_000).model_copy(update={"horizon": 5_000})
    single = run_experiment(config, master_seed=seed, threads=1, batch_size=128)
    many = run_experiment(config, master_seed=seed, threads=8, batch_size=128)
    identical = _formatted(single) == _formatted(many)
    return [
        _record(
            "10 output independent of thread count",
            CheckSuite.ALL,
            identical,
            identical,
            True,
            seed=seed,
            detail="fig1 N=1000 T=5000 at threads 1 and 8",
        )
    ]


CheckFn = Callable[[CheckContext], List[CheckRecord]]

SUITES: Dict[CheckSuite, Tuple[CheckFn, ...]] = {
    CheckSuite.ORACLE: (
        check_variance_closed_form,
        check_moments_by_enumeration,
        check_central_step_identities,
        check_exchangeability,
    ),
    CheckSuite.BOUNDS: (check_constant_bound, check_regime_bounds),
    CheckSuite.LIMITS: (check_gamma_limit, check_poor_get_poorer, check_chaotic_centralization, check_feature_growth),
    CheckSuite.DILUTION: (check_dilution, check_dilution_product),
}


def suite_checks(suite: CheckSuite) -> Tuple[CheckFn, ...]:
    if suite is CheckSuite.ALL:
        ordered = [SUITES[name] for name in (CheckSuite.ORACLE, CheckSuite.BOUNDS, CheckSuite.LIMITS, CheckSuite.DILUTION)]
        return tuple(fn for group in ordered for fn in group) + (check_thread_independence,)
    return SUITES[suite]


def run_checks(
    suite: CheckSuite | str,
    *,
    master_seed: int = 0,
    scale: float = 1.0,
    threads: int = 1,
    batch_size: int = DEFAULT_BATCH_SIZE,
    catalog: Optional[FigureCatalog] = None,
    a_sequence_fn: ASequenceFn = a_sequence,
) -> CheckReport:
    """Run an acceptance suite and collect its records."""

    suite = CheckSuite(suite)
    ctx = CheckContext(
        master_seed=master_seed,
        scale=scale,
        threads=threads,
        batch_size=batch_size,
        catalog=catalog,
        a_sequence_fn=a_sequence_fn,
    )
    report = CheckReport(suite=suite.value, master_seed=master_seed)
    for check in suite_checks(suite):
        records = check(ctx)
        report.records.extend(records)
        LOGGER.info(
            "Check finished",
            extra={"check": check.__name__, "passed": all(r.passed for r in records), "records": len(records)},
        )
    return report


__all__ = [
    "CheckContext",
    "SUITES",
    "check_chaotic_centralization",
    "check_constant_bound",
    "check_central_step_identities",
    "check_dilution",
    "check_dilution_product",
    "check_exchangeability",
    "check_feature_growth",
    "check_gamma_limit",
    "check_moments_by_enumeration",
    "check_poor_get_poorer",
    "check_regime_bounds",
    "check_thread_independence",
    "check_variance_closed_form",
    "run_checks",
    "suite_checks",
]
