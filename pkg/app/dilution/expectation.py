"""Expected incumbent share under dilution.

E[pi_{t+1} | F_t] = pi_t * (1 - x_t) with x_t = theta R_{t+1} / (N_{t+1} (N_t + theta)),
so E[pi_T] / pi_0 is the product of (1 - x_t) over the applied steps
t = 0..T-1. Since x_t <= theta (1/N_t - 1/N_{t+1}), the tail beyond T sums to
at most theta / N_T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from app.core.enums import LimitClass
from app.core.errors import DomainError
from app.core.types import FloatArray
from app.schedule import PowerDecay, RewardPath, RewardSchedule, reward_path

# 1 - x >= exp(-2x) holds on [0, LOG_BOUND_LIMIT]
LOG_BOUND_LIMIT = 0.39


@dataclass(frozen=True, slots=True)
class LimitRatio:
    """Truncated product, tail bound and certified lower bound of E[pi_inf]/pi_0."""

    value: float
    tail_sum_bound: float
    lower_bound: float
    classification: LimitClass
    horizon: int


def _step_losses(path: RewardPath, theta: float) -> FloatArray:
    supplies = path.supplies
    return theta * path.rewards / (supplies[1:] * (supplies[:-1] + theta))


def _check(N: float, theta: float) -> None:
    if not N > 0:
        raise DomainError("N must be positive")
    if not (math.isfinite(theta) and theta >= 0):
        raise DomainError("theta must be non-negative")


def expected_share_factors(s: RewardSchedule, N: float, theta: float, T: int) -> FloatArray:
    """E[pi_t]/pi_0 for t = 0..T (shorter if the supply overflows)."""

    _check(N, theta)
    if T < 0:
        raise DomainError("T must be non-negative")
    path = reward_path(s, N, T)
    logs = np.log1p(-_step_losses(path, theta))
    return np.exp(np.concatenate(([0.0], np.cumsum(logs))))


def limit_classification(s: RewardSchedule) -> LimitClass:
    if isinstance(s, PowerDecay):
        if s.alpha > 1.0:
            return LimitClass.ZERO
        if s.alpha == 1.0:
            return LimitClass.UNDETERMINED
    return LimitClass.POSITIVE


def expected_limit_ratio(s: RewardSchedule, N: float, theta: float, T_trunc: int) -> LimitRatio:
    """Truncated product at ``T_trunc`` with its tail bound and classification."""

    _check(N, theta)
    if T_trunc < 1:
        raise DomainError("T_trunc must be >= 1")
    path = reward_path(s, N, T_trunc)
    losses = _step_losses(path, theta)
    value = math.exp(math.fsum(np.log1p(-losses).tolist()))
    tail = theta / float(path.supplies[-1])
    lower = value * math.exp(-2.0 * tail) if tail <= LOG_BOUND_LIMIT else 0.0
    return LimitRatio(
        value=value,
        tail_sum_bound=tail,
        lower_bound=lower,
        classification=limit_classification(s),
        horizon=path.horizon,
    )


__all__ = [
    "LOG_BOUND_LIMIT",
    "LimitRatio",
    "expected_limit_ratio",
    "expected_share_factors",
    "limit_classification",
]
