"""Mapping from reward schedules to asymptotic regimes."""
from __future__ import annotations

from app.core.enums import Regime
from app.core.errors import DomainError

from .rewards import Constant, FloorDecay, FloorPower, PowerDecay, Proportional, RewardSchedule


def classify_regime(s: RewardSchedule) -> Regime:
    """Return the regime tag used by bounds, classifier and dilution analysis."""

    if isinstance(s, Constant):
        return Regime.CONSTANT
    if isinstance(s, (FloorDecay, FloorPower)):
        return Regime.POSITIVE_FLOOR
    if isinstance(s, PowerDecay):
        if s.alpha > 0.5:
            return Regime.FAST_DECAY
        if s.alpha < 0.5:
            return Regime.SLOW_DECAY
        return Regime.UNBOUNDED_ANALYSIS
    if isinstance(s, Proportional):
        if s.gamma < 1:
            return Regime.SUBLINEAR
        if s.gamma > 1:
            return Regime.GEOMETRIC
        return Regime.UNBOUNDED_ANALYSIS
    raise DomainError(f"unsupported schedule {s!r}")


def reward_floor(s: RewardSchedule) -> float:
    """Limit of R_t for schedules with a positive floor."""

    if isinstance(s, Constant):
        return s.R
    if isinstance(s, (FloorDecay, FloorPower)):
        return s.floor
    raise DomainError(f"{s!r} has no positive reward floor")


__all__ = ["classify_regime", "reward_floor"]
