"""Deterministic reward rules R_t.

Every rule is an immutable value object; ``reward_at`` evaluates R_t for a
1-indexed step ``t`` given the supply N_{t-1} before the step. Only the
supply-proportional rule reads the supply.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, ClassVar, Dict, Mapping, Union

from app.core.enums import ScheduleKind
from app.core.errors import DomainError, SupplyOverflow


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True, slots=True)
class Constant:
    """R_t = R."""

    R: float
    kind: ClassVar[ScheduleKind] = ScheduleKind.CONSTANT

    def __post_init__(self) -> None:
        _require_positive(R=self.R)


@dataclass(frozen=True, slots=True)
class FloorDecay:
    """R_t = floor + excess * q**t, decreasing to a positive floor."""

    floor: float
    excess: float
    q: float
    kind: ClassVar[ScheduleKind] = ScheduleKind.FLOOR_DECAY

    def __post_init__(self) -> None:
        _require_positive(floor=self.floor, excess=self.excess)
        if not 0 < self.q < 1:
            raise DomainError(f"q must lie in (0, 1), got {self.q!r}")


@dataclass(frozen=True, slots=True)
class FloorPower:
    """R_t = floor + c * t**-alpha, e.g. R_t = 1 + 1/t."""

    floor: float
    c: float
    alpha: float
    kind: ClassVar[ScheduleKind] = ScheduleKind.FLOOR_POWER

    def __post_init__(self) -> None:
        _require_positive(floor=self.floor, c=self.c, alpha=self.alpha)


@dataclass(frozen=True, slots=True)
class PowerDecay:
    """R_t = c * t**-alpha."""

    c: float
    alpha: float
    kind: ClassVar[ScheduleKind] = ScheduleKind.POWER_DECAY

    def __post_init__(self) -> None:
        _require_positive(c=self.c, alpha=self.alpha)


@dataclass(frozen=True, slots=True)
class Proportional:
    """R_t = rho * N_{t-1}**gamma."""

    rho: float
    gamma: float
    kind: ClassVar[ScheduleKind] = ScheduleKind.PROPORTIONAL

    def __post_init__(self) -> None:
        _require_positive(rho=self.rho, gamma=self.gamma)


RewardSchedule = Union[Constant, FloorDecay, FloorPower, PowerDecay, Proportional]

_BY_KIND: Dict[ScheduleKind, type] = {
    ScheduleKind.CONSTANT: Constant,
    ScheduleKind.FLOOR_DECAY: FloorDecay,
    ScheduleKind.FLOOR_POWER: FloorPower,
    ScheduleKind.POWER_DECAY: PowerDecay,
    ScheduleKind.PROPORTIONAL: Proportional,
}


def reward_at(s: RewardSchedule, t: int, prev_supply: float) -> float:
    """Return R_t for step ``t >= 1``; ``prev_supply`` is N_{t-1}."""

    if t < 1:
        raise DomainError(f"rewards are indexed from t=1, got t={t}")
    if not prev_supply > 0:
        raise DomainError(f"prev_supply must be positive, got {prev_supply!r}")
    if isinstance(s, Constant):
        return s.R
    if isinstance(s, FloorDecay):
        return s.floor + s.excess * s.q**t
    if isinstance(s, FloorPower):
        return s.floor + s.c * float(t) ** -s.alpha
    if isinstance(s, PowerDecay):
        return s.c * float(t) ** -s.alpha
    if isinstance(s, Proportional):
        try:
            value = s.rho * prev_supply**s.gamma
        except OverflowError as exc:
            raise SupplyOverflow(f"reward overflow at t={t}", step=t) from exc
        if not math.isfinite(value):
            raise SupplyOverflow(f"reward overflow at t={t}", step=t)
        return value
    raise DomainError(f"unsupported schedule {s!r}")


def first_reward(s: RewardSchedule, N: float) -> float:
    return reward_at(s, 1, N)


def schedule_to_dict(s: RewardSchedule) -> Dict[str, Any]:
    """Tagged representation, e.g. ``{"kind": "power_decay", "c": 1.0, "alpha": 0.6}``."""

    payload: Dict[str, Any] = {"kind": s.kind.value}
    payload.update(asdict(s))
    return payload


def schedule_from_dict(data: Mapping[str, Any]) -> RewardSchedule:
    payload = dict(data)
    try:
        kind = ScheduleKind(payload.pop("kind"))
    except (KeyError, ValueError) as exc:
        raise DomainError(f"unknown or missing schedule kind in {data!r}") from exc
    return _BY_KIND[kind](**{key: float(value) for key, value in payload.items()})


__all__ = [
    "Constant",
    "FloorDecay",
    "FloorPower",
    "PowerDecay",
    "Proportional",
    "RewardSchedule",
    "first_reward",
    "reward_at",
    "schedule_from_dict",
    "schedule_to_dict",
]
