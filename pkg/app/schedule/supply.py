"""Supply paths N_t = N + sum_{n<=t} R_n.

Rewards never depend on which investor is selected, so the supply path of a
(schedule, N) pair is deterministic. Paths are extended by forward iteration
and cached per pair; readers receive read-only array copies.
"""
from __future__ import annotations

import logging
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from app.core.errors import DomainError, SupplyOverflow
from app.core.types import FloatArray

from .rewards import RewardSchedule, reward_at

logger = logging.getLogger("stake_lab.schedule")

_CACHE_SIZE = 64


@dataclass(frozen=True, slots=True)
class RewardPath:
    """Rewards R_1..R_T and supplies N_0..N_T of one schedule.

    ``truncated`` is set when the supply overflowed before the requested
    horizon; ``rewards`` then stops at the last finite step.
    """

    rewards: FloatArray
    supplies: FloatArray
    truncated: bool

    @property
    def horizon(self) -> int:
        return int(self.rewards.shape[0])


class _SupplyPath:
    __slots__ = ("schedule", "rewards", "supplies", "overflow_step", "lock")

    def __init__(self, schedule: RewardSchedule, N: float) -> None:
        self.schedule = schedule
        self.rewards: List[float] = []
        self.supplies: List[float] = [N]
        self.overflow_step: int | None = None
        self.lock = threading.Lock()

    def extend_to(self, T: int) -> None:
        with self.lock:
            supply = self.supplies[-1]
            t = len(self.rewards)
            while t < T and self.overflow_step is None:
                try:
                    reward = reward_at(self.schedule, t + 1, supply)
                except SupplyOverflow:
                    self.overflow_step = t + 1
                    break
                nxt = supply + reward
                if not math.isfinite(nxt):
                    self.overflow_step = t + 1
                    break
                self.rewards.append(reward)
                self.supplies.append(nxt)
                supply = nxt
                t += 1
            if self.overflow_step is not None:
                logger.debug(
                    "Supply overflow",
                    extra={"schedule": repr(self.schedule), "step": self.overflow_step},
                )


_paths: "OrderedDict[Tuple[RewardSchedule, float], _SupplyPath]" = OrderedDict()
_paths_lock = threading.Lock()


def _path_for(s: RewardSchedule, N: float) -> _SupplyPath:
    if not (math.isfinite(N) and N > 0):
        raise DomainError(f"initial supply must be positive, got {N!r}")
    key = (s, float(N))
    with _paths_lock:
        path = _paths.get(key)
        if path is None:
            path = _SupplyPath(s, float(N))
            _paths[key] = path
            if len(_paths) > _CACHE_SIZE:
                _paths.popitem(last=False)
        else:
            _paths.move_to_end(key)
    return path


def supply_after(s: RewardSchedule, N: float, t: int) -> float:
    """Return N_t; raises :class:`SupplyOverflow` past the representable range."""

    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    path = _path_for(s, N)
    path.extend_to(t)
    if t >= len(path.supplies):
        raise SupplyOverflow(f"supply overflows at step {path.overflow_step}", step=path.overflow_step)
    return path.supplies[t]


def reward_path(s: RewardSchedule, N: float, T: int) -> RewardPath:
    """Return the deterministic reward/supply path up to ``T`` (or overflow)."""

    if T < 0:
        raise DomainError(f"horizon must be non-negative, got {T}")
    path = _path_for(s, N)
    path.extend_to(T)
    horizon = min(T, len(path.rewards))
    rewards = np.array(path.rewards[:horizon], dtype=np.float64)
    supplies = np.array(path.supplies[: horizon + 1], dtype=np.float64)
    rewards.flags.writeable = False
    supplies.flags.writeable = False
    return RewardPath(rewards=rewards, supplies=supplies, truncated=horizon < T)


def clear_cache() -> None:
    with _paths_lock:
        _paths.clear()


__all__ = ["RewardPath", "clear_cache", "reward_path", "supply_after"]
