"""Countably infinite investor populations.

Investor k (0-based) starts with n_{k,0} coins given by a weight rule with
total mass N. Only investors that have been selected are materialised; the
rest are reached through the rule's cumulative mass and its inverse. The
selection is the same index-order inverse CDF as the finite urn, so a rule
supported on K indices reproduces the finite simulation.
"""
from __future__ import annotations

import logging
import math
import sys
from bisect import bisect_right, insort
from dataclasses import dataclass, field
from itertools import accumulate
from typing import Dict, List, Protocol, Sequence, Tuple, Union

import numpy as np
from scipy import special

from app.core.errors import DomainError, SupplyOverflow
from app.core.seeding import UniformStream
from app.core.types import FloatArray, IntArray
from app.schedule import RewardSchedule, reward_at
from app.urn.engine import is_absorbed, snapshot_times
from app.urn.models import Trajectory, UrnState

LOGGER = logging.getLogger("stake_lab.population")

_MAX_DOUBLINGS = 62
_MAX_CORRECTIONS = 1 << 12


class WeightRule(Protocol):
    mass: float

    def weight(self, k: int) -> float: ...

    def cum_mass(self, k: int) -> float:
        """Mass of investors 0..k-1."""

    def index_of(self, y: float) -> int:
        """First k with y < cum_mass(k + 1)."""

    def sample_many(self, u: FloatArray) -> IntArray: ...


def _check_mass(mass: float) -> None:
    if not (math.isfinite(mass) and mass > 0):
        raise DomainError("total initial mass must be positive")


def _search_index(rule: WeightRule, y: float, guess: int) -> int:
    """Correct an analytic guess for index_of by local search."""

    k = max(int(guess), 0)
    while k > 0 and rule.cum_mass(k) > y:
        k -= 1
    for _ in range(_MAX_CORRECTIONS):
        if y < rule.cum_mass(k + 1):
            break
        k += 1
    return k


@dataclass(frozen=True, slots=True)
class GeometricWeights:
    """n_{k,0} = N (1 - q) q**k."""

    mass: float
    q: float

    def __post_init__(self) -> None:
        _check_mass(self.mass)
        if not 0.0 < self.q < 1.0:
            raise DomainError("q must lie in (0, 1)")

    def weight(self, k: int) -> float:
        return self.mass * (1.0 - self.q) * self.q**k

    def cum_mass(self, k: int) -> float:
        return -self.mass * math.expm1(k * math.log(self.q))

    def index_of(self, y: float) -> int:
        if y <= 0.0:
            return 0
        ratio = y / self.mass
        if ratio >= 1.0:
            # y at the rounding edge of the total mass
            guess = int(math.log(sys.float_info.epsilon) / math.log(self.q))
        else:
            guess = int(math.floor(math.log1p(-ratio) / math.log(self.q)))
        return _search_index(self, y, guess)

    def sample_many(self, u: FloatArray) -> IntArray:
        return np.array([self.index_of(float(v) * self.mass) for v in np.ravel(u)], dtype=np.int64)


@dataclass(frozen=True, slots=True)
class ZetaWeights:
    """n_{k,0} = N (k + 1)**-s / zeta(s), s > 1."""

    mass: float
    s: float
    _zeta: float = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_mass(self.mass)
        if not self.s > 1.0:
            raise DomainError("zeta weights need s > 1")
        object.__setattr__(self, "_zeta", float(special.zeta(self.s)))

    def weight(self, k: int) -> float:
        return self.mass * (k + 1.0) ** -self.s / self._zeta

    def cum_mass(self, k: int) -> float:
        if k <= 0:
            return 0.0
        # Hurwitz tail sum_{i>=k} (i + 1)**-s
        return self.mass * (1.0 - float(special.zeta(self.s, k + 1.0)) / self._zeta)

    def index_of(self, y: float) -> int:
        if y < self.cum_mass(1):
            return 0
        lo, hi = 0, 1
        for _ in range(_MAX_DOUBLINGS):
            if y < self.cum_mass(hi + 1):
                break
            lo, hi = hi, hi * 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if y < self.cum_mass(mid + 1):
                hi = mid
            else:
                lo = mid
        return _search_index(self, y, hi)

    def sample_many(self, u: FloatArray) -> IntArray:
        return np.array([self.index_of(float(v) * self.mass) for v in np.ravel(u)], dtype=np.int64)


@dataclass(frozen=True, slots=True)
class FiniteWeights:
    """Explicit coins on the first ``len(values)`` investors, none beyond."""

    values: Tuple[float, ...]
    _cumulative: Tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.values or any(not v > 0 for v in self.values):
            raise DomainError("finite weights must be positive")
        object.__setattr__(self, "_cumulative", tuple(accumulate(float(v) for v in self.values)))

    @property
    def mass(self) -> float:
        return self._cumulative[-1]

    def weight(self, k: int) -> float:
        return float(self.values[k]) if k < len(self.values) else 0.0

    def cum_mass(self, k: int) -> float:
        if k <= 0:
            return 0.0
        return self._cumulative[min(k, len(self._cumulative)) - 1]

    def index_of(self, y: float) -> int:
        return min(bisect_right(self._cumulative, y), len(self._cumulative) - 1)

    def sample_many(self, u: FloatArray) -> IntArray:
        return np.array([self.index_of(float(v) * self.mass) for v in np.ravel(u)], dtype=np.int64)


DiscreteWeights = Union[GeometricWeights, ZetaWeights, FiniteWeights]


@dataclass(slots=True)
class InfinitePopulation:
    """Materialised coin counts of a countable population."""

    rule: WeightRule
    labels: List[int] = field(default_factory=list)
    coins: Dict[int, float] = field(default_factory=dict)

    def coins_of(self, k: int) -> float:
        return self.coins.get(k, self.rule.weight(k))

    def credit(self, k: int, reward: float) -> None:
        if k not in self.coins:
            insort(self.labels, k)
            self.coins[k] = self.rule.weight(k)
        self.coins[k] += reward

    def select(self, x: float) -> int:
        """Investor whose cumulative coin interval contains ``x``."""

        extra = 0.0
        for m in self.labels:
            before = self.rule.cum_mass(m) + extra
            if x < before:
                return self.rule.index_of(x - extra)
            if x < before + self.coins[m]:
                return m
            extra += self.coins[m] - self.rule.weight(m)
        return self.rule.index_of(x - extra)


def simulate_discrete_infinite(
    rule: DiscreteWeights,
    s: RewardSchedule,
    T: int,
    *,
    seed: int,
    tracked: Sequence[int] = (0,),
    stride: int = 1,
    record_selection: bool = False,
) -> Trajectory:
    """Simulate the urn over a countable population for ``T`` steps."""

    if T < 0:
        raise DomainError("horizon must be non-negative")
    if stride < 1:
        raise DomainError("snapshot stride must be >= 1")
    tracked = tuple(int(k) for k in tracked)
    if any(k < 0 for k in tracked):
        raise DomainError("investor indices are non-negative")

    population = InfinitePopulation(rule=rule)
    supply = rule.mass
    stream = UniformStream(seed)
    wanted = set(snapshot_times(T, stride))
    times: List[int] = [0]
    series: Dict[int, List[float]] = {k: [population.coins_of(k) / supply] for k in tracked}
    selected: List[int] = []
    truncated = False
    t = 0
    while t < T:
        try:
            reward = reward_at(s, t + 1, supply)
        except SupplyOverflow:
            truncated = True
            break
        nxt = supply + reward
        if not math.isfinite(nxt):
            truncated = True
            break
        k = population.select(stream.next() * supply)
        population.credit(k, reward)
        supply = nxt
        t += 1
        if record_selection:
            selected.append(k)
        if t in wanted:
            times.append(t)
            for j in tracked:
                series[j].append(population.coins_of(j) / supply)

    if truncated and times[-1] != t:
        times.append(t)
        for j in tracked:
            series[j].append(population.coins_of(j) / supply)

    labels = tuple(sorted(set(population.labels) | set(tracked)))
    coins = tuple(population.coins_of(k) for k in labels)
    LOGGER.debug(
        "Discrete infinite run finished",
        extra={"steps": t, "materialised": len(population.labels), "truncated": truncated},
    )
    return Trajectory(
        times=tuple(times),
        shares={k: tuple(v) for k, v in series.items()},
        final_state=UrnState(t=t, coins=coins, supply=supply),
        selected=tuple(selected) if record_selection else None,
        truncated=truncated,
        absorbed=is_absorbed([c / supply for c in coins]),
        labels=labels,
    )


__all__ = [
    "DiscreteWeights",
    "FiniteWeights",
    "GeometricWeights",
    "InfinitePopulation",
    "WeightRule",
    "ZetaWeights",
    "simulate_discrete_infinite",
]
