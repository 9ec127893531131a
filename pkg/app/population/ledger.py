"""Base measures and order-of-appearance bookkeeping of the feature model."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.errors import DomainError
from app.core.types import FloatArray

from .discrete import WeightRule

InverseCdf = Callable[[FloatArray], FloatArray]


@dataclass(frozen=True, slots=True)
class DiffuseBase:
    """Total mass ``mass`` spread by an atomless law on [0, 1].

    ``inverse_cdf`` must accept and return arrays; the default is uniform.
    """

    mass: float
    inverse_cdf: Optional[InverseCdf] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mass) and self.mass > 0):
            raise DomainError("base mass must be positive")

    def draw_many(self, u: FloatArray) -> FloatArray:
        values = np.asarray(u, dtype=np.float64)
        if self.inverse_cdf is None:
            return values.copy()
        return np.asarray(self.inverse_cdf(values), dtype=np.float64)

    def draw(self, u: float) -> float:
        return float(self.draw_many(np.array([u]))[0])


@dataclass(frozen=True, slots=True)
class DiscreteBase:
    """Mass n_{k,0} on investor k of a countable population."""

    rule: WeightRule

    @property
    def mass(self) -> float:
        return self.rule.mass

    def draw_many(self, u: FloatArray) -> np.ndarray:
        return self.rule.sample_many(np.asarray(u, dtype=np.float64))

    def draw(self, u: float) -> int:
        return int(self.draw_many(np.array([u]))[0])


BaseMeasure = Union[DiffuseBase, DiscreteBase]


@dataclass(slots=True)
class AtomLedger:
    """Distinct features in order of appearance and the reward they hold.

    ``first_seen`` holds the 1-based step M_j at which feature j appeared.
    ``step_atoms[n]`` is the atom selected at step n + 1 and
    ``cumulative_rewards[n]`` is R_1 + ... + R_{n+1}.
    """

    mass: float
    features: List[Hashable] = field(default_factory=list)
    first_seen: List[int] = field(default_factory=list)
    rewards: List[float] = field(default_factory=list)
    counts: List[int] = field(default_factory=list)
    step_atoms: List[int] = field(default_factory=list)
    fresh: List[bool] = field(default_factory=list)
    cumulative_rewards: List[float] = field(default_factory=list)
    supply: float = 0.0
    t: int = 0
    _index: Dict[Hashable, int] = field(default_factory=dict, repr=False)

    @classmethod
    def empty(cls, mass: float) -> "AtomLedger":
        return cls(mass=float(mass), supply=float(mass))

    @property
    def K(self) -> int:
        return len(self.features)

    @property
    def reward_total(self) -> float:
        return self.cumulative_rewards[-1] if self.cumulative_rewards else 0.0

    def copy(self) -> "AtomLedger":
        return AtomLedger(
            mass=self.mass,
            features=list(self.features),
            first_seen=list(self.first_seen),
            rewards=list(self.rewards),
            counts=list(self.counts),
            step_atoms=list(self.step_atoms),
            fresh=list(self.fresh),
            cumulative_rewards=list(self.cumulative_rewards),
            supply=self.supply,
            t=self.t,
            _index=dict(self._index),
        )

    def atom_of(self, feature: Hashable) -> Optional[int]:
        return self._index.get(feature)

    def record(
        self,
        feature: Hashable,
        reward: float,
        *,
        fresh: bool,
        diffuse: bool,
        step: Optional[int] = None,
    ) -> int:
        """Credit ``reward`` to ``feature`` at step ``step`` (default t + 1) and return its atom index."""

        t = self.t + 1 if step is None else step
        atom = self._index.get(feature)
        if atom is None:
            atom = len(self.features)
            self._index[feature] = atom
            self.features.append(feature)
            self.first_seen.append(t)
            self.rewards.append(0.0)
            self.counts.append(0)
        elif fresh and diffuse:
            raise DomainError(f"fresh draw {feature!r} collides with an existing atom; inverse CDF is not atomless")
        self.rewards[atom] += reward
        self.counts[atom] += 1
        self.step_atoms.append(atom)
        self.fresh.append(fresh)
        self.cumulative_rewards.append(self.reward_total + reward)
        self.supply += reward
        self.t = t
        return atom

    def k_series(self) -> List[int]:
        """K_t for t = 1..current step."""

        series: List[int] = []
        seen = 0
        for step_no in range(1, self.t + 1):
            while seen < len(self.first_seen) and self.first_seen[seen] <= step_no:
                seen += 1
            series.append(seen)
        return series

    def atom_weights(self) -> FloatArray:
        """Predictive mass of each atom, reward_j / (N + sum R)."""

        return np.asarray(self.rewards, dtype=np.float64) / self.supply


@dataclass(frozen=True, slots=True)
class Appearance:
    first_seen: Tuple[int, ...]
    features: Tuple[Hashable, ...]
    k_series: Tuple[int, ...]
    counts: Tuple[int, ...]


def relabel_by_appearance(sequence: Sequence[Hashable]) -> Appearance:
    """Decompose a sequence into (M_j, distinct features, K_t, N_{jt})."""

    index: Dict[Hashable, int] = {}
    first_seen: List[int] = []
    features: List[Hashable] = []
    counts: List[int] = []
    k_series: List[int] = []
    for step_no, feature in enumerate(sequence, start=1):
        atom = index.get(feature)
        if atom is None:
            atom = len(features)
            index[feature] = atom
            features.append(feature)
            first_seen.append(step_no)
            counts.append(0)
        counts[atom] += 1
        k_series.append(len(features))
    return Appearance(
        first_seen=tuple(first_seen),
        features=tuple(features),
        k_series=tuple(k_series),
        counts=tuple(counts),
    )


__all__ = [
    "Appearance",
    "AtomLedger",
    "BaseMeasure",
    "DiffuseBase",
    "DiscreteBase",
    "InverseCdf",
    "relabel_by_appearance",
]
