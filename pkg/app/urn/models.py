"""Data models of the finite-population urn."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import accumulate
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import DomainError
from app.core.types import FloatArray, IntArray
from app.schedule import RewardSchedule, schedule_to_dict

ABSORPTION_TOLERANCE = 1e-9


def sequential_total(coins: Sequence[float]) -> float:
    """Left-to-right sum, the same association order as ``numpy.cumsum``."""

    total = 0.0
    for value in accumulate(coins):
        total = value
    return total


@dataclass(frozen=True, slots=True)
class UrnState:
    """Coin counts n_{k,t}, supply N_t and time t."""

    t: int
    coins: Tuple[float, ...]
    supply: float

    @classmethod
    def initial(cls, coins: Sequence[float]) -> "UrnState":
        values = tuple(float(c) for c in coins)
        if not values:
            raise DomainError("an urn needs at least one investor")
        if any(not c > 0 for c in values):
            raise DomainError("initial coins must all be positive")
        return cls(t=0, coins=values, supply=sequential_total(values))

    @property
    def K(self) -> int:
        return len(self.coins)

    def shares(self) -> Tuple[float, ...]:
        total = sequential_total(self.coins)
        return tuple(c / total for c in self.coins)

    def share(self, k: int) -> float:
        return self.coins[k] / sequential_total(self.coins)

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "coins": list(self.coins), "supply": self.supply}


@dataclass(slots=True)
class Trajectory:
    """Snapshots of tracked shares along one simulated path.

    ``labels`` is set by the discrete infinite-population simulator, where
    ``final_state.coins`` lists only materialised investor indices.
    """

    times: Tuple[int, ...]
    shares: Dict[int, Tuple[float, ...]]
    final_state: UrnState
    selected: Optional[Tuple[int, ...]] = None
    truncated: bool = False
    absorbed: bool = False
    labels: Optional[Tuple[int, ...]] = None

    def terminal_share(self, k: int) -> float:
        return self.shares[k][-1]


@dataclass(frozen=True, slots=True)
class UrnExperiment:
    """One ensemble configuration: initial coins, schedule, horizon, tracking."""

    initial_coins: Tuple[float, ...]
    schedule: RewardSchedule
    horizon: int
    tracked: Tuple[int, ...] = (0,)
    stride: int = 1

    def __post_init__(self) -> None:
        if any(not c > 0 for c in self.initial_coins):
            raise DomainError("initial coins must all be positive")
        if self.horizon < 0:
            raise DomainError("horizon must be non-negative")
        if self.stride < 1:
            raise DomainError("snapshot stride must be >= 1")
        if any(not 0 <= k < len(self.initial_coins) for k in self.tracked):
            raise DomainError(f"tracked indices {self.tracked} out of range")

    @property
    def supply(self) -> float:
        return sequential_total(self.initial_coins)

    def initial_shares(self) -> FloatArray:
        total = self.supply
        return np.array([self.initial_coins[k] / total for k in self.tracked])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "initial_coins": list(self.initial_coins),
            "schedule": schedule_to_dict(self.schedule),
            "horizon": self.horizon,
            "tracked": list(self.tracked),
            "stride": self.stride,
        }


@dataclass(slots=True)
class EnsembleSummary:
    """Per-replicate snapshots of an ensemble plus aggregate views.

    ``snapshots`` has shape (replicates, len(times), len(tracked)) and holds
    shares; ``pool_snapshots`` carries the aggregate new-investor share of the
    dilution model. Rows are ordered by replicate index.
    """

    replicates: int
    master_seed: int
    times: IntArray
    tracked: Tuple[int, ...]
    initial_shares: FloatArray
    snapshots: FloatArray
    terminal: FloatArray
    truncated: bool = False
    truncated_count: int = 0
    absorbed_count: int = 0
    pool_snapshots: Optional[FloatArray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    # ------------------------------------------------------------------
    # Share and ratio views
    # ------------------------------------------------------------------
    def ratios(self) -> FloatArray:
        return self.snapshots / self.initial_shares[np.newaxis, np.newaxis, :]

    def terminal_ratio(self, position: int = 0) -> FloatArray:
        return self.snapshots[:, -1, position] / self.initial_shares[position]

    def terminal_share(self, position: int = 0) -> FloatArray:
        return self.snapshots[:, -1, position]

    # ------------------------------------------------------------------
    # Moments with standard errors
    # ------------------------------------------------------------------
    def mean_path(self) -> FloatArray:
        return self.snapshots.mean(axis=0)

    def variance_path(self) -> FloatArray:
        if self.replicates < 2:
            return np.zeros(self.snapshots.shape[1:])
        return self.snapshots.var(axis=0, ddof=1)

    def standard_error_path(self) -> FloatArray:
        return np.sqrt(self.variance_path() / self.replicates)

    def exceedance_counts(self, eps: float) -> IntArray:
        """Counts of |ratio - 1| > eps per (snapshot, tracked investor)."""

        return (np.abs(self.ratios() - 1.0) > eps).sum(axis=0)


__all__ = [
    "ABSORPTION_TOLERANCE",
    "EnsembleSummary",
    "Trajectory",
    "UrnExperiment",
    "UrnState",
    "sequential_total",
]
