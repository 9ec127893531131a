"""Dynamical population: K incumbents plus new investors entering with weight theta.

At step t an incumbent k is selected with probability n_{k,t-1}/(N_{t-1}+theta),
a new investor that already holds coins with probability proportional to its
coins, and a brand-new investor with probability theta/(N_{t-1}+theta). The
dilution weight theta never counts towards the supply.
"""
from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, replace
from itertools import accumulate
from typing import Hashable, List, Optional, Sequence, Tuple

import numpy as np

from app.core.enums import SelectionKind
from app.core.errors import DomainError, SupplyOverflow
from app.core.seeding import UniformStream, replicate_seed
from app.core.types import FloatArray
from app.population.ledger import AtomLedger, DiffuseBase
from app.schedule import RewardSchedule, reward_at
from app.urn.engine import select_index, snapshot_times
from app.urn.models import sequential_total

LOGGER = logging.getLogger("stake_lab.dilution")


@dataclass(frozen=True, slots=True)
class DynState:
    """Incumbent coins, new-investor ledger, dilution weight and supply at step t.

    States are values: :func:`dyn_step` never changes the state it is given.
    """

    t: int
    incumbents: Tuple[float, ...]
    ledger: AtomLedger
    theta: float
    supply: float

    @classmethod
    def initial(cls, incumbents: Sequence[float], theta: float) -> "DynState":
        coins = tuple(float(c) for c in incumbents)
        if not coins or any(not c > 0 for c in coins):
            raise DomainError("incumbent coins must be positive")
        if not (math.isfinite(theta) and theta >= 0):
            raise DomainError("theta must be non-negative")
        ledger = AtomLedger(mass=float(theta), supply=float(theta))
        return cls(t=0, incumbents=coins, ledger=ledger, theta=float(theta), supply=sequential_total(coins))

    @property
    def K(self) -> int:
        return len(self.incumbents)

    @property
    def newcomer_coins(self) -> float:
        return self.ledger.reward_total

    def incumbent_shares(self) -> Tuple[float, ...]:
        total = sequential_total(self.incumbents) + self.newcomer_coins
        return tuple(c / total for c in self.incumbents)

    def newcomer_share(self) -> float:
        return self.newcomer_coins / (sequential_total(self.incumbents) + self.newcomer_coins)

    def selection_probabilities(self) -> Tuple[Tuple[float, ...], Tuple[float, ...], float]:
        """(incumbents, new-investor atoms, fresh entry)."""

        total = self.supply + self.theta
        return (
            tuple(c / total for c in self.incumbents),
            tuple(r / total for r in self.ledger.rewards),
            self.theta / total,
        )


@dataclass(frozen=True, slots=True)
class DynSelection:
    kind: SelectionKind
    index: int
    feature: Optional[Hashable] = None


def _advance(
    state: DynState,
    s: RewardSchedule,
    base: DiffuseBase,
    u_select: float,
    u_fresh: float,
    ledger: AtomLedger,
) -> Tuple[DynState, DynSelection]:
    """One step of the selection rule; new-investor rewards are recorded in ``ledger``."""

    for u in (u_select, u_fresh):
        if not 0.0 <= u < 1.0:
            raise DomainError(f"uniform draws must lie in [0, 1), got {u!r}")
    t = state.t + 1
    reward = reward_at(s, t, state.supply)
    supply = state.supply + reward
    if not math.isfinite(supply):
        raise SupplyOverflow(f"supply overflows at step {t}", step=t)

    cumulative = list(accumulate(state.incumbents))
    pool = state.newcomer_coins
    x = u_select * (cumulative[-1] + pool + state.theta)
    incumbents = list(state.incumbents)

    if x < cumulative[-1] or (state.theta == 0.0 and pool == 0.0):
        k = select_index(cumulative, x)
        incumbents[k] += reward
        selection = DynSelection(SelectionKind.INCUMBENT, k)
    elif x < cumulative[-1] + pool:
        past = min(bisect_right(ledger.cumulative_rewards, x - cumulative[-1]), len(ledger.step_atoms) - 1)
        feature = ledger.features[ledger.step_atoms[past]]
        atom = ledger.record(feature, reward, fresh=False, diffuse=True, step=t)
        selection = DynSelection(SelectionKind.ATOM, atom, feature)
    else:
        feature = base.draw(u_fresh)
        atom = ledger.record(feature, reward, fresh=True, diffuse=True, step=t)
        selection = DynSelection(SelectionKind.FRESH, atom, feature)

    return replace(state, t=t, incumbents=tuple(incumbents), ledger=ledger, supply=supply), selection


def dyn_step(
    state: DynState,
    s: RewardSchedule,
    base: DiffuseBase,
    u_select: float,
    u_fresh: float,
) -> Tuple[DynState, DynSelection]:
    """Select one party with ``u_select`` and credit it with R_{t+1}.

    Returns a new state; the ledger of ``state`` is copied, not extended.
    """

    return _advance(state, s, base, u_select, u_fresh, state.ledger.copy())


@dataclass(slots=True)
class DynTrajectory:
    times: Tuple[int, ...]
    incumbent_shares: FloatArray
    newcomer_shares: FloatArray
    final_state: DynState
    truncated: bool = False

    def terminal_share(self, k: int = 0) -> float:
        return float(self.incumbent_shares[-1, k])


def dyn_simulate(
    incumbents: Sequence[float],
    theta: float,
    s: RewardSchedule,
    T: int,
    *,
    seed: int,
    base: Optional[DiffuseBase] = None,
    stride: int = 1,
) -> DynTrajectory:
    """Simulate one path of the dilution model.

    Selection uniforms come from the same stream as the batch kernel for
    ``seed``; every step also takes one uniform from an independent stream
    for the feature of a possible new investor.
    """

    if T < 0:
        raise DomainError("horizon must be non-negative")
    if stride < 1:
        raise DomainError("snapshot stride must be >= 1")
    state = DynState.initial(incumbents, theta)
    ledger = state.ledger
    base = base or DiffuseBase(mass=1.0)
    select_stream = UniformStream(seed)
    feature_stream = UniformStream(replicate_seed(seed, 0))
    wanted = set(snapshot_times(T, stride))
    times: List[int] = [0]
    shares: List[Tuple[float, ...]] = [state.incumbent_shares()]
    newcomer: List[float] = [state.newcomer_share()]
    truncated = False
    for _ in range(T):
        try:
            state, _ = _advance(state, s, base, select_stream.next(), feature_stream.next(), ledger)
        except SupplyOverflow:
            truncated = True
            break
        if state.t in wanted:
            times.append(state.t)
            shares.append(state.incumbent_shares())
            newcomer.append(state.newcomer_share())
    if truncated and times[-1] != state.t:
        times.append(state.t)
        shares.append(state.incumbent_shares())
        newcomer.append(state.newcomer_share())
    return DynTrajectory(
        times=tuple(times),
        incumbent_shares=np.asarray(shares, dtype=np.float64),
        newcomer_shares=np.asarray(newcomer, dtype=np.float64),
        final_state=state,
        truncated=truncated,
    )


__all__ = ["DynSelection", "DynState", "DynTrajectory", "dyn_simulate", "dyn_step"]
