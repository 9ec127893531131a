"""Selection/reward step of the urn, single-path simulation and batch kernel.

Selection is inverse-CDF over ascending investor index: with cumulative coins
c_0 <= c_1 <= ... and x = u * c_{K-1}, investor k is the first index with
x < c_k. The scalar path and the vectorised batch kernel perform the same
floating-point operations in the same order, so a replicate simulated alone
or inside a batch yields identical shares.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import accumulate
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import DomainError, SupplyOverflow
from app.core.seeding import UNIFORM_BLOCK, UniformStream, generator
from app.core.types import FloatArray
from app.schedule import RewardSchedule, reward_at

from .models import ABSORPTION_TOLERANCE, Trajectory, UrnState

RENORMALIZE_EVERY = 1 << 16


def select_index(cumulative: Sequence[float], x: float) -> int:
    for index, bound in enumerate(cumulative):
        if x < bound:
            return index
    return len(cumulative) - 1


def step(state: UrnState, s: RewardSchedule, u: float) -> Tuple[UrnState, int]:
    """Advance one step with uniform ``u``; returns the new state and the selected index."""

    if not 0.0 <= u < 1.0:
        raise DomainError(f"u must lie in [0, 1), got {u!r}")
    reward = reward_at(s, state.t + 1, state.supply)
    cumulative = list(accumulate(state.coins))
    k = select_index(cumulative, u * cumulative[-1])
    coins = list(state.coins)
    coins[k] += reward
    supply = state.supply + reward
    if not math.isfinite(supply):
        raise SupplyOverflow(f"supply overflows at step {state.t + 1}", step=state.t + 1)
    t = state.t + 1
    if t % RENORMALIZE_EVERY == 0:
        supply = math.fsum(coins)
    return UrnState(t=t, coins=tuple(coins), supply=supply), k


def snapshot_times(horizon: int, stride: int) -> List[int]:
    times = list(range(0, horizon + 1, stride))
    if times[-1] != horizon:
        times.append(horizon)
    return times


def is_absorbed(shares: Sequence[float]) -> bool:
    return max(shares) > 1.0 - ABSORPTION_TOLERANCE


def simulate(
    initial_coins: Sequence[float],
    s: RewardSchedule,
    T: int,
    *,
    seed: int,
    tracked: Sequence[int] = (0,),
    stride: int = 1,
    record_selection: bool = False,
) -> Trajectory:
    """Simulate one path of ``T`` steps from ``initial_coins``.

    When the schedule overflows the double range the path stops at the last
    finite step and the trajectory is flagged ``truncated``.
    """

    if T < 0:
        raise DomainError("horizon must be non-negative")
    if stride < 1:
        raise DomainError("snapshot stride must be >= 1")
    state = UrnState.initial(initial_coins)
    tracked = tuple(tracked)
    if any(not 0 <= k < state.K for k in tracked):
        raise DomainError(f"tracked indices {tracked} out of range")

    stream = UniformStream(seed)
    wanted = set(snapshot_times(T, stride))
    times: List[int] = [0]
    series: Dict[int, List[float]] = {k: [state.share(k)] for k in tracked}
    selected: Optional[List[int]] = [] if record_selection else None
    truncated = False

    for _ in range(T):
        try:
            state, k = step(state, s, stream.next())
        except SupplyOverflow:
            truncated = True
            break
        if selected is not None:
            selected.append(k)
        if state.t in wanted:
            times.append(state.t)
            for j in tracked:
                series[j].append(state.share(j))

    if truncated and times[-1] != state.t:
        times.append(state.t)
        for j in tracked:
            series[j].append(state.share(j))

    return Trajectory(
        times=tuple(times),
        shares={k: tuple(v) for k, v in series.items()},
        final_state=state,
        selected=tuple(selected) if selected is not None else None,
        truncated=truncated,
        absorbed=is_absorbed(state.shares()),
    )


# ----------------------------------------------------------------------
# Vectorised batch kernel
# ----------------------------------------------------------------------
@dataclass(frozen=True, slots=True)
class BatchResult:
    snapshots: FloatArray
    terminal: FloatArray
    pool_snapshots: Optional[FloatArray]


def _uniform_block(generators: List[np.random.Generator]) -> FloatArray:
    return np.stack([rng.random(UNIFORM_BLOCK) for rng in generators])


def run_batch(
    seeds: Sequence[int],
    initial_coins: Sequence[float],
    rewards: FloatArray,
    times: Sequence[int],
    tracked: Sequence[int],
    *,
    theta: Optional[float] = None,
) -> BatchResult:
    """Advance one urn per seed along the deterministic reward path.

    With ``theta`` set, an extra pool column collects the coins of new
    investors and receives selection weight ``pool + theta``; ``theta`` never
    enters the supply used for shares.
    """

    B = len(seeds)
    K = len(initial_coins)
    columns = K + 1 if theta is not None else K
    coins = np.zeros((B, columns), dtype=np.float64)
    coins[:, :K] = np.asarray(initial_coins, dtype=np.float64)
    rows = np.arange(B)
    tracked_idx = np.asarray(tracked, dtype=np.int64)
    generators = [generator(seed) for seed in seeds]

    snaps = np.empty((B, len(times), len(tracked_idx)), dtype=np.float64)
    pool_snaps = np.empty((B, len(times)), dtype=np.float64) if theta is not None else None

    def record(slot: int) -> None:
        total = np.cumsum(coins, axis=1)[:, -1]
        snaps[:, slot, :] = coins[:, tracked_idx] / total[:, np.newaxis]
        if pool_snaps is not None:
            pool_snaps[:, slot] = coins[:, K] / total

    slot = 0
    if times and times[0] == 0:
        record(0)
        slot = 1

    fast_pair = theta is None and K == 2
    c0 = coins[:, 0]
    c1 = coins[:, 1] if K > 1 else None
    block = None
    horizon = int(rewards.shape[0])
    for t in range(horizon):
        offset = t % UNIFORM_BLOCK
        if offset == 0:
            block = _uniform_block(generators)
        u = block[:, offset]
        reward = float(rewards[t])
        if fast_pair:
            pick = u * (c0 + c1) < c0
            np.add(c0, reward, out=c0, where=pick)
            np.add(c1, reward, out=c1, where=~pick)
        else:
            cumulative = np.cumsum(coins, axis=1)
            total = cumulative[:, -1] + theta if theta is not None else cumulative[:, -1]
            hit = (u * total)[:, np.newaxis] < cumulative
            k = np.where(hit.any(axis=1), hit.argmax(axis=1), columns - 1)
            coins[rows, k] += reward
        if slot < len(times) and times[slot] == t + 1:
            record(slot)
            slot += 1

    total = np.cumsum(coins, axis=1)[:, -1]
    terminal = coins[:, :K] / total[:, np.newaxis]
    return BatchResult(snapshots=snaps[:, :slot, :], terminal=terminal, pool_snapshots=pool_snaps[:, :slot] if pool_snaps is not None else None)


__all__ = [
    "BatchResult",
    "RENORMALIZE_EVERY",
    "is_absorbed",
    "run_batch",
    "select_index",
    "simulate",
    "snapshot_times",
    "step",
]
