"""Exhaustive path enumeration for small urns.

All K^T selection sequences are expanded with their exact probabilities; this
is the brute-force oracle behind the moment recursions and the urn simulator.
"""
from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from app.core.errors import DomainError
from app.core.types import FloatArray
from app.schedule import RewardSchedule, reward_path
from app.urn.models import sequential_total

MAX_PATHS = 1 << 20


def enumerate_paths(initial_coins: Sequence[float], s: RewardSchedule, T: int) -> List[Tuple[float, Tuple[float, ...]]]:
    """Return (probability, terminal coins) for every selection sequence of length ``T``."""

    K = len(initial_coins)
    if K ** T > MAX_PATHS:
        raise DomainError(f"{K}^{T} paths exceed the enumeration limit")
    path = reward_path(s, sequential_total(initial_coins), T)
    if path.truncated:
        raise DomainError("supply overflows inside the enumeration horizon")
    states: List[Tuple[float, Tuple[float, ...]]] = [(1.0, tuple(float(c) for c in initial_coins))]
    for t in range(T):
        reward = float(path.rewards[t])
        nxt: List[Tuple[float, Tuple[float, ...]]] = []
        for prob, coins in states:
            total = sequential_total(coins)
            for k in range(K):
                updated = list(coins)
                updated[k] += reward
                nxt.append((prob * coins[k] / total, tuple(updated)))
        states = nxt
    return states


def enumerated_raw_moments(
    initial_coins: Sequence[float],
    s: RewardSchedule,
    T: int,
    *,
    investor: int = 0,
    max_order: int = 4,
) -> FloatArray:
    """Exact E[pi_{investor,T}^j] for j = 1..max_order."""

    weights = []
    shares = []
    for prob, coins in enumerate_paths(initial_coins, s, T):
        weights.append(prob)
        shares.append(coins[investor] / sequential_total(coins))
    w = np.asarray(weights)
    x = np.asarray(shares)
    return np.array([float(np.dot(w, x**j)) for j in range(1, max_order + 1)])


__all__ = ["MAX_PATHS", "enumerate_paths", "enumerated_raw_moments"]
