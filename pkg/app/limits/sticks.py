"""Stick-breaking constructions of GEM and Pitman-Yor weights."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from app.core.errors import DomainError
from app.core.types import FloatArray


@dataclass(frozen=True, slots=True)
class StickBreak:
    """Sticks W, weights W_j prod_{i<j}(1 - W_i) and residual prod(1 - W_i)."""

    sticks: FloatArray
    weights: FloatArray
    residual: FloatArray


def stick_breaking(a: FloatArray, b: FloatArray, rng: np.random.Generator, *, samples: int = 1) -> StickBreak:
    """Break sticks W_k ~ Beta(a_k, b_k); rows are independent samples."""

    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sticks = rng.beta(a, b, size=(samples, a.shape[0]))
    remaining = np.cumprod(1.0 - sticks, axis=1)
    before = np.ones_like(sticks)
    before[:, 1:] = remaining[:, :-1]
    return StickBreak(sticks=sticks, weights=sticks * before, residual=remaining[:, -1])


def gem_stick_breaking(theta: float, j_max: int, seed: int, *, samples: int = 1) -> StickBreak:
    """GEM(theta): i.i.d. Beta(1, theta) sticks."""

    if not theta > 0:
        raise DomainError("theta must be positive")
    if j_max < 1:
        raise DomainError("j_max must be >= 1")
    rng = np.random.default_rng(int(seed))
    return stick_breaking(np.ones(j_max), np.full(j_max, float(theta)), rng, samples=samples)


def pitman_yor_weights(discount: float, theta: float, j_max: int, seed: int, *, samples: int = 1) -> StickBreak:
    """Pitman-Yor sticks W_k ~ Beta(1 - discount, theta + k * discount), k = 1..j_max."""

    if not 0.0 <= discount < 1.0:
        raise DomainError("discount must lie in [0, 1)")
    if not theta > -discount:
        raise DomainError("theta must exceed -discount")
    if j_max < 1:
        raise DomainError("j_max must be >= 1")
    rng = np.random.default_rng(int(seed))
    k = np.arange(1, j_max + 1, dtype=np.float64)
    return stick_breaking(np.full(j_max, 1.0 - discount), float(theta) + k * discount, rng, samples=samples)


__all__ = ["StickBreak", "gem_stick_breaking", "pitman_yor_weights", "stick_breaking"]
