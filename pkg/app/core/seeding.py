"""Deterministic seed derivation for replicate ensembles.

Replicate ``i`` of a run with master seed ``m`` uses the 64-bit word produced by
numpy's ``SeedSequence`` hash of ``(m, spawn_key=(i,))``. The derivation only
depends on ``(m, i)``, never on how replicates are distributed over workers.
"""
from __future__ import annotations

from typing import List

import numpy as np

from .types import Seed

UNIFORM_BLOCK = 4096


def replicate_seed(master_seed: int, index: int) -> Seed:
    """Return the derived seed of replicate ``index``."""

    if index < 0:
        raise ValueError("replicate index must be non-negative")
    sequence = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    return Seed(int(sequence.generate_state(1, dtype=np.uint64)[0]))


def replicate_seeds(master_seed: int, start: int, count: int) -> List[Seed]:
    return [replicate_seed(master_seed, start + offset) for offset in range(count)]


def generator(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed))


class UniformStream:
    """Block-buffered uniforms from a single generator.

    Draws are taken ``UNIFORM_BLOCK`` at a time; PCG64 doubles consume one word
    each so the sequence does not depend on the block size.
    """

    __slots__ = ("_rng", "_buffer", "_pos")

    def __init__(self, seed: int) -> None:
        self._rng = generator(seed)
        self._buffer = self._rng.random(UNIFORM_BLOCK)
        self._pos = 0

    def next(self) -> float:
        if self._pos == UNIFORM_BLOCK:
            self._buffer = self._rng.random(UNIFORM_BLOCK)
            self._pos = 0
        value = float(self._buffer[self._pos])
        self._pos += 1
        return value


__all__ = ["UNIFORM_BLOCK", "UniformStream", "generator", "replicate_seed", "replicate_seeds"]
